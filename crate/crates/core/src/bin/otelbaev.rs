fn main() {
    std::process::exit(otelbaev::cli::run(std::env::args_os()));
}

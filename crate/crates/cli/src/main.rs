fn main() {
    std::process::exit(cli::app::run(std::env::args_os()));
}

fn main() {
    std::process::exit(periodforge::cli::run(std::env::args_os()));
}

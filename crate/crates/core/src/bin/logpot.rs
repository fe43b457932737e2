fn main() {
    std::process::exit(logpot::cli::run(std::env::args_os()));
}

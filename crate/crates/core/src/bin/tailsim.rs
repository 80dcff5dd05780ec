fn main() {
    std::process::exit(tailsim::cli::run_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(qclock::cli::main_with_args(std::env::args_os()));
}

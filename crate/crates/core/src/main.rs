fn main() {
    std::process::exit(hitchin::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(qpolar::cli::main_with_args(std::env::args_os()));
}

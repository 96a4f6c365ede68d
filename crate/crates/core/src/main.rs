fn main() {
    std::process::exit(qobs::cli::main_with_args(std::env::args_os()));
}

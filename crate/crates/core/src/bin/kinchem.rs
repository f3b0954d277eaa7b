fn main() {
    std::process::exit(kinchem::cli::main_with_args(std::env::args_os()));
}

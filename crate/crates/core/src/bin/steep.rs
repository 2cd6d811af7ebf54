fn main() {
    std::process::exit(steep::cli::main_with_args(std::env::args_os()));
}

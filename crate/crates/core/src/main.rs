fn main() {
    std::process::exit(permint::cli::main_with_args(std::env::args_os()));
}

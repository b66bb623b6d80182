fn main() {
    std::process::exit(keepdg::cli::main_with_args(std::env::args_os()));
}

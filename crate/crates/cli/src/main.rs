fn main() {
    std::process::exit(epitoy_cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(psomotif_cli::main_with_args(std::env::args_os()));
}

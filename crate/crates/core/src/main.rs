fn main() {
    std::process::exit(etruck::cli::main_with_args(std::env::args_os()));
}

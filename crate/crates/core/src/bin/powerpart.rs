fn main() {
    std::process::exit(powerpart::cli::main_with_args(std::env::args_os()));
}

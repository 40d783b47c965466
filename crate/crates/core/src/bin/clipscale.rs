fn main() {
    std::process::exit(clipscale::cli::main_with_args(std::env::args_os()));
}

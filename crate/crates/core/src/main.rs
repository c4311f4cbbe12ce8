fn main() {
    std::process::exit(paintpot::cli::main_with_args(std::env::args_os()));
}

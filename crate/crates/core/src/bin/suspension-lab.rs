fn main() {
    std::process::exit(suspension_lab::cli::main_with_args(std::env::args_os()));
}

fn main() {
    dynrmat::cli::init_threads();
    std::process::exit(dynrmat::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(hyperent::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(qnlab::cli::main_with(std::env::args_os()));
}

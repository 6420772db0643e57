fn main() {
    std::process::exit(tlci::cli::main_with(std::env::args_os()));
}

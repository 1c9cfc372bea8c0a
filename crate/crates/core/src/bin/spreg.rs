fn main() {
    std::process::exit(spreg::cli::main_exit_code());
}

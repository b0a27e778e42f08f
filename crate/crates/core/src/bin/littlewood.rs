fn main() {
    std::process::exit(gencantor::cli::main());
}

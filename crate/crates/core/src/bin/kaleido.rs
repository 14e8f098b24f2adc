fn main() {
    std::process::exit(kaleido::cli::main());
}

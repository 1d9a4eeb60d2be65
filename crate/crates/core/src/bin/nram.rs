fn main() {
    std::process::exit(nram::cli::main());
}

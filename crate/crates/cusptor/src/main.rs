fn main() {
    std::process::exit(cusptor::cli::run());
}

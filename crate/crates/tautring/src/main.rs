fn main() {
    std::process::exit(tautring::cli::run());
}

fn main() {
    std::process::exit(rgtest::cli::run());
}

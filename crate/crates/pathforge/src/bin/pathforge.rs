fn main() {
    std::process::exit(pathforge::cli::run());
}

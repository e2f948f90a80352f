fn main() {
    std::process::exit(pureprep::cli::run());
}

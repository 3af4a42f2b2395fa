fn main() {
    std::process::exit(pmatch::cli::run());
}

fn main() {
    std::process::exit(degrade::cli::run());
}

fn main() {
    std::process::exit(supersde::run_cli())
}

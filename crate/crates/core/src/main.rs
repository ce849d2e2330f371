fn main() {
    std::process::exit(geox::cli::main());
}

fn main() {
    std::process::exit(ljl::cli::main());
}

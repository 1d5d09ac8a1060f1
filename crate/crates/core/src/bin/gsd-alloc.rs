fn main() {
    std::process::exit(gsd_alloc::cli::main());
}

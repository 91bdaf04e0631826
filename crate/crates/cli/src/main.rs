fn main() {
    std::process::exit(warpcheck::cli::main());
}

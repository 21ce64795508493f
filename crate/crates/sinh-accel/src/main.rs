fn main() {
    std::process::exit(sinh_accel::cli::main());
}

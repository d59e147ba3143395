fn main() {
    std::process::exit(aircomp::harness::cli::run());
}

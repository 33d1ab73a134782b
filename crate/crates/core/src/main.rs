fn main() {
    std::process::exit(frasob::cli::run(std::env::args()));
}

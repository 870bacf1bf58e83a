fn main() {
    std::process::exit(properact::cli::run(std::env::args()));
}

fn main() {
    std::process::exit(apolar_rank::cli::run(std::env::args().skip(1).collect()));
}

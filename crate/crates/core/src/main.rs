fn main() {
    std::process::exit(pgf_gof::cli::run());
}

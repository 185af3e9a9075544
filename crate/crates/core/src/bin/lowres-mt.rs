fn main() {
    std::process::exit(lowres_mt::cli::run());
}

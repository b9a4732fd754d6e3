fn main() {
    std::process::exit(wigner_edge::cli::run(std::env::args_os()));
}

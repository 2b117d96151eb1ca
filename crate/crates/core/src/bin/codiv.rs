fn main() {
    std::process::exit(codiv::cli::run(std::env::args_os()));
}

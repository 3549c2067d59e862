fn main() {
    std::process::exit(plreg::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(firstint::cli::run_cli(std::env::args_os()));
}

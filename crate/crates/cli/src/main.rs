fn main() {
    std::process::exit(conerefine_cli::run_cli(std::env::args_os()));
}

fn main() {
    std::process::exit(subqubo_cli::cli_main(std::env::args_os().collect()));
}

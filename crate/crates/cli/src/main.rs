fn main() {
    std::process::exit(pgc_cli::run(std::env::args_os()));
}

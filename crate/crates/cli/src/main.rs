fn main() {
    std::process::exit(kdsqnm_cli::run(std::env::args_os()));
}

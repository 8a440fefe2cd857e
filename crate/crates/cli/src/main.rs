fn main() {
    std::process::exit(aperyv_cli::run(std::env::args_os()));
}

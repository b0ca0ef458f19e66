fn main() {
    std::process::exit(lpcb_cli::run(std::env::args_os()));
}

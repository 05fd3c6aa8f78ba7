fn main() {
    std::process::exit(bec_squeeze_cli::run(std::env::args_os()));
}

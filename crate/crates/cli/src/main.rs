fn main() {
    std::process::exit(lweak_cli::run(std::env::args_os()));
}

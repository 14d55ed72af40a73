fn main() {
    std::process::exit(cosegal_cli::run(std::env::args_os()));
}

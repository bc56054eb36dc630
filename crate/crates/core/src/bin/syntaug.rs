fn main() {
    std::process::exit(syntaug::cli::run(std::env::args_os()));
}

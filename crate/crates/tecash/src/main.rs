fn main() {
    std::process::exit(tecash::cli::run(std::env::args_os()));
}

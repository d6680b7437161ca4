fn main() {
    std::process::exit(polymaj::cli::run(std::env::args_os()));
}

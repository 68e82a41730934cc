fn main() {
    std::process::exit(domus::cli::run(std::env::args_os()));
}

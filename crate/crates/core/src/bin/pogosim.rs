fn main() {
    std::process::exit(pogosim::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(ncrank::cli::run(std::env::args_os()));
}

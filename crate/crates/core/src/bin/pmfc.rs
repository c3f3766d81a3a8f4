fn main() {
    std::process::exit(pmfc::cli::run(std::env::args_os()));
}

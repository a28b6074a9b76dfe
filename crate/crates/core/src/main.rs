fn main() {
    std::process::exit(geored::cli::run(std::env::args_os()));
}

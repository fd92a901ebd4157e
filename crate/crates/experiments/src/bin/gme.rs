fn main() {
    std::process::exit(gme_experiments::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(biharm::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(hilbertforge_cli::run(std::env::args_os()));
}

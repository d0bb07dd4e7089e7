fn main() {
    std::process::exit(shallowwell_cli::run(std::env::args_os()));
}

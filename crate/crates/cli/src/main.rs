fn main() {
    std::process::exit(driftlab_cli::run(std::env::args_os()));
}

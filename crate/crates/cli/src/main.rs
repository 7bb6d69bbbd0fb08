fn main() {
    std::process::exit(trigbf_cli::run(std::env::args_os()));
}

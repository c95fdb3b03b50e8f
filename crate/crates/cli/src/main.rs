fn main() {
    std::process::exit(distcent_cli::run(std::env::args_os()));
}

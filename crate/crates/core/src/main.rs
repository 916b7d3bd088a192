fn main() {
    std::process::exit(kgpt::cli::run(std::env::args_os()));
}

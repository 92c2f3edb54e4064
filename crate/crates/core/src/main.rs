fn main() {
    std::process::exit(molfm::cli::run(std::env::args_os()));
}

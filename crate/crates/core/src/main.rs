fn main() {
    std::process::exit(qrm::cli::run(std::env::args_os()));
}

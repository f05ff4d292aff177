fn main() {
    std::process::exit(cfdp::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(chamberwalk::cli::run(std::env::args_os().skip(1)));
}

fn main() {
    std::process::exit(qlocal::cli::run(std::env::args_os()));
}

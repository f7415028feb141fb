fn main() {
    std::process::exit(sympfac::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(progdeg::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(traitlab::cli::run(std::env::args_os()));
}

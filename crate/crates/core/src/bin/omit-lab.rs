fn main() {
    std::process::exit(omit_lab::cli::run(std::env::args_os()));
}

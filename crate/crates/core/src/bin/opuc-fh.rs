fn main() {
    std::process::exit(opuc_fh::cli::run(std::env::args_os()));
}

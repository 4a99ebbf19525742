fn main() {
    std::process::exit(qsp_core::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(econ_complexity::cli::run(std::env::args_os()));
}

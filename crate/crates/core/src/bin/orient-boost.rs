fn main() {
    std::process::exit(orient_boost::cli::main_with_args(std::env::args_os()));
}

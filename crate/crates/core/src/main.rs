fn main() {
    std::process::exit(bm_stability::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(torus_scan::cli::main_with_args(std::env::args_os()));
}

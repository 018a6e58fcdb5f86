fn main() {
    std::process::exit(entangle_core::harness::cli::run_cli(std::env::args_os()));
}

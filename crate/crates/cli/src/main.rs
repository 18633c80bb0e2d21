fn main() {
    std::process::exit(hsl_cli::dispatch(std::env::args_os()));
}

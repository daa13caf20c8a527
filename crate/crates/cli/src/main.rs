fn main() {
    std::process::exit(pickdecomp::run_cli(std::env::args_os()));
}

fn main() {
    std::process::exit(capatree_cli::run(std::env::args_os()));
}

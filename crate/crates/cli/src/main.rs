fn main() {
    std::process::exit(mcast_cli::main_with(std::env::args_os()));
}

fn main() {
    std::process::exit(awr_cli::run_command(std::env::args_os()));
}

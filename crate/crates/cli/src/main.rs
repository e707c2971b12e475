fn main() {
    std::process::exit(airybasis_cli::run(std::env::args_os()));
}

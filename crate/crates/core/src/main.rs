fn main() {
    std::process::exit(pebblecover::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(market_moments::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(absorbing_walk::cli::run(std::env::args_os()));
}

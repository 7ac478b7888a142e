fn main() {
    std::process::exit(vrgaze::cli::run(std::env::args_os()));
}

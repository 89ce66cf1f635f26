fn main() {
    std::process::exit(tfq::cli::cli_main(std::env::args_os()));
}

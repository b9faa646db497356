fn main() {
    std::process::exit(sasc::cli::cli_main(std::env::args_os()));
}

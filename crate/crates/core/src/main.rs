fn main() {
    std::process::exit(topoloom::cli::run(std::env::args_os()));
}

fn main() {
    let code = hierkrig::cli::cli_main(std::env::args_os());
    std::process::exit(code);
}

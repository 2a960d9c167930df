fn main() {
    let code = actform::cli::run(std::env::args_os());
    std::process::exit(code);
}

fn main() {
    let code = oc_reason::cli::run(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}

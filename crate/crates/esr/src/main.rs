fn main() {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = esr::cli::main_with(std::env::args_os(), &mut lock);
    std::process::exit(code);
}

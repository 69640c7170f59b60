use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = laguerre_core::cli::parse_and_dispatch(&argv, &mut out, &mut err);
    let _ = out.flush();
    std::process::exit(code);
}

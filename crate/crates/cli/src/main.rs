use std::io::Write;

fn main() {
    let outcome = bdsk_cli::run_from(std::env::args());
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(outcome.stdout.as_bytes());
    let _ = stdout.flush();
    std::process::exit(outcome.exit_code);
}

use std::io::Write;

fn main() {
    let (report, code) = mvdyn_cli::run_command(std::env::args());
    // One write of the whole report.
    let text = format!("{}\n", report.to_json());
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    std::process::exit(code);
}

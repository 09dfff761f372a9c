use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = ring_explorer::run(&args, &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code)
}

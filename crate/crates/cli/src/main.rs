use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = twistmodel::run(std::env::args_os());
    for line in &outcome.summary {
        if outcome.exit_code == 0 {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    ExitCode::from(outcome.exit_code)
}

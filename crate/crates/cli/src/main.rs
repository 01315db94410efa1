use std::process::ExitCode;

fn main() -> ExitCode {
    let depth = std::env::var(perron_cli::run::MAX_DEPTH_VAR).ok();
    let code = perron_cli::run(
        std::env::args_os().collect(),
        depth.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}

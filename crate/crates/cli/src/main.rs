use std::io::{stderr, stdin, stdout};

fn main() {
    let mut input = stdin().lock();
    let mut out = stdout().lock();
    let mut err = stderr().lock();
    let code = makerforge_cli::run_cli(
        std::env::args_os(),
        &mut makerforge_cli::Io {
            input: &mut input,
            out: &mut out,
            err: &mut err,
        },
    );
    std::process::exit(code);
}

use std::io::{stderr, stdout};

fn main() {
    let code = semiassign_cli::dispatch(std::env::args_os(), &mut stdout(), &mut stderr());
    std::process::exit(code);
}

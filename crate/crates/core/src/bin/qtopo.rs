use std::io;

fn main() {
    let stdout = io::stdout();
    let code = qtopo::cli::run(std::env::args_os(), &mut stdout.lock());
    std::process::exit(code);
}

use std::io::IsTerminal;

fn main() {
    let stdout = std::io::stdout();
    let is_tty = stdout.is_terminal();
    let code = quadlat::cli::run(std::env::args_os(), &mut stdout.lock(), &mut std::io::stderr(), is_tty);
    std::process::exit(code);
}

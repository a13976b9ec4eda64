use std::io::{self, BufWriter};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = luce_cli::run(argv, &mut out, &mut io::stderr());
    drop(out);
    std::process::exit(code);
}

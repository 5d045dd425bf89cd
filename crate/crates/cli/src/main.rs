use std::io::Write;

fn main() {
    let out = quivmod_cli::run(std::env::args(), &mut std::io::stdin().lock());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::io::stdout().flush().ok();
    std::process::exit(out.code);
}

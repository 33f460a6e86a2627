use std::io::Write;
use zeta_asym::config::PRECISION_ENV;

fn main() {
    let env = std::env::var(PRECISION_ENV).ok();
    let out = zeta_asym::run(std::env::args_os(), env.as_deref());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::io::stdout().flush().ok();
    std::process::exit(out.code);
}

use clap::Parser;
use flatlab::cli::{run, Cli};

fn main() -> anyhow::Result<()> {
    let out = run(Cli::parse())?;
    print!("{out}");
    Ok(())
}

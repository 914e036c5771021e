use clap::Parser;
use polyqubo::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    if let Err(f) = execute(&cli, &mut stdout.lock()) {
        eprintln!("error: {}", f.message);
        std::process::exit(f.code);
    }
}

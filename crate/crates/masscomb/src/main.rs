use clap::Parser;

fn main() {
    let cli = masscomb::cli::Cli::parse();
    if let Err(e) = masscomb::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

use clap::Parser;

fn main() {
    let cli = fvst_cli::Cli::parse();
    if let Err(f) = fvst_cli::run(cli) {
        eprintln!("error: {:#}", f.error());
        std::process::exit(f.exit_code());
    }
}

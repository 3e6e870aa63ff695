use clap::Parser;

fn main() {
    let cli = fpb::Cli::parse();
    if let Err(err) = fpb::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

use clap::Parser;

fn main() {
    let cli = dnls::cli::Cli::parse();
    std::process::exit(dnls::cli::run(cli));
}

use clap::Parser;

fn main() {
    let cli = kochset::cli::Cli::parse();
    std::process::exit(kochset::cli::run(cli));
}

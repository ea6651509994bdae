use clap::Parser;

fn main() {
    let cli = zpflab_cli::Cli::parse();
    std::process::exit(zpflab_cli::run_cli(cli));
}

use clap::Parser;

fn main() {
    let cli = cantorprod_cli::Cli::parse();
    std::process::exit(cantorprod_cli::run(cli));
}

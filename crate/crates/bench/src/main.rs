use clap::Parser;

fn main() {
    let cli = spgemm_bench::cli::Cli::parse();
    if let Err(e) = spgemm_bench::cli::run(cli, &mut std::io::stdout().lock()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

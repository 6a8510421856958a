use clap::Parser;

fn main() {
    let cli = mux_overhead_cli::Cli::parse();
    match mux_overhead_cli::run(cli) {
        Ok(manifest) => println!("wrote {}", manifest.display()),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

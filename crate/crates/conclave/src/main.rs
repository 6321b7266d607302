use clap::Parser;

use conclave::cli::{self, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(error) = cli::run(cli) {
        let envelope = serde_json::json!({
            "error": error.kind(),
            "message": error.to_string(),
        });
        eprintln!("{envelope}");
        std::process::exit(1);
    }
}

use clap::Parser;

fn main() {
    let cli = bosonext_cli::run::Cli::parse();
    if let Err(e) = bosonext_cli::run::execute(cli) {
        eprintln!("{}", serde_json::json!({ "error": e.message }));
        std::process::exit(if e.usage { 2 } else { 1 });
    }
}

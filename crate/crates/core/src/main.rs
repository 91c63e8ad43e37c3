use clap::Parser;

use condensate_lab::cli::{run, Args};

fn main() {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(err) if err.use_stderr() => {
            let message = err.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error: arguments: {first}");
            std::process::exit(2);
        }
        Err(err) => {
            // --help and --version
            let _ = err.print();
            return;
        }
    };
    std::process::exit(run(&args));
}

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use discourse_cli::{exit_code, lacan, prepare, serve, traits};

#[derive(Parser)]
#[command(name = "discourse", version, about = "Headline reliability toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean a headline CSV and write the test/evaluation split
    Prepare(prepare::PrepareArgs),
    /// Conditional CDFs, posteriors and threshold-rule metrics
    Traits(traits::TraitsArgs),
    /// Partition, minimal classifier and verification from annotations
    Lacan(lacan::LacanArgs),
    /// Run the annotation service
    Serve(serve::ServeArgs),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Prepare(a) => {
            let s = prepare::run(&a)?;
            println!(
                "{} headlines kept ({} short, {} duplicate removed); test {} / eval {}",
                s.total, s.removed_short, s.removed_dup, s.test_size, s.eval_size
            );
        }
        Command::Traits(a) => {
            let r = traits::run(&a)?;
            for m in &r.rules {
                let acc = m.accuracy_pct.map_or("-".to_owned(), |p| format!("{p:.2}%"));
                println!("{:<9} population {:>6}  correct {:>6}  accuracy {acc}", m.rule, m.population, m.correct);
            }
        }
        Command::Lacan(a) => {
            let o = lacan::run(&a)?;
            println!("label 0: {}", o.verification.derived.expr0);
            println!("label 1: {}", o.verification.derived.expr1);
            let abstain: Vec<String> = o.verification.derived.complementarity.abstain_codes.iter().map(|c| c.to_string()).collect();
            println!("exclusive: {}  abstain: {{{}}}", o.verification.derived.complementarity.exclusive, abstain.join(", "));
            if let Some(h) = &o.holdout {
                println!(
                    "held out {}: {} correct, {} wrong, {} abstained",
                    h.derived.held_out, h.derived.correct, h.derived.wrong, h.derived.abstained
                );
            }
        }
        Command::Serve(a) => serve::run(&a)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

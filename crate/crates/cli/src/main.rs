mod args;
mod commands;
mod record;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use parity_qht::parity::Hypothesis;

use args::{Cli, Command, Common, Format, PairGridArgs};
use commands::{GridOptions, Pair};
use record::{Header, Record};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] parity_qht::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use parity_qht::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::Validation(_) | E::Unsupported(_) | E::ResourceLimit { .. }) => 2,
            CliError::Core(E::Numerical(_) | E::NonTermination { .. }) => 1,
            CliError::Io(_) => 1,
        }
    }
}

struct Output {
    header: Header,
    records: Vec<Record>,
}

fn pair_of(null: &args::NullArgs, alt: &args::AltArgs, tol: f64) -> Result<Pair, CliError> {
    Ok(Pair::new(
        commands::null_hypothesis(null)?,
        commands::alt_hypothesis(alt)?,
        tol,
    ))
}

fn pair_grid(a: &PairGridArgs, command: &'static str, cap: usize) -> Result<Output, CliError> {
    let pair = pair_of(&a.null, &a.alt, a.common.classify_tol)?;
    if command == "theorem1" && pair.tag.is_none() {
        return Err(CliError::Usage("theorem1 needs two pure states".into()));
    }
    let ns = commands::n_values(&a.n, None)?;
    let epss = commands::eps_values(&a.eps)?;
    let records = commands::grid(
        &[pair],
        &ns,
        &epss,
        GridOptions {
            command,
            unrestricted: a.unrestricted,
            with_critical: true,
            oracle: !a.common.no_oracle,
            cap,
        },
    )?;
    Ok(Output {
        header: commands::header(&a.common, cap),
        records,
    })
}

fn run(cli: &Cli, cap: usize) -> Result<(Output, &Common), CliError> {
    Ok(match &cli.command {
        Command::Twirl(a) => {
            let ns = commands::n_values(&a.n, None)?;
            let records = commands::twirl(a.p, a.phi, &ns, !a.common.no_oracle, cap)?;
            (
                Output {
                    header: commands::header(&a.common, cap),
                    records,
                },
                &a.common,
            )
        }
        Command::Beta(a) => (pair_grid(a, "beta", cap)?, &a.common),
        Command::Dhe(a) => (pair_grid(a, "dhe", cap)?, &a.common),
        Command::Theorem1(a) => (pair_grid(a, "theorem1", cap)?, &a.common),
        Command::CriticalN(a) => {
            let pair = pair_of(&a.null, &a.alt, a.common.classify_tol)?;
            let epss = commands::eps_values(&a.eps)?;
            (
                Output {
                    header: commands::header(&a.common, cap),
                    records: commands::critical(&pair, &epss)?,
                },
                &a.common,
            )
        }
        Command::Theorem3(a) => {
            let ns = commands::n_values(&a.n, None)?;
            let epss = commands::eps_values(&a.eps)?;
            (
                Output {
                    header: commands::header(&a.common, cap),
                    records: commands::theorem3(a.p, &ns, &epss, !a.common.no_oracle, cap)?,
                },
                &a.common,
            )
        }
        Command::Sweep(a) => {
            let ns = commands::n_values(&a.n, None)?;
            let epss = commands::eps_values(&a.eps)?;
            let mut header = commands::header(&a.common, cap);
            let pairs = match a.random_pairs {
                Some(k) => {
                    header.push(("seed", a.seed.to_string()));
                    commands::random_pairs(k, a.seed, a.common.classify_tol)
                }
                None => vec![pair_of(&a.null, &a.alt, a.common.classify_tol)?],
            };
            let points = pairs
                .len()
                .saturating_mul(ns.len())
                .saturating_mul(epss.len());
            if points > a.max_grid {
                return Err(CliError::Usage(format!(
                    "grid has {points} points, more than --max-grid {}",
                    a.max_grid
                )));
            }
            let records = commands::grid(
                &pairs,
                &ns,
                &epss,
                GridOptions {
                    command: "sweep",
                    unrestricted: false,
                    with_critical: true,
                    oracle: !a.common.no_oracle,
                    cap,
                },
            )?;
            (Output { header, records }, &a.common)
        }
        Command::Chernoff(a) => {
            let pair = Pair::new(
                commands::null_hypothesis(&a.null)?,
                commands::alt_hypothesis(&a.alt)?,
                0.0,
            );
            if matches!(
                (pair.h0, pair.h1),
                (Hypothesis::MaxMixed, Hypothesis::MaxMixed)
            ) {
                return Err(CliError::Usage("the two states coincide".into()));
            }
            let ns = commands::n_values(&a.n, Some(1))?;
            let (records, extra) = commands::chernoff_rows(&pair, &ns, cap)?;
            let mut header = commands::header(&a.common, cap);
            header.extend(extra);
            (Output { header, records }, &a.common)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::dense_cap().and_then(|cap| {
        let (out, common) = run(&cli, cap)?;
        let text = match common.format {
            Format::Csv => record::render_csv(&out.header, &out.records),
            Format::Json => record::render_json(&out.header, &out.records),
        };
        match &common.out {
            Some(path) => std::fs::write(path, &text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        let diffs = out.records.iter().filter_map(|r| r.abs_diff);
        let worst = diffs.fold(0.0_f64, |m, d| if m.is_nan() || d.is_nan() { f64::NAN } else { m.max(d) });
        if worst.is_nan() || worst > common.oracle_tol {
            eprintln!(
                "error: analytic and oracle values differ by {worst:e}, more than --oracle-tol {:e}",
                common.oracle_tol
            );
            return Ok(ExitCode::from(1));
        }
        Ok(ExitCode::SUCCESS)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

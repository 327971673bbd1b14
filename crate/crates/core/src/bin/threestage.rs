use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use threestage::{
    run_experiment, run_experiment_with_transcripts, seeded_frame, serialize_report,
    serialize_transcripts, AdversaryStrategy, AngleMode, Error, EveBasis, ExperimentConfig,
    OrthogonalPair, PairChoice, ProtocolKind, ReportFormat, StageSet,
};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProtocolArg {
    ThreeStage,
    Keydist,
    KeydistAuthority,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AngleArg {
    Random,
    Fixed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PairArg {
    Computational,
    Hadamard,
    General,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AdversaryArg {
    None,
    InterceptResend,
    Substitute,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EveBasisArg {
    Computational,
    Hadamard,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

/// Seeded Monte Carlo runs of the three-stage protocol and key distribution.
#[derive(Debug, Parser)]
#[command(name = "threestage", version)]
struct Args {
    #[arg(long, value_enum, default_value = "three-stage")]
    protocol: ProtocolArg,
    /// Data bits per session, or key-distribution rounds per trial.
    #[arg(long, default_value_t = 64)]
    bits: usize,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "random")]
    angle_mode: AngleArg,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long, value_enum, default_value = "computational")]
    pair: PairArg,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_enum, default_value = "none")]
    adversary: AdversaryArg,
    #[arg(long, value_enum, default_value = "computational")]
    eve_basis: EveBasisArg,
    /// Comma-separated hops Eve acts on, e.g. `1,3`.
    #[arg(long, default_value = "1")]
    eve_stages: String,
    #[arg(long, default_value_t = 32)]
    known_bits: usize,
    #[arg(long, default_value_t = 8)]
    parity_block: usize,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Also write every session transcript as JSON lines (to `<out>.transcripts.jsonl`).
    #[arg(long)]
    dump_transcripts: bool,
}

fn config_from(args: &Args) -> Result<ExperimentConfig, Error> {
    let missing = |what: &str| Error::InvalidConfig(format!("{what} is required"));
    let angle_mode = match args.angle_mode {
        AngleArg::Random => AngleMode::PerBitRandom,
        AngleArg::Fixed => AngleMode::Fixed {
            theta: args
                .theta
                .ok_or_else(|| missing("--theta with --angle-mode fixed"))?,
            phi: args
                .phi
                .ok_or_else(|| missing("--phi with --angle-mode fixed"))?,
        },
    };
    let pair = match args.pair {
        PairArg::Computational => PairChoice::Computational,
        PairArg::Hadamard => PairChoice::Hadamard,
        PairArg::General => PairChoice::General {
            alpha: args
                .alpha
                .ok_or_else(|| missing("--alpha with --pair general"))?,
            beta: args
                .beta
                .ok_or_else(|| missing("--beta with --pair general"))?,
        },
    };
    let strategy = match args.adversary {
        AdversaryArg::None => AdversaryStrategy::Passthrough,
        AdversaryArg::InterceptResend => {
            let basis = match args.eve_basis {
                EveBasisArg::Computational => EveBasis::Fixed(OrthogonalPair::computational()),
                EveBasisArg::Hadamard => EveBasis::Fixed(OrthogonalPair::hadamard()),
                EveBasisArg::Random => EveBasis::HaarRandom,
            };
            AdversaryStrategy::intercept_resend(basis, StageSet::parse(&args.eve_stages)?)
        }
        AdversaryArg::Substitute => {
            AdversaryStrategy::substitute(StageSet::parse(&args.eve_stages)?)
        }
    };
    let protocol = match args.protocol {
        ProtocolArg::ThreeStage => ProtocolKind::ThreeStage,
        ProtocolArg::Keydist => ProtocolKind::KeyDist,
        ProtocolArg::KeydistAuthority => ProtocolKind::KeyDistAuthority,
    };
    let cfg = ExperimentConfig {
        protocol,
        n_bits: args.bits,
        trials: args.trials,
        seed: args.seed,
        angle_mode,
        pair,
        strategy,
        frame: seeded_frame(args.bits, args.parity_block, args.known_bits, args.seed)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write_out(path: Option<&PathBuf>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match config_from(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let run = if args.dump_transcripts {
        run_experiment_with_transcripts(&cfg)
    } else {
        run_experiment(&cfg).map(|r| (r, Vec::new()))
    };
    let (report, transcripts) = match run {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let format = match args.format {
        FormatArg::Json => ReportFormat::Json,
        FormatArg::Csv => ReportFormat::Csv,
    };
    if let Err(e) = write_out(args.out.as_ref(), &serialize_report(&report, format)) {
        eprintln!("error: writing report: {e}");
        return ExitCode::FAILURE;
    }
    if args.dump_transcripts {
        let path = args.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".transcripts.jsonl");
            PathBuf::from(s)
        });
        if let Err(e) = write_out(path.as_ref(), &serialize_transcripts(&transcripts)) {
            eprintln!("error: writing transcripts: {e}");
            return ExitCode::FAILURE;
        }
    }
    ExitCode::SUCCESS
}

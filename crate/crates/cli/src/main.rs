use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wristsonar::commands::{simulate, study, syseval, track, Common};
use wristsonar::{with_threads, Result};

/// Sonar finger tracking, selection triggers and Fitts' law studies on
/// synthetic data.
#[derive(Debug, Parser)]
#[command(name = "wristsonar", version)]
struct Cli {
    /// JSON configuration; defaults are used for anything left out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if needed.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed recorded in every output; overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    plot: bool,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Range × speed × noise sweep on the virtual linear stage.
    Syseval,
    /// Render a scene to a WAV recording and its ground truth.
    Simulate,
    /// Track a mono 16-bit WAV recording frame by frame.
    Track {
        /// Input WAV file.
        input: PathBuf,
    },
    /// Serial binary selection study.
    Fitts,
    /// Multi-target selection study.
    Multi,
}

fn dispatch(cli: &Cli) -> Result<()> {
    let common = Common { config: cli.config.clone(), out: cli.out.clone(), seed: cli.seed, plot: cli.plot };
    with_threads(cli.threads, || match &cli.command {
        Command::Syseval => syseval::execute(&common).map(|r| {
            let c = &r.checks;
            eprintln!(
                "{} trials; near quiet max {:.3} mm, near walker max {:.3} mm, far min {:.3} mm",
                r.trials.len(),
                c.near_quiet_max_mm,
                c.near_walker_max_mm,
                c.far_min_mm
            );
        }),
        Command::Simulate => simulate::execute(&common).map(|s| {
            eprintln!("{} frames, {:.2} s, peak {:.3}", s.frames, s.duration_s, s.peak_abs);
        }),
        Command::Track { input } => track::execute(&common, input).map(|_| ()),
        Command::Fitts => study::execute(study::Study::Serial, &common).map(report_study),
        Command::Multi => study::execute(study::Study::Multi, &common).map(report_study),
    })?
}

fn report_study(r: study::StudyReport) {
    for m in &r.means {
        let h = match m.haptic {
            Some(true) => "haptics on",
            Some(false) => "haptics off",
            None => "pooled",
        };
        eprintln!("{:<16} {:<12} TP {:.2} MT {:.3} ER {:.2}% TRE {:.2}", m.method.as_str(), h, m.tp, m.mt, m.er, m.tre);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wristsonar: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

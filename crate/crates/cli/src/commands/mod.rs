//! One module per subcommand. Each exposes a pure `run` that computes a
//! report and an `execute` that resolves configuration and writes files.

pub mod simulate;
pub mod study;
pub mod syseval;
pub mod track;

use std::path::PathBuf;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Common {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub plot: bool,
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Sample standard deviation; `NaN` below two values.
pub(crate) fn sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

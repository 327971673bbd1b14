//! Plug-in estimators over 2×2 contingency tables.

use serde::{Deserialize, Serialize};

use crate::channel::JointCounts;
use crate::error::{Error, Result};

/// Sample size, joint distribution, row marginals, column marginals.
type Distribution = (f64, [[f64; 2]; 2], [f64; 2], [f64; 2]);

fn cells(counts: &JointCounts) -> Result<Distribution> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let n = total as f64;
    let mut p = [[0.0; 2]; 2];
    let mut px = [0.0; 2];
    let mut py = [0.0; 2];
    for i in 0..2 {
        for j in 0..2 {
            p[i][j] = counts.0[i][j] as f64 / n;
            px[i] += p[i][j];
            py[j] += p[i][j];
        }
    }
    Ok((n, p, px, py))
}

/// `Σ p(x,y) log₂[p(x,y) / (p(x) p(y))]`, with `0 · log 0 = 0`.
pub fn mutual_information(counts: &JointCounts) -> Result<f64> {
    let (_, p, px, py) = cells(counts)?;
    let mut mi = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            if p[i][j] > 0.0 {
                mi += p[i][j] * (p[i][j] / (px[i] * py[j])).log2();
            }
        }
    }
    // Rounding can leave a vanishing negative.
    Ok(mi.max(0.0))
}

/// Delta-method standard error of the plug-in estimate:
/// `sqrt((Σ p·L² − I²) / N)` with `L = log₂[p(x,y)/(p(x)p(y))]`.
pub fn mutual_information_std_error(counts: &JointCounts) -> Result<f64> {
    let (n, p, px, py) = cells(counts)?;
    let mut first = 0.0;
    let mut second = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            if p[i][j] > 0.0 {
                let l = (p[i][j] / (px[i] * py[j])).log2();
                first += p[i][j] * l;
                second += p[i][j] * l * l;
            }
        }
    }
    Ok(((second - first * first).max(0.0) / n).sqrt())
}

/// A mutual-information estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiEstimate {
    pub bits: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl MiEstimate {
    pub fn from_counts(counts: &JointCounts) -> Result<Self> {
        Ok(Self {
            bits: mutual_information(counts)?,
            std_error: mutual_information_std_error(counts)?,
            samples: counts.total(),
        })
    }
}

/// Pearson chi-square statistic for independence on a 2×2 table.
pub fn chi_square_independence(counts: &JointCounts) -> Result<f64> {
    let (n, p, px, py) = cells(counts)?;
    let mut chi = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let expected = px[i] * py[j];
            if expected > 0.0 {
                chi += n * (p[i][j] - expected).powi(2) / expected;
            }
        }
    }
    Ok(chi)
}

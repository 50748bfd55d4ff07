use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// How each tree's training rows are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// n draws with replacement.
    #[default]
    Bootstrap,
    /// ceil(s * n) draws without replacement, s in (0, 1].
    Subsample(f64),
}

impl Sampling {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Sampling::Bootstrap => Ok(()),
            Sampling::Subsample(s) if s > 0.0 && s <= 1.0 => Ok(()),
            Sampling::Subsample(s) => Err(Error::Config(format!(
                "subsample fraction must lie in (0, 1], got {s}"
            ))),
        }
    }

    /// Number of in-bag draws for a dataset of `n` rows.
    pub fn draws(&self, n: usize) -> usize {
        match *self {
            Sampling::Bootstrap => n,
            // The 1e-9 slack keeps e.g. 0.3 * 10 from rounding up to 4.
            Sampling::Subsample(s) => (((s * n as f64) - 1e-9).ceil() as usize).clamp(1, n),
        }
    }
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sampling::Bootstrap => f.write_str("bootstrap"),
            Sampling::Subsample(s) => write!(f, "subsample:{s}"),
        }
    }
}

impl FromStr for Sampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "bootstrap" {
            return Ok(Sampling::Bootstrap);
        }
        let frac = s
            .strip_prefix("subsample:")
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown sampling mode '{s}' (expected bootstrap or subsample:<s>)"
                ))
            })?
            .parse::<f64>()
            .map_err(|e| Error::Config(format!("bad subsample fraction in '{s}': {e}")))?;
        let mode = Sampling::Subsample(frac);
        mode.validate()?;
        Ok(mode)
    }
}

/// In-bag multiplicities and the complementary out-of-bag rows of one tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSplit {
    inbag: Vec<u32>,
    oob: Vec<usize>,
}

impl SampleSplit {
    pub fn from_counts(inbag: Vec<u32>) -> Self {
        let oob = inbag
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 0)
            .map(|(i, _)| i)
            .collect();
        SampleSplit { inbag, oob }
    }

    /// Every row in-bag exactly once.
    pub fn full(n: usize) -> Self {
        Self::from_counts(vec![1; n])
    }

    pub fn n(&self) -> usize {
        self.inbag.len()
    }

    pub fn inbag(&self) -> &[u32] {
        &self.inbag
    }

    pub fn oob(&self) -> &[usize] {
        &self.oob
    }

    /// Total in-bag weight, |D^(T)| counted with multiplicity.
    pub fn inbag_total(&self) -> u64 {
        self.inbag.iter().map(|&c| c as u64).sum()
    }

    /// `(row, multiplicity)` for every row drawn at least once.
    pub fn weighted_rows(&self) -> Vec<(usize, u32)> {
        self.inbag
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i, c))
            .collect()
    }

    /// OOB rows with unit weight.
    pub fn oob_rows(&self) -> Vec<(usize, u32)> {
        self.oob.iter().map(|&i| (i, 1)).collect()
    }

    pub(crate) fn is_consistent(&self) -> bool {
        let expected: Vec<usize> = self
            .inbag
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 0)
            .map(|(i, _)| i)
            .collect();
        expected == self.oob
    }
}

pub fn draw_sample(n: usize, mode: Sampling, rng: &mut Rng) -> Result<SampleSplit> {
    if n == 0 {
        return Err(Error::Config("cannot sample from zero rows".into()));
    }
    mode.validate()?;
    let mut inbag = vec![0u32; n];
    match mode {
        Sampling::Bootstrap => {
            for _ in 0..n {
                inbag[rng.random_range(0..n)] += 1;
            }
        }
        Sampling::Subsample(_) => {
            for i in index::sample(rng, n, mode.draws(n)) {
                inbag[i] = 1;
            }
        }
    }
    Ok(SampleSplit::from_counts(inbag))
}

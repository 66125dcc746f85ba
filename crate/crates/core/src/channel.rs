//! Erasure-channel extrinsic transfer functions.
//!
//! A channel is described by its erasure probability `epsilon` and a transfer
//! function `f(epsilon, x)`: the erasure fraction returned by the channel
//! detector when a fraction `x` of its a-priori inputs are erased.

use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

/// Extrinsic transfer function of the dicode erasure channel without
/// precoding, `4 eps^2 / (2 - x (1 - eps))^2`.
pub fn dec_transfer(epsilon: f64, x: f64) -> Result<f64> {
    check_probability("epsilon", epsilon)?;
    check_probability("x", x)?;
    Ok(dec_transfer_unchecked(epsilon, x))
}

#[inline]
pub(crate) fn dec_transfer_unchecked(epsilon: f64, x: f64) -> f64 {
    let d = 2.0 - x * (1.0 - epsilon);
    4.0 * epsilon * epsilon / (d * d)
}

/// Symmetric information rate of the dicode erasure channel,
/// `1 - 2 eps^2 / (1 + eps)`.
pub fn sir(epsilon: f64) -> Result<f64> {
    check_probability("epsilon", epsilon)?;
    Ok(1.0 - 2.0 * epsilon * epsilon / (1.0 + epsilon))
}

/// Largest erasure probability at which the dicode erasure channel still
/// supports `rate` under i.i.d. uniform inputs. Inverse of [`sir`].
pub fn shannon_threshold(rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::Domain {
            name: "rate",
            value: rate,
            domain: "(0, 1)",
        });
    }
    let q = 1.0 - rate;
    Ok(0.25 * q + 0.25 * (q * q + 8.0 * q).sqrt())
}

/// Identifies a channel family independent of its erasure probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Dec,
    Bec,
    Custom,
}

/// A family of channels indexed by `epsilon`.
#[derive(Debug, Clone)]
pub enum ChannelFamily {
    /// Dicode erasure channel, no precoding.
    Dec,
    /// Memoryless binary erasure channel, `f = eps`.
    Bec,
    /// Table-sampled monotone transfer function.
    Custom(Arc<TransferTable>),
}

impl ChannelFamily {
    pub fn kind(&self) -> ChannelKind {
        match self {
            ChannelFamily::Dec => ChannelKind::Dec,
            ChannelFamily::Bec => ChannelKind::Bec,
            ChannelFamily::Custom(_) => ChannelKind::Custom,
        }
    }

    /// The member of the family with erasure probability `epsilon`.
    pub fn at(&self, epsilon: f64) -> Result<ChannelModel> {
        check_probability("epsilon", epsilon)?;
        Ok(ChannelModel {
            family: self.clone(),
            epsilon,
        })
    }

    #[inline]
    pub(crate) fn eval(&self, epsilon: f64, x: f64) -> f64 {
        match self {
            ChannelFamily::Dec => dec_transfer_unchecked(epsilon, x),
            ChannelFamily::Bec => epsilon,
            ChannelFamily::Custom(t) => t.eval(epsilon, x),
        }
    }
}

impl From<ChannelKind> for ChannelFamily {
    /// Panics for [`ChannelKind::Custom`], which needs a table.
    fn from(kind: ChannelKind) -> Self {
        match kind {
            ChannelKind::Dec => ChannelFamily::Dec,
            ChannelKind::Bec => ChannelFamily::Bec,
            ChannelKind::Custom => panic!("a custom channel family needs a transfer table"),
        }
    }
}

/// A channel: erasure probability plus extrinsic transfer function.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    family: ChannelFamily,
    epsilon: f64,
}

impl ChannelModel {
    pub fn dec(epsilon: f64) -> Result<Self> {
        ChannelFamily::Dec.at(epsilon)
    }

    pub fn bec(epsilon: f64) -> Result<Self> {
        ChannelFamily::Bec.at(epsilon)
    }

    pub fn custom(table: TransferTable, epsilon: f64) -> Result<Self> {
        ChannelFamily::Custom(Arc::new(table)).at(epsilon)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn kind(&self) -> ChannelKind {
        self.family.kind()
    }

    pub fn family(&self) -> &ChannelFamily {
        &self.family
    }

    /// Same family, different erasure probability.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        self.family.at(epsilon)
    }

    /// `f(epsilon, x)`; `x` is clamped into `[0, 1]`.
    #[inline]
    pub fn transfer(&self, x: f64) -> f64 {
        self.family.eval(self.epsilon, x.clamp(0.0, 1.0))
    }
}

/// One slice of a custom transfer function at a fixed `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferSlice {
    pub epsilon: f64,
    /// Strictly ascending grid in `[0, 1]`.
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl TransferSlice {
    pub fn new(epsilon: f64, xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_probability("epsilon", epsilon)?;
        if xs.is_empty() || xs.len() != values.len() {
            return Err(Error::InvalidTransfer(format!(
                "slice at epsilon {epsilon}: {} grid points but {} values",
                xs.len(),
                values.len()
            )));
        }
        for (k, (&x, &v)) in xs.iter().zip(&values).enumerate() {
            if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidTransfer(format!(
                    "slice at epsilon {epsilon}: row {k} ({x}, {v}) outside [0, 1]"
                )));
            }
        }
        for (k, w) in xs.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::InvalidTransfer(format!(
                    "slice at epsilon {epsilon}: x not strictly ascending at row {}",
                    k + 1
                )));
            }
        }
        for (k, w) in values.windows(2).enumerate() {
            if w[1] < w[0] {
                return Err(Error::InvalidTransfer(format!(
                    "slice at epsilon {epsilon}: f decreases in x at row {}",
                    k + 1
                )));
            }
        }
        Ok(Self { epsilon, xs, values })
    }

    /// Reads a headerless or `x,f_value`-headed two-column CSV.
    pub fn from_csv_reader<R: Read>(epsilon: f64, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::InvalidTransfer(format!(
                    "row {row}: expected 2 columns, found {}",
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(v)) => {
                    xs.push(x);
                    values.push(v);
                }
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::InvalidTransfer(format!(
                        "row {row}: non-numeric entry"
                    )))
                }
            }
        }
        Self::new(epsilon, xs, values)
    }

    pub fn from_csv_path(epsilon: f64, path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(epsilon, file)
    }

    /// Piecewise-linear interpolation, constant beyond the grid ends.
    pub fn eval(&self, x: f64) -> f64 {
        let xs = &self.xs;
        if x <= xs[0] {
            return self.values[0];
        }
        let last = xs.len() - 1;
        if x >= xs[last] {
            return self.values[last];
        }
        let hi = xs.partition_point(|&g| g <= x);
        let lo = hi - 1;
        let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
        self.values[lo] + t * (self.values[hi] - self.values[lo])
    }
}

/// A custom transfer function sampled on a set of `epsilon` slices.
///
/// Evaluation interpolates linearly in `x` within a slice and then linearly
/// in `epsilon` between neighbouring slices; `epsilon` outside the sampled
/// range is clamped to the nearest slice.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferTable {
    slices: Vec<TransferSlice>,
}

impl TransferTable {
    /// Validates that the table is monotone in both arguments.
    pub fn new(mut slices: Vec<TransferSlice>) -> Result<Self> {
        if slices.is_empty() {
            return Err(Error::InvalidTransfer("no slices".into()));
        }
        slices.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
        for pair in slices.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.epsilon == b.epsilon {
                return Err(Error::InvalidTransfer(format!(
                    "duplicate slice at epsilon {}",
                    a.epsilon
                )));
            }
            // Both slices are piecewise linear, so comparing on the union of
            // breakpoints decides pointwise order everywhere.
            for &x in a.xs.iter().chain(&b.xs) {
                if b.eval(x) < a.eval(x) {
                    return Err(Error::InvalidTransfer(format!(
                        "f decreases in epsilon between {} and {} at x = {x}",
                        a.epsilon, b.epsilon
                    )));
                }
            }
        }
        Ok(Self { slices })
    }

    pub fn slices(&self) -> &[TransferSlice] {
        &self.slices
    }

    /// Samples `f` on a uniform grid for each of `epsilons`.
    pub fn sample<F>(epsilons: &[f64], grid_points: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64,
    {
        let n = grid_points.max(2);
        let xs: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let slices = epsilons
            .iter()
            .map(|&e| TransferSlice::new(e, xs.clone(), xs.iter().map(|&x| f(e, x)).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(slices)
    }

    pub fn eval(&self, epsilon: f64, x: f64) -> f64 {
        let s = &self.slices;
        if epsilon <= s[0].epsilon {
            return s[0].eval(x);
        }
        let last = s.len() - 1;
        if epsilon >= s[last].epsilon {
            return s[last].eval(x);
        }
        let hi = s.partition_point(|sl| sl.epsilon <= epsilon);
        let lo = hi - 1;
        let t = (epsilon - s[lo].epsilon) / (s[hi].epsilon - s[lo].epsilon);
        let a = s[lo].eval(x);
        a + t * (s[hi].eval(x) - a)
    }
}

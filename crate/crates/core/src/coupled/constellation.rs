use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-section erasure probabilities `x_{-L}, ..., x_L`. Reads outside
/// `[-L, L]` are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    half_width: u32,
    values: Vec<f64>,
}

impl Constellation {
    pub fn new(half_width: u32, values: Vec<f64>) -> Result<Self> {
        let expected = 2 * half_width as usize + 1;
        if values.len() != expected {
            return Err(Error::InvalidEnsemble(format!(
                "constellation for L = {half_width} needs {expected} entries, got {}",
                values.len()
            )));
        }
        if let Some((k, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain {
                name: "constellation entry",
                value: *v,
                domain: if k == 0 { "[0, 1]" } else { "[0, 1] (section entry)" },
            });
        }
        Ok(Self { half_width, values })
    }

    pub fn constant(half_width: u32, value: f64) -> Result<Self> {
        Self::new(half_width, vec![value; 2 * half_width as usize + 1])
    }

    pub(crate) fn from_raw(half_width: u32, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), 2 * half_width as usize + 1);
        Self { half_width, values }
    }

    pub fn half_width(&self) -> u32 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entry at section `i`, zero outside `[-L, L]`.
    pub fn get(&self, i: i64) -> f64 {
        let l = self.half_width as i64;
        if (-l..=l).contains(&i) {
            self.values[(i + l) as usize]
        } else {
            0.0
        }
    }

    /// Entries in section order `-L..=L`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `(section index, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let l = self.half_width as i64;
        self.values.iter().enumerate().map(move |(p, &v)| (p as i64 - l, v))
    }

    /// Average entry, the entropy of the constellation.
    pub fn entropy(&self) -> f64 {
        entropy(&self.values)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `max_i |x_i - x_{-i}|`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.values.len();
        (0..n / 2)
            .map(|p| (self.values[p] - self.values[n - 1 - p]).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn entropy(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_padding_reads() {
        let c = Constellation::new(1, vec![0.1, 0.2, 0.3]).unwrap();
        assert_eq!(c.get(-1), 0.1);
        assert_eq!(c.get(1), 0.3);
        assert_eq!(c.get(2), 0.0);
        assert_eq!(c.get(-7), 0.0);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(Constellation::constant(3, 1.0).unwrap().entropy(), 1.0);
        assert_eq!(Constellation::constant(3, 0.0).unwrap().entropy(), 0.0);
        let c = Constellation::new(2, vec![1.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((c.entropy() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(Constellation::new(1, vec![0.0, 1.5, 0.0]).is_err());
        assert!(Constellation::new(1, vec![0.0, 0.5]).is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::uncoupled::RegularEnsemble;

/// The `(dl, dr, L, w)` spatially coupled ensemble: `2L + 1` sections of
/// variable nodes, each variable connecting to check positions
/// `[i, i + w - 1]` chosen uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoupledEnsemble {
    base: RegularEnsemble,
    half_width: u32,
    w: u32,
}

impl CoupledEnsemble {
    pub fn new(dl: u32, dr: u32, half_width: u32, w: u32) -> Result<Self> {
        let base = RegularEnsemble::new(dl, dr)?;
        Self::from_base(base, half_width, w)
    }

    pub fn from_base(base: RegularEnsemble, half_width: u32, w: u32) -> Result<Self> {
        if half_width < 1 {
            return Err(Error::InvalidEnsemble("L must be at least 1".into()));
        }
        if w < 1 {
            return Err(Error::InvalidEnsemble("w must be at least 1".into()));
        }
        Ok(Self { base, half_width, w })
    }

    pub fn base(&self) -> RegularEnsemble {
        self.base
    }

    pub fn dl(&self) -> u32 {
        self.base.dl()
    }

    pub fn dr(&self) -> u32 {
        self.base.dr()
    }

    /// `L`: sections are indexed `-L..=L`.
    pub fn half_width(&self) -> u32 {
        self.half_width
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn sections(&self) -> usize {
        2 * self.half_width as usize + 1
    }

    /// Design rate, accounting for the check positions at the boundary that
    /// see only part of the chain. Defined for `w <= 2L`; density evolution
    /// itself accepts any `w`.
    pub fn design_rate(&self) -> Result<f64> {
        if self.w > 2 * self.half_width {
            return Err(Error::InvalidEnsemble(format!(
                "design rate needs w <= 2L, got w = {}, L = {}",
                self.w, self.half_width
            )));
        }
        let ratio = self.dl() as f64 / self.dr() as f64;
        let w = self.w as f64;
        let tail: f64 = (0..=self.w).map(|i| (i as f64 / w).powi(self.dr() as i32)).sum();
        Ok((1.0 - ratio) - ratio * (w + 1.0 - 2.0 * tail) / self.sections() as f64)
    }

    /// Lower bound `dl / dr` on the coupled joint iterative threshold, which
    /// holds as the degrees grow.
    pub fn lemma3_bound(&self) -> f64 {
        self.dl() as f64 / self.dr() as f64
    }
}

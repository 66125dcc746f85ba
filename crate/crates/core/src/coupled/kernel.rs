//! The coupled DE map on raw section slices.
//!
//! Index `p` in a slice of length `n = 2L + 1` is section `p - L`. Entries
//! outside the slice are treated as zero and never read.

use crate::channel::ChannelModel;
use crate::uncoupled::{one_minus_pow, RegularEnsemble};

/// Scratch buffers for repeated parallel-schedule updates.
#[derive(Debug, Clone, Default)]
pub(crate) struct Kernel {
    /// `c[m]`: check-to-variable erasure probability at check position
    /// `m - L`, for `m in 0..n + w - 1`.
    checks: Vec<f64>,
}

impl Kernel {
    /// Writes the parallel-schedule image of `x` into `out`.
    pub(crate) fn update_into(
        &mut self,
        base: &RegularEnsemble,
        w: usize,
        ch: &ChannelModel,
        x: &[f64],
        out: &mut [f64],
    ) {
        let n = x.len();
        debug_assert_eq!(out.len(), n);
        self.fill_checks(base, w, x);
        let inv_w = 1.0 / w as f64;
        for (p, slot) in out.iter_mut().enumerate() {
            let y = self.checks[p..p + w].iter().sum::<f64>() * inv_w;
            *slot = variable_output(base, ch, y);
        }
    }

    /// Writes the averaged check erasure `y_p` seen by every section. The
    /// update of section `p` is `f(y_p^dl) * y_p^(dl - 1)`.
    pub(crate) fn check_averages_into(&mut self, base: &RegularEnsemble, w: usize, x: &[f64], out: &mut Vec<f64>) {
        self.fill_checks(base, w, x);
        let inv_w = 1.0 / w as f64;
        out.clear();
        out.extend((0..x.len()).map(|p| self.checks[p..p + w].iter().sum::<f64>() * inv_w));
    }

    fn fill_checks(&mut self, base: &RegularEnsemble, w: usize, x: &[f64]) {
        let n = x.len();
        let inv_w = 1.0 / w as f64;
        self.checks.clear();
        self.checks.extend((0..n + w - 1).map(|m| {
            let lo = (m + 1).saturating_sub(w);
            let hi = m.min(n - 1);
            let a = x[lo..=hi].iter().sum::<f64>() * inv_w;
            one_minus_pow(a, base.dr() - 1)
        }));
    }
}

/// `f(y^dl) * y^(dl - 1)`.
#[inline]
pub(crate) fn variable_output(base: &RegularEnsemble, ch: &ChannelModel, y: f64) -> f64 {
    let g = y.powi(base.dl() as i32 - 1);
    ch.transfer(g * y) * g
}

/// Averaged check erasure `avg_j (1 - (1 - avg_k x_{p+j-k})^(dr-1))` seen by
/// section `p`, computed from `O(w^2)` neighbours only.
#[inline]
pub(crate) fn section_check_average(base: &RegularEnsemble, w: usize, x: &[f64], p: usize) -> f64 {
    let n = x.len();
    let inv_w = 1.0 / w as f64;
    let mut acc = 0.0;
    for j in 0..w {
        let m = p + j;
        let lo = (m + 1).saturating_sub(w);
        let hi = m.min(n - 1);
        let a = if lo <= hi { x[lo..=hi].iter().sum::<f64>() * inv_w } else { 0.0 };
        acc += one_minus_pow(a, base.dr() - 1);
    }
    acc * inv_w
}

/// Update of a single section from the current constellation.
#[inline]
pub(crate) fn section_update(base: &RegularEnsemble, w: usize, ch: &ChannelModel, x: &[f64], p: usize) -> f64 {
    variable_output(base, ch, section_check_average(base, w, x, p))
}

//! Forward-backward detection on the two-state dicode trellis with erasure
//! messages.
//!
//! A message is either a known bit value or unknown. For bit `k` the
//! forward message is what symbols `y_0..=y_k`, the known start state and
//! the priors of bits `< k` say about `b_k`; the backward message is what
//! `y_{k+1}..`, the known flush bit and the priors of bits `> k` say. The
//! extrinsic output is known iff either side is. On a chain this is exact.

use super::channel::ChannelRealization;
use crate::error::{Error, Result};

/// Merges two pieces of knowledge about the same bit.
#[inline]
fn merge(a: Option<u8>, b: Option<u8>, bit: usize) -> Result<Option<u8>> {
    match (a, b) {
        (Some(u), Some(v)) if u != v => Err(Error::Inconsistent { bit }),
        (Some(u), _) => Ok(Some(u)),
        (None, v) => Ok(v),
    }
}

/// What unerased symbol `y = b_k - b_{k-1}` reveals about `b_k` given
/// knowledge of `b_{k-1}`.
#[inline]
fn forward_through(y: i8, prev: Option<u8>) -> Option<u8> {
    match y {
        1 => Some(1),
        -1 => Some(0),
        _ => prev,
    }
}

/// What unerased symbol `y = b_{k+1} - b_k` reveals about `b_k` given
/// knowledge of `b_{k+1}`.
#[inline]
fn backward_through(y: i8, next: Option<u8>) -> Option<u8> {
    match y {
        1 => Some(0),
        -1 => Some(1),
        _ => next,
    }
}

/// Extrinsic erasure flags (`true` = erased) for one section, given
/// `prior_erased` flags from the code side. Known priors take their value
/// from the transmitted bits.
pub fn detect_section(bits: &[u8], outputs: &[i8], erased: &[bool], prior_erased: &[bool], offset: usize) -> Result<Vec<bool>> {
    let m = bits.len();
    debug_assert_eq!(outputs.len(), m + 1);
    debug_assert_eq!(prior_erased.len(), m);
    let prior = |k: usize| (!prior_erased[k]).then_some(bits[k]);

    let mut from_left = vec![None; m];
    let mut state = Some(0u8);
    for k in 0..m {
        let msg = if erased[k] { None } else { forward_through(outputs[k], state) };
        if !erased[k] && outputs[k] != 0 {
            // A non-zero symbol also pins the previous bit.
            let implied = Some(if outputs[k] == 1 { 0 } else { 1 });
            merge(state, implied, offset + k.saturating_sub(1))?;
        }
        from_left[k] = msg;
        state = merge(msg, prior(k), offset + k)?;
    }

    let mut extrinsic = vec![true; m];
    let mut state = Some(0u8);
    for k in (0..m).rev() {
        let msg = if erased[k + 1] { None } else { backward_through(outputs[k + 1], state) };
        let both = merge(from_left[k], msg, offset + k)?;
        if let Some(v) = both {
            if v != bits[k] {
                return Err(Error::Inconsistent { bit: offset + k });
            }
        }
        extrinsic[k] = both.is_none();
        state = merge(msg, prior(k), offset + k)?;
    }
    Ok(extrinsic)
}

/// One detector pass over every section. `prior_erased` has one flag per
/// bit; the result has one extrinsic erasure flag per bit.
pub fn trellis_detector_pass(realization: &ChannelRealization, prior_erased: &[bool]) -> Result<Vec<bool>> {
    let m = realization.section_len();
    if prior_erased.len() != realization.bits().len() {
        return Err(Error::InvalidSimulation(format!(
            "{} priors for {} bits",
            prior_erased.len(),
            realization.bits().len()
        )));
    }
    let mut out = Vec::with_capacity(prior_erased.len());
    for s in 0..realization.sections() {
        let (bits, outputs, erased) = realization.section(s);
        out.extend(detect_section(bits, outputs, erased, &prior_erased[s * m..(s + 1) * m], s * m)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::channel::{random_bits, simulate_channel};

    #[test]
    fn unerased_channel_reveals_everything() {
        let bits = random_bits(64, 9);
        let r = simulate_channel(&bits, 16, 0.0, 1).unwrap();
        let ext = trellis_detector_pass(&r, &[true; 64]).unwrap();
        assert!(ext.iter().all(|&e| !e));
    }

    #[test]
    fn erased_channel_reveals_nothing() {
        let bits = random_bits(64, 9);
        let r = simulate_channel(&bits, 16, 1.0, 1).unwrap();
        let ext = trellis_detector_pass(&r, &[true; 64]).unwrap();
        assert!(ext.iter().all(|&e| e));
        // Known priors do not leak into their own extrinsic output.
        let ext = trellis_detector_pass(&r, &[false; 64]).unwrap();
        assert!(ext.iter().all(|&e| e));
    }

    #[test]
    fn prior_length_checked() {
        let r = simulate_channel(&[0, 1, 1, 0], 2, 0.5, 1).unwrap();
        assert!(trellis_detector_pass(&r, &[true; 3]).is_err());
    }

    /// Exhaustive oracle: bit `k` is known iff every sequence consistent
    /// with the unerased symbols, the zero boundary bits and the priors of
    /// the other bits agrees on it.
    pub(crate) fn brute_force(bits: &[u8], erased: &[bool], prior_erased: &[bool]) -> Vec<bool> {
        let m = bits.len();
        let outputs = |seq: &[u8], j: usize| -> i8 {
            let cur = if j < m { seq[j] as i8 } else { 0 };
            let prev = if j == 0 { 0 } else { seq[j - 1] as i8 };
            cur - prev
        };
        let consistent: Vec<Vec<u8>> = (0u32..1 << m)
            .map(|mask| (0..m).map(|j| ((mask >> j) & 1) as u8).collect::<Vec<_>>())
            .filter(|seq| (0..=m).all(|j| erased[j] || outputs(seq, j) == outputs(bits, j)))
            .collect();
        (0..m)
            .map(|k| {
                let mut seen = consistent
                    .iter()
                    .filter(|seq| (0..m).all(|j| j == k || prior_erased[j] || seq[j] == bits[j]))
                    .map(|seq| seq[k]);
                let first = seen.next().expect("transmitted sequence is consistent");
                seen.any(|v| v != first)
            })
            .collect()
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn case() -> impl Strategy<Value = (Vec<u8>, Vec<bool>, Vec<bool>)> {
            (1usize..=12).prop_flat_map(|m| {
                (
                    proptest::collection::vec(0u8..2, m),
                    proptest::collection::vec(any::<bool>(), m + 1),
                    proptest::collection::vec(any::<bool>(), m),
                )
            })
        }

        proptest! {
            #[test]
            fn matches_exhaustive_enumeration((bits, erased, prior) in case()) {
                let m = bits.len();
                let r = ChannelRealization::from_parts(m, bits.clone(), erased.clone()).unwrap();
                let ext = trellis_detector_pass(&r, &prior).unwrap();
                prop_assert_eq!(ext, brute_force(&bits, &erased, &prior));
            }
        }
    }

    #[test]
    fn extrinsic_erasure_rate_follows_transfer() {
        use crate::channel::dec_transfer;
        use crate::sim::channel::derive_seed;
        use rand::{Rng, SeedableRng};

        let n = 100_000;
        for &eps in &[0.3, 0.5, 0.7] {
            for &x in &[0.2, 0.5, 0.8] {
                let mut erased = 0usize;
                for seed in 0..3u64 {
                    let bits = random_bits(n, derive_seed(seed, 0));
                    let r = simulate_channel(&bits, n, eps, derive_seed(seed, 1)).unwrap();
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, 2));
                    let prior: Vec<bool> = (0..n).map(|_| rng.random_bool(x)).collect();
                    erased += trellis_detector_pass(&r, &prior).unwrap().iter().filter(|&&e| e).count();
                }
                let rate = erased as f64 / (3 * n) as f64;
                let f = dec_transfer(eps, x).unwrap();
                assert!((rate - f).abs() < 0.01, "eps {eps} x {x}: {rate} vs {f}");
            }
        }
    }
}

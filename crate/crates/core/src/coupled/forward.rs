//! Forward density evolution on the coupled chain under admissible
//! schedules.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::constellation::{entropy, Constellation};
use super::ensemble::CoupledEnsemble;
use super::kernel::{section_update, Kernel};
use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::uncoupled::ZERO_THRESHOLD;

/// Order in which sections are refreshed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Schedule {
    /// Every section from the previous constellation.
    Parallel,
    /// Sections `-L..=L` in order, each seeing the latest values.
    RoundRobin,
    /// Each step refreshes a random subset; every section is picked with
    /// probability one half per step.
    Random { seed: u64 },
}

/// How a forward run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Every section fell below both the tolerance and [`ZERO_THRESHOLD`].
    Zero,
    /// The decoding wave cleared the boundary region and kept moving; the
    /// run will reach zero.
    Wave,
    /// Residual fell below tolerance at a non-zero constellation.
    FixedPoint,
    /// Iteration budget spent.
    Exhausted,
}

impl Outcome {
    /// True when the run ends (or provably will end) at the zero
    /// constellation.
    pub fn decodes(&self) -> bool {
        matches!(self, Outcome::Zero | Outcome::Wave)
    }
}

/// A fixed point (or the last iterate) of coupled DE at channel `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledFixedPoint {
    pub epsilon: f64,
    pub constellation: Constellation,
    /// `max_i |F(x)_i - x_i|` of the returned constellation.
    pub residual: f64,
    pub entropy: f64,
    pub iterations: usize,
    pub outcome: Outcome,
}

/// When a run counts as converged to a non-zero fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopRule {
    /// The sup-change of one step is below `tol`.
    Step,
    /// Additionally, the estimated distance to the fixed point is below
    /// `tol`. Near threshold the contraction is slow and a small step does
    /// not mean a small error.
    #[default]
    Distance,
}

pub const COUPLED_DE_TOL: f64 = 1e-12;
pub const COUPLED_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForwardConfig {
    pub schedule: Schedule,
    pub tol: f64,
    pub max_iter: usize,
    /// Stop early with [`Outcome::Wave`] once the decoding front has moved
    /// this many sections in from both ends. `None` runs to completion.
    pub wave_exit: Option<usize>,
    pub stop: StopRule,
}

impl Default for ForwardConfig {
    fn default() -> Self {
        Self {
            schedule: Schedule::Parallel,
            tol: COUPLED_DE_TOL,
            max_iter: COUPLED_MAX_ITER,
            wave_exit: None,
            stop: StopRule::Distance,
        }
    }
}

impl ForwardConfig {
    /// Configuration used by threshold searches: parallel schedule with
    /// wave detection at [`wave_exit_depth`]. Only the decoding verdict
    /// matters there, so a small step is enough to stop.
    pub fn for_threshold(ens: &CoupledEnsemble) -> Self {
        Self {
            wave_exit: Some(wave_exit_depth(ens)),
            stop: StopRule::Step,
            ..Self::default()
        }
    }
}

/// Depth at which a decoding front is past the reach of the boundary.
///
/// Forward DE is monotone, so a front can never cross a non-zero fixed
/// point lying below the all-ones start. Pinned fronts sit within about one
/// coupling width of the chain ends (at most 6 sections for the rate-2/3
/// ensembles up to w = 9, just above threshold); a front deeper than
/// `2w + 4` is therefore travelling and the run ends at zero.
pub fn wave_exit_depth(ens: &CoupledEnsemble) -> usize {
    2 * ens.w() as usize + 4
}

/// Stateful forward DE iterator starting from the all-ones constellation.
#[derive(Debug, Clone)]
pub struct ForwardDe<'a> {
    ens: &'a CoupledEnsemble,
    ch: &'a ChannelModel,
    schedule: Schedule,
    rng: Option<ChaCha8Rng>,
    kernel: Kernel,
    x: Vec<f64>,
    image: Vec<f64>,
    image2: Vec<f64>,
    steps: usize,
}

impl<'a> ForwardDe<'a> {
    pub fn new(ens: &'a CoupledEnsemble, ch: &'a ChannelModel, schedule: Schedule) -> Self {
        Self::from_values(ens, ch, schedule, vec![1.0; ens.sections()])
    }

    pub(crate) fn from_values(
        ens: &'a CoupledEnsemble,
        ch: &'a ChannelModel,
        schedule: Schedule,
        x: Vec<f64>,
    ) -> Self {
        let rng = match schedule {
            Schedule::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let n = x.len();
        Self {
            ens,
            ch,
            schedule,
            rng,
            kernel: Kernel::default(),
            x,
            image: vec![0.0; n],
            image2: Vec::new(),
            steps: 0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Recomputes `F(x)` and returns `max_i |F(x)_i - x_i|`.
    fn refresh_image(&mut self) -> f64 {
        let w = self.ens.w() as usize;
        self.kernel
            .update_into(&self.ens.base(), w, self.ch, &self.x, &mut self.image);
        sup_distance(&self.x, &self.image)
    }

    /// Estimated sup-distance from `x` to the fixed point it converges to.
    ///
    /// Follows `K` parallel images `y_j = F^j(x)` so that fast modes left
    /// behind by partial schedules die out, then bounds the distance by
    /// `sum_{j<K} |y_{j+1} - y_j| + r_K / (1 - rho)` with `rho` the ratio of
    /// the last two residuals.
    fn distance_estimate(&mut self) -> f64 {
        const K: usize = 16;
        let w = self.ens.w() as usize;
        let base = self.ens.base();
        self.image2.resize(self.x.len(), 0.0);
        let mut cur = self.x.clone();
        let mut walked = 0.0;
        let mut prev = f64::NAN;
        for j in 0..=K {
            self.kernel.update_into(&base, w, self.ch, &cur, &mut self.image2);
            let r = sup_distance(&cur, &self.image2);
            if r == 0.0 {
                return walked;
            }
            if j == K {
                let rho = r / prev;
                return if rho < 1.0 {
                    walked + r / (1.0 - rho)
                } else if r <= ROUNDING_FLOOR {
                    walked + r
                } else {
                    f64::INFINITY
                };
            }
            walked += r;
            prev = r;
            std::mem::swap(&mut cur, &mut self.image2);
        }
        unreachable!()
    }

    /// Applies one schedule step and returns the largest change it made.
    pub fn step(&mut self) -> f64 {
        let change = match self.schedule {
            Schedule::Parallel => {
                let change = self.refresh_image();
                std::mem::swap(&mut self.x, &mut self.image);
                change
            }
            Schedule::RoundRobin => {
                let base = self.ens.base();
                let w = self.ens.w() as usize;
                let mut change: f64 = 0.0;
                for p in 0..self.x.len() {
                    let v = section_update(&base, w, self.ch, &self.x, p);
                    change = change.max((v - self.x[p]).abs());
                    self.x[p] = v;
                }
                change
            }
            Schedule::Random { .. } => {
                self.refresh_image();
                let rng = self.rng.as_mut().expect("random schedule carries an rng");
                let mut change: f64 = 0.0;
                for (x, &v) in self.x.iter_mut().zip(&self.image) {
                    if rng.random::<bool>() {
                        change = change.max((v - *x).abs());
                        *x = v;
                    }
                }
                change
            }
        };
        self.steps += 1;
        change
    }

    /// Sections from each end that have fallen below half the peak value,
    /// taking the smaller of the two sides.
    fn front_depth(&self) -> usize {
        let peak = self.x.iter().copied().fold(0.0, f64::max);
        let cut = 0.5 * peak;
        let left = self.x.iter().take_while(|&&v| v < cut).count();
        let right = self.x.iter().rev().take_while(|&&v| v < cut).count();
        left.min(right)
    }

    /// Runs until the configured stopping rule fires.
    pub fn run(mut self, config: &ForwardConfig) -> CoupledFixedPoint {
        let n = self.x.len();
        let mut outcome = Outcome::Exhausted;
        let wave_limit = config.wave_exit.filter(|&d| 2 * d < n);
        let zero = config.tol.min(ZERO_THRESHOLD);
        while self.steps < config.max_iter {
            let change = self.step();
            if self.x.iter().all(|&v| v < zero) {
                outcome = Outcome::Zero;
                break;
            }
            // For non-parallel schedules a small step does not bound the
            // residual, so confirm against a full image.
            if change < config.tol
                && (self.schedule == Schedule::Parallel || self.refresh_image() < config.tol)
                && (config.stop == StopRule::Step || self.distance_estimate() < config.tol)
            {
                outcome = Outcome::FixedPoint;
                break;
            }
            if let Some(limit) = wave_limit {
                if self.steps.is_multiple_of(64) && self.front_depth() >= limit {
                    outcome = Outcome::Wave;
                    break;
                }
            }
        }
        let residual = self.refresh_image();
        let epsilon = self.ch.epsilon();
        let half_width = self.ens.half_width();
        CoupledFixedPoint {
            epsilon,
            entropy: entropy(&self.x),
            residual,
            iterations: self.steps,
            outcome,
            constellation: Constellation::from_raw(half_width, self.x),
        }
    }
}

/// Residuals this small are rounding noise; the contraction estimate is
/// meaningless below it.
const ROUNDING_FLOOR: f64 = 1e-15;

pub(crate) fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

/// Forward DE from the all-ones constellation.
pub fn forward_de_coupled(
    ens: &CoupledEnsemble,
    ch: &ChannelModel,
    config: &ForwardConfig,
) -> Result<CoupledFixedPoint> {
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(Error::Domain {
            name: "tol",
            value: config.tol,
            domain: "(0, inf)",
        });
    }
    Ok(ForwardDe::new(ens, ch, config.schedule).run(config))
}

//! Lévy paths on a dyadic grid with an explicit jump list.
//!
//! Jump models are sampled jump-first: the jump list on `(0,T]` is drawn
//! without reference to the grid and then binned, so the same seed gives
//! the same jumps at every resolution. Cell indices are computed from
//! `t/T` scaled by a power of two, which is exact in binary floating point
//! and keeps binning consistent across dyadic levels.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};

use crate::error::{invalid, Error, Result};

/// Finest supported grid.
pub const MAX_CELLS: usize = 1 << 20;

/// Default small-jump cutoff for the Gamma subordinator.
pub const DEFAULT_GAMMA_CUTOFF: f64 = 1e-4;

const REPLICA_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of Monte Carlo replica `r` derived from a base seed.
pub fn replica_seed(base_seed: u64, replica: u64) -> u64 {
    base_seed ^ replica.wrapping_mul(REPLICA_STRIDE)
}

/// The generator behind every simulation: ChaCha8 keyed by a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Law of the jump sizes of a compound Poisson process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JumpLaw {
    Constant(f64),
    Exponential { mean: f64 },
    Uniform { low: f64, high: f64 },
}

impl JumpLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            JumpLaw::Constant(c) if c != 0.0 && c.is_finite() => Ok(()),
            JumpLaw::Constant(c) => invalid(format!("constant jump size must be nonzero and finite, got {c}")),
            JumpLaw::Exponential { mean } if mean > 0.0 && mean.is_finite() => Ok(()),
            JumpLaw::Exponential { mean } => invalid(format!("exponential jump mean must be positive, got {mean}")),
            JumpLaw::Uniform { low, high } if low < high && low.is_finite() && high.is_finite() => Ok(()),
            JumpLaw::Uniform { low, high } => {
                invalid(format!("uniform jump law needs low < high, got ({low}, {high})"))
            }
        }
    }

    /// `E[J^n]`.
    pub fn moment(&self, n: usize) -> f64 {
        match *self {
            JumpLaw::Constant(c) => c.powi(n as i32),
            JumpLaw::Exponential { mean } => mean.powi(n as i32) * (1..=n).map(|k| k as f64).product::<f64>(),
            JumpLaw::Uniform { low, high } => {
                let k = n as i32 + 1;
                (high.powi(k) - low.powi(k)) / (k as f64 * (high - low))
            }
        }
    }

    /// True when every jump is strictly positive.
    pub fn is_positive(&self) -> bool {
        match *self {
            JumpLaw::Constant(c) => c > 0.0,
            JumpLaw::Exponential { .. } => true,
            JumpLaw::Uniform { low, .. } => low >= 0.0,
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            JumpLaw::Constant(c) => c,
            JumpLaw::Exponential { mean } => {
                let e: f64 = Exp1.sample(rng);
                mean * e
            }
            JumpLaw::Uniform { low, high } => {
                let mut x = rng.random_range(low..high);
                // a zero jump is not a jump
                while x == 0.0 {
                    x = rng.random_range(low..high);
                }
                x
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelKind {
    Brownian {
        volatility: f64,
        drift: f64,
    },
    CompensatedPoisson {
        intensity: f64,
    },
    CompoundPoisson {
        intensity: f64,
        law: JumpLaw,
        compensated: bool,
    },
    /// Gamma process with unit rate and jumps below `cutoff` discarded.
    GammaSubordinator {
        cutoff: f64,
    },
}

/// A Lévy process family together with the horizon `T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevyModel {
    kind: ModelKind,
    horizon: f64,
}

impl LevyModel {
    pub fn new(kind: ModelKind, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return invalid(format!("horizon must be positive, got {horizon}"));
        }
        match kind {
            ModelKind::Brownian { volatility, drift } => {
                if !(volatility > 0.0 && volatility.is_finite() && drift.is_finite()) {
                    return invalid(format!("Brownian volatility must be positive, got {volatility}"));
                }
            }
            ModelKind::CompensatedPoisson { intensity } => check_intensity(intensity)?,
            ModelKind::CompoundPoisson { intensity, law, .. } => {
                check_intensity(intensity)?;
                law.validate()?;
            }
            ModelKind::GammaSubordinator { cutoff } => {
                if cutoff == 0.0 {
                    return invalid("Gamma subordinator needs a positive small-jump cutoff (infinite activity)");
                }
                if !(cutoff > 0.0 && cutoff < 1.0) {
                    return invalid(format!("Gamma cutoff must lie in (0,1), got {cutoff}"));
                }
            }
        }
        Ok(Self { kind, horizon })
    }

    pub fn brownian(volatility: f64, drift: f64, horizon: f64) -> Result<Self> {
        Self::new(ModelKind::Brownian { volatility, drift }, horizon)
    }

    pub fn compensated_poisson(intensity: f64, horizon: f64) -> Result<Self> {
        Self::new(ModelKind::CompensatedPoisson { intensity }, horizon)
    }

    pub fn compound_poisson(intensity: f64, law: JumpLaw, compensated: bool, horizon: f64) -> Result<Self> {
        Self::new(ModelKind::CompoundPoisson { intensity, law, compensated }, horizon)
    }

    pub fn gamma(cutoff: f64, horizon: f64) -> Result<Self> {
        Self::new(ModelKind::GammaSubordinator { cutoff }, horizon)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Short identifier used in reports.
    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Brownian { .. } => "brownian",
            ModelKind::CompensatedPoisson { .. } => "compensated_poisson",
            ModelKind::CompoundPoisson { .. } => "compound_poisson",
            ModelKind::GammaSubordinator { .. } => "gamma",
        }
    }

    /// Deterministic drift `γ` of the simulated path.
    pub fn drift_rate(&self) -> f64 {
        match self.kind {
            ModelKind::Brownian { drift, .. } => drift,
            ModelKind::CompensatedPoisson { intensity } => -intensity,
            ModelKind::CompoundPoisson { intensity, law, compensated } => {
                if compensated {
                    -intensity * law.moment(1)
                } else {
                    0.0
                }
            }
            ModelKind::GammaSubordinator { .. } => 0.0,
        }
    }

    /// `σ²`, the variance rate of the Gaussian part.
    pub fn gaussian_variance_rate(&self) -> f64 {
        match self.kind {
            ModelKind::Brownian { volatility, .. } => volatility * volatility,
            _ => 0.0,
        }
    }

    /// Increasing paths with no drift: the pathwise jump-measure integrals apply.
    pub fn is_driftless_subordinator(&self) -> bool {
        match self.kind {
            ModelKind::CompoundPoisson { law, compensated, .. } => !compensated && law.is_positive(),
            ModelKind::GammaSubordinator { .. } => true,
            _ => false,
        }
    }

    /// `E[X_T] = 0` (needed for the Itô isometry).
    pub fn is_centered(&self) -> bool {
        self.drift_rate() == 0.0 && matches!(self.kind, ModelKind::Brownian { .. })
            || matches!(self.kind, ModelKind::CompensatedPoisson { .. })
            || matches!(self.kind, ModelKind::CompoundPoisson { compensated: true, .. })
    }

    /// Upper bound on the bias in `K_1` from discarding jumps below the
    /// cutoff: `∫_0^ε x ν(dx) ≤ ε` (zero for finite-activity models).
    pub fn truncation_bias_bound(&self) -> f64 {
        match self.kind {
            ModelKind::GammaSubordinator { cutoff } => cutoff,
            _ => 0.0,
        }
    }
}

fn check_intensity(intensity: f64) -> Result<()> {
    if intensity > 0.0 && intensity.is_finite() {
        Ok(())
    } else {
        invalid(format!("intensity must be positive, got {intensity}"))
    }
}

/// The constants `K_1..K_m`: `K_1 = E[X_1]`, `K_2 = σ² + ∫x²ν(dx)`,
/// `K_n = ∫xⁿν(dx)` for `n ≥ 3`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    model: LevyModel,
    values: Vec<f64>,
}

impl MomentTable {
    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    /// Highest order covered.
    pub fn max_order(&self) -> usize {
        self.values.len()
    }

    /// `K_n`, 1-based.
    pub fn get(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.values.len() {
            return Err(Error::InvalidInput(format!(
                "moment table covers orders 1..={}, K_{n} requested",
                self.values.len()
            )));
        }
        Ok(self.values[n - 1])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Closed-form `K_1..K_m` for the model.
pub fn moments(model: &LevyModel, m: usize) -> Result<MomentTable> {
    if m == 0 {
        return invalid("moment table needs m >= 1");
    }
    let values = (1..=m)
        .map(|n| match model.kind {
            ModelKind::Brownian { volatility, drift } => match n {
                1 => drift,
                2 => volatility * volatility,
                _ => 0.0,
            },
            ModelKind::CompensatedPoisson { intensity } => {
                if n == 1 {
                    0.0
                } else {
                    intensity
                }
            }
            ModelKind::CompoundPoisson { intensity, law, compensated } => {
                if n == 1 && compensated {
                    0.0
                } else {
                    intensity * law.moment(n)
                }
            }
            ModelKind::GammaSubordinator { .. } => (1..n).map(|k| k as f64).product(),
        })
        .collect();
    Ok(MomentTable { model: *model, values })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub time: f64,
    pub size: f64,
}

/// A simulated path: per-cell increments of `X` plus the exact jump list.
#[derive(Clone, Debug, PartialEq)]
pub struct LevyPath {
    horizon: f64,
    base_increments: Vec<f64>,
    gaussian_part: Vec<f64>,
    jumps: Vec<Jump>,
    drift_rate: f64,
    gaussian_variance_rate: f64,
}

fn check_cells(num_cells: usize) -> Result<()> {
    if num_cells == 0 || !num_cells.is_power_of_two() || num_cells > MAX_CELLS {
        return invalid(format!("cell count must be a power of two in 1..={MAX_CELLS}, got {num_cells}"));
    }
    Ok(())
}

/// Cell containing time `t ∈ (0,T]` on a dyadic grid of `num_cells` cells.
pub fn cell_of(time: f64, horizon: f64, num_cells: usize) -> usize {
    let scaled = (time / horizon) * num_cells as f64;
    (scaled.ceil() as usize).clamp(1, num_cells) - 1
}

/// Simulates `model` on `num_cells` dyadic cells; a pure function of its inputs.
pub fn simulate(model: &LevyModel, num_cells: usize, seed: u64) -> Result<LevyPath> {
    check_cells(num_cells)?;
    let mut rng = rng_from_seed(seed);
    let horizon = model.horizon();
    let h = horizon / num_cells as f64;
    let mut gaussian_part = vec![0.0; num_cells];
    let mut jumps = Vec::new();
    match model.kind() {
        ModelKind::Brownian { volatility, .. } => {
            let scale = volatility * h.sqrt();
            for g in gaussian_part.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *g = scale * z;
            }
        }
        ModelKind::CompensatedPoisson { intensity } => {
            jumps = sample_compound(&mut rng, intensity, horizon, |_| 1.0);
        }
        ModelKind::CompoundPoisson { intensity, law, .. } => {
            jumps = sample_compound(&mut rng, intensity, horizon, |r| law.sample(r));
        }
        ModelKind::GammaSubordinator { cutoff } => {
            jumps = sample_gamma_jumps(&mut rng, cutoff, horizon);
        }
    }
    sort_and_separate(&mut jumps);
    Ok(LevyPath::assemble(horizon, gaussian_part, jumps, model.drift_rate(), model.gaussian_variance_rate()))
}

fn poisson_count(rng: &mut impl Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive Poisson mean");
    let k: f64 = d.sample(rng);
    k as usize
}

// uniform on (0, T]
fn jump_time(rng: &mut impl Rng, horizon: f64) -> f64 {
    let u: f64 = rng.random();
    horizon * (1.0 - u)
}

fn sample_compound(
    rng: &mut ChaCha8Rng,
    intensity: f64,
    horizon: f64,
    mut size: impl FnMut(&mut ChaCha8Rng) -> f64,
) -> Vec<Jump> {
    let count = poisson_count(rng, intensity * horizon);
    (0..count)
        .map(|_| {
            let time = jump_time(rng, horizon);
            Jump { time, size: size(rng) }
        })
        .collect()
}

/// Poisson random measure with intensity `e^{-x} x^{-1} dx dt` on
/// `(ε,∞) × (0,T]`, by thinning the dominating measure
/// `x^{-1} 1_{(ε,1]} + e^{-x} 1_{(1,∞)}`.
fn sample_gamma_jumps(rng: &mut ChaCha8Rng, cutoff: f64, horizon: f64) -> Vec<Jump> {
    let log_span = -cutoff.ln();
    let tail_mass = (-1.0f64).exp();
    let total = log_span + tail_mass;
    let candidates = poisson_count(rng, total * horizon);
    let mut jumps = Vec::new();
    for _ in 0..candidates {
        let time = jump_time(rng, horizon);
        let region: f64 = rng.random::<f64>() * total;
        let u: f64 = rng.random();
        let accept: f64 = rng.random();
        let (x, ratio) = if region < log_span {
            // density ∝ 1/x on (ε, 1]
            let x = (cutoff.ln() * u).exp();
            (x, (-x).exp())
        } else {
            let e: f64 = Exp1.sample(rng);
            let x = 1.0 + e;
            (x, 1.0 / x)
        };
        if accept < ratio {
            jumps.push(Jump { time, size: x });
        }
    }
    jumps
}

fn sort_and_separate(jumps: &mut [Jump]) {
    jumps.sort_by(|a, b| a.time.total_cmp(&b.time));
    for i in 1..jumps.len() {
        if jumps[i].time <= jumps[i - 1].time {
            jumps[i].time = jumps[i - 1].time.next_up();
        }
    }
}

impl LevyPath {
    fn assemble(horizon: f64, gaussian_part: Vec<f64>, jumps: Vec<Jump>, drift_rate: f64, variance_rate: f64) -> Self {
        let num_cells = gaussian_part.len();
        let h = horizon / num_cells as f64;
        let mut base: Vec<f64> = gaussian_part.iter().map(|g| drift_rate * h + g).collect();
        for j in &jumps {
            base[cell_of(j.time, horizon, num_cells)] += j.size;
        }
        Self { horizon, base_increments: base, gaussian_part, jumps, drift_rate, gaussian_variance_rate: variance_rate }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn num_cells(&self) -> usize {
        self.base_increments.len()
    }

    /// `log2` of the cell count.
    pub fn depth(&self) -> u32 {
        self.num_cells().trailing_zeros()
    }

    pub fn cell_width(&self) -> f64 {
        self.horizon / self.num_cells() as f64
    }

    pub fn base_increments(&self) -> &[f64] {
        &self.base_increments
    }

    pub fn gaussian_part(&self) -> &[f64] {
        &self.gaussian_part
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn drift_rate(&self) -> f64 {
        self.drift_rate
    }

    pub fn gaussian_variance_rate(&self) -> f64 {
        self.gaussian_variance_rate
    }

    /// Right endpoint of cell `k`.
    pub fn cell_time(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.cell_width()
    }

    pub fn cell_of(&self, time: f64) -> usize {
        cell_of(time, self.horizon, self.num_cells())
    }

    /// Largest violation of `base = drift·h + gaussian + Σ jumps` over cells.
    pub fn consistency_error(&self) -> f64 {
        let h = self.cell_width();
        let mut rebuilt: Vec<f64> = self.gaussian_part.iter().map(|g| self.drift_rate * h + g).collect();
        for j in &self.jumps {
            rebuilt[self.cell_of(j.time)] += j.size;
        }
        rebuilt.iter().zip(&self.base_increments).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Per-cell increments of the variation process `X^(n)`, computed from
    /// the jump list (plus `σ²h` for `n = 2`).
    pub fn variation_increments(&self, n: usize) -> Result<Vec<f64>> {
        match n {
            0 => invalid("variation order must be >= 1"),
            1 => Ok(self.base_increments.clone()),
            _ => {
                let floor = if n == 2 { self.gaussian_variance_rate * self.cell_width() } else { 0.0 };
                let mut out = vec![floor; self.num_cells()];
                for j in &self.jumps {
                    out[self.cell_of(j.time)] += j.size.powi(n as i32);
                }
                Ok(out)
            }
        }
    }

    /// `X^(n)_T`.
    pub fn variation_total(&self, n: usize) -> Result<f64> {
        Ok(self.variation_increments(n)?.iter().sum())
    }

    /// Increments of the Teugels martingale `Y^(n) = X^(n) - K_n t`.
    pub fn teugels_increments(&self, n: usize, moments: &MomentTable) -> Result<Vec<f64>> {
        let k = moments.get(n)?;
        let shift = k * self.cell_width();
        Ok(self.variation_increments(n)?.into_iter().map(|v| v - shift).collect())
    }

    /// Aggregates pairs of neighbouring cells `levels` times.
    pub fn coarsen(&self, levels: u32) -> Result<LevyPath> {
        if levels > self.depth() {
            return invalid(format!("cannot coarsen a grid of depth {} by {levels} levels", self.depth()));
        }
        let factor = 1usize << levels;
        let sum_chunks = |v: &[f64]| v.chunks(factor).map(|c| c.iter().sum()).collect::<Vec<f64>>();
        Ok(LevyPath {
            horizon: self.horizon,
            base_increments: sum_chunks(&self.base_increments),
            gaussian_part: sum_chunks(&self.gaussian_part),
            jumps: self.jumps.clone(),
            drift_rate: self.drift_rate,
            gaussian_variance_rate: self.gaussian_variance_rate,
        })
    }

    /// Coarsens to a grid of `num_cells` cells.
    pub fn coarsen_to(&self, num_cells: usize) -> Result<LevyPath> {
        check_cells(num_cells)?;
        if num_cells > self.num_cells() {
            return invalid(format!("cannot refine a grid of {} cells to {num_cells}", self.num_cells()));
        }
        self.coarsen(self.depth() - num_cells.trailing_zeros())
    }

    /// Plain-text dump: a `grid,T,N` header, `drift,rate` and
    /// `variance,σ²` lines, one `cell,increment` line per cell in order,
    /// one `gauss,value` line per cell for models with a Gaussian part, and
    /// one `jump,time,size` line per jump. Numbers use the shortest
    /// representation that reads back to the same `f64`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "grid,{},{}", self.horizon, self.num_cells());
        let _ = writeln!(out, "drift,{}", self.drift_rate);
        let _ = writeln!(out, "variance,{}", self.gaussian_variance_rate);
        for v in &self.base_increments {
            let _ = writeln!(out, "cell,{v}");
        }
        if self.gaussian_variance_rate > 0.0 {
            for g in &self.gaussian_part {
                let _ = writeln!(out, "gauss,{g}");
            }
        }
        for j in &self.jumps {
            let _ = writeln!(out, "jump,{},{}", j.time, j.size);
        }
        out
    }

    /// Reads the format written by [`LevyPath::dump`].
    pub fn parse_dump(text: &str) -> Result<LevyPath> {
        let mut horizon = None;
        let mut num_cells = 0usize;
        let mut drift = 0.0;
        let mut variance = 0.0;
        let mut base = Vec::new();
        let mut gauss = Vec::new();
        let mut jumps = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let num = |i: usize| -> Result<f64> {
                fields
                    .get(i)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("line {}: bad number in `{line}`", lineno + 1)))
            };
            match (fields[0], fields.len()) {
                ("grid", 3) => {
                    horizon = Some(num(1)?);
                    num_cells = fields[2]
                        .trim()
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("line {}: bad cell count", lineno + 1)))?;
                }
                ("drift", 2) => drift = num(1)?,
                ("variance", 2) => variance = num(1)?,
                ("cell", 2) => base.push(num(1)?),
                ("gauss", 2) => gauss.push(num(1)?),
                ("jump", 3) => jumps.push(Jump { time: num(1)?, size: num(2)? }),
                _ => return invalid(format!("line {}: unrecognised record `{line}`", lineno + 1)),
            }
        }
        let horizon = horizon.ok_or_else(|| Error::InvalidInput("missing grid header".into()))?;
        check_cells(num_cells)?;
        if base.len() != num_cells {
            return invalid(format!("expected {num_cells} cell lines, found {}", base.len()));
        }
        if gauss.is_empty() {
            gauss = vec![0.0; num_cells];
        } else if gauss.len() != num_cells {
            return invalid(format!("expected {num_cells} gauss lines, found {}", gauss.len()));
        }
        if jumps.iter().any(|j| !(j.time > 0.0 && j.time <= horizon) || j.size == 0.0) {
            return invalid("jump outside (0,T] or of size zero");
        }
        if jumps.windows(2).any(|w| w[1].time <= w[0].time) {
            return invalid("jump times must be strictly increasing");
        }
        Ok(LevyPath {
            horizon,
            base_increments: base,
            gaussian_part: gauss,
            jumps,
            drift_rate: drift,
            gaussian_variance_rate: variance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_closed_forms() {
        let g = moments(&LevyModel::gamma(1e-4, 1.0).unwrap(), 4).unwrap();
        assert_eq!(g.values(), &[1.0, 1.0, 2.0, 6.0]);
        let b = moments(&LevyModel::brownian(1.0, 0.0, 1.0).unwrap(), 3).unwrap();
        assert_eq!(b.get(3).unwrap(), 0.0);
        let p = moments(&LevyModel::compensated_poisson(1.0, 1.0).unwrap(), 2).unwrap();
        assert_eq!(p.get(2).unwrap(), 1.0);
        assert_eq!(p.get(1).unwrap(), 0.0);
        assert!(p.get(3).is_err());
        assert!(moments(&LevyModel::gamma(1e-4, 1.0).unwrap(), 0).is_err());
        let cp = LevyModel::compound_poisson(2.0, JumpLaw::Exponential { mean: 0.5 }, false, 1.0).unwrap();
        let k = moments(&cp, 3).unwrap();
        assert!((k.get(1).unwrap() - 1.0).abs() < 1e-15);
        assert!((k.get(3).unwrap() - 2.0 * 0.125 * 6.0).abs() < 1e-15);
        let u = JumpLaw::Uniform { low: 1.0, high: 3.0 };
        assert!((u.moment(2) - 13.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn model_validation() {
        assert!(LevyModel::gamma(0.0, 1.0).is_err());
        assert!(LevyModel::gamma(1.5, 1.0).is_err());
        assert!(LevyModel::brownian(0.0, 0.0, 1.0).is_err());
        assert!(LevyModel::compensated_poisson(-1.0, 1.0).is_err());
        assert!(LevyModel::brownian(1.0, 0.0, 0.0).is_err());
        assert!(LevyModel::compound_poisson(1.0, JumpLaw::Constant(0.0), false, 1.0).is_err());
        assert!(LevyModel::compound_poisson(1.0, JumpLaw::Uniform { low: 2.0, high: 1.0 }, false, 1.0).is_err());
    }

    #[test]
    fn grid_must_be_dyadic() {
        let m = LevyModel::brownian(1.0, 0.0, 1.0).unwrap();
        assert!(simulate(&m, 12, 1).is_err());
        assert!(simulate(&m, 0, 1).is_err());
        assert!(simulate(&m, MAX_CELLS * 2, 1).is_err());
        assert!(simulate(&m, 16, 1).is_ok());
    }

    #[test]
    fn simulation_is_deterministic() {
        let m = LevyModel::brownian(1.0, 0.3, 2.0).unwrap();
        assert_eq!(simulate(&m, 64, 9).unwrap(), simulate(&m, 64, 9).unwrap());
        assert_ne!(simulate(&m, 64, 9).unwrap(), simulate(&m, 64, 10).unwrap());
        let g = LevyModel::gamma(1e-3, 1.0).unwrap();
        assert_eq!(simulate(&g, 64, 3).unwrap(), simulate(&g, 64, 3).unwrap());
    }

    #[test]
    fn paths_are_internally_consistent() {
        let models = [
            LevyModel::brownian(0.7, -0.2, 1.5).unwrap(),
            LevyModel::compensated_poisson(5.0, 1.0).unwrap(),
            LevyModel::compound_poisson(4.0, JumpLaw::Uniform { low: -1.0, high: 2.0 }, true, 1.0).unwrap(),
            LevyModel::gamma(1e-3, 2.0).unwrap(),
        ];
        for m in &models {
            for seed in 0..20 {
                let path = simulate(m, 128, seed).unwrap();
                assert!(path.consistency_error() <= 1e-12, "{}", m.name());
                assert!(path.jumps().windows(2).all(|w| w[0].time < w[1].time));
                assert!(path.jumps().iter().all(|j| j.time > 0.0 && j.time <= m.horizon() && j.size != 0.0));
            }
        }
    }

    #[test]
    fn jump_list_is_grid_independent() {
        let m = LevyModel::compound_poisson(6.0, JumpLaw::Exponential { mean: 1.0 }, false, 1.0).unwrap();
        let fine = simulate(&m, 256, 42).unwrap();
        let coarse = simulate(&m, 32, 42).unwrap();
        assert_eq!(fine.jumps(), coarse.jumps());
        let folded = fine.coarsen_to(32).unwrap();
        for (a, b) in folded.base_increments().iter().zip(coarse.base_increments()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(folded.variation_increments(3).unwrap().len(), 32);
    }

    #[test]
    fn variation_examples() {
        let bm = simulate(&LevyModel::brownian(1.0, 0.0, 1.0).unwrap(), 32, 5).unwrap();
        assert!(bm.variation_increments(3).unwrap().iter().all(|&v| v == 0.0));
        let k = moments(&LevyModel::brownian(1.0, 0.0, 1.0).unwrap(), 2).unwrap();
        assert!(bm.teugels_increments(2, &k).unwrap().iter().all(|&v| v == 0.0));

        let pm = LevyModel::compensated_poisson(3.0, 1.0).unwrap();
        let pp = simulate(&pm, 16, 11).unwrap();
        let mut counts = vec![0.0; 16];
        for j in pp.jumps() {
            counts[pp.cell_of(j.time)] += 1.0;
        }
        for n in 2..5 {
            assert_eq!(pp.variation_increments(n).unwrap(), counts);
        }
        assert!(pp.variation_increments(0).is_err());
    }

    #[test]
    fn single_jump_variation() {
        let text = "grid,1,8\ndrift,0\nvariance,0\n".to_string()
            + &"cell,0\n".repeat(5)
            + "cell,2\n"
            + &"cell,0\n".repeat(2)
            + "jump,0.7,2\n";
        let path = LevyPath::parse_dump(&text).unwrap();
        assert_eq!(path.cell_of(0.7), 5);
        let v = path.variation_increments(3).unwrap();
        assert_eq!(v[5], 8.0);
        assert_eq!(v.iter().sum::<f64>(), 8.0);
    }

    #[test]
    fn teugels_telescopes() {
        let m = LevyModel::gamma(1e-3, 1.0).unwrap();
        let k = moments(&m, 4).unwrap();
        let path = simulate(&m, 64, 8).unwrap();
        for n in 1..=4 {
            let y: f64 = path.teugels_increments(n, &k).unwrap().iter().sum();
            let x = path.variation_total(n).unwrap();
            assert!((y + k.get(n).unwrap() * m.horizon() - x).abs() < 1e-12);
        }
        assert!(path.teugels_increments(5, &k).is_err());
    }

    #[test]
    fn dump_round_trips_exactly() {
        for m in [
            LevyModel::brownian(1.3, 0.1, 1.0).unwrap(),
            LevyModel::compound_poisson(3.0, JumpLaw::Exponential { mean: 0.3 }, true, 2.0).unwrap(),
        ] {
            let path = simulate(&m, 32, 77).unwrap();
            assert_eq!(LevyPath::parse_dump(&path.dump()).unwrap(), path);
        }
        assert!(LevyPath::parse_dump("grid,1,4\ncell,1\n").is_err());
        assert!(LevyPath::parse_dump("bogus\n").is_err());
    }

    #[test]
    fn replica_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|r| replica_seed(7, r)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(replica_seed(7, 0), 7);
    }
}

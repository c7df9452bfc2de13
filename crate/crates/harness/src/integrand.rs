//! Built-in integrands. Each is a tensor power `g^{⊗n}` of a function of
//! one time variable, hence symmetric.

use stratolevy::integrals::{GridFunction, Symmetry};

use crate::error::HarnessError;

#[derive(Clone, Debug, PartialEq)]
pub enum Integrand {
    Constant(f64),
    /// `g(t) = e^{-rate t}`
    ExponentialProduct {
        rate: f64,
    },
    /// `g(t) = 1{low T < t ≤ high T}`
    IndicatorRectangle {
        low: f64,
        high: f64,
    },
    /// `g(t) = Σ_i c_i t^i`
    Polynomial(Vec<f64>),
}

impl Integrand {
    pub(crate) fn from_pairs(
        name: &str,
        value: f64,
        rate: f64,
        low: f64,
        high: f64,
        coefficients: Vec<f64>,
    ) -> Result<Self, HarnessError> {
        match name {
            "constant" => Ok(Integrand::Constant(value)),
            "exponential_product" => Ok(Integrand::ExponentialProduct { rate }),
            "indicator_rectangle" => {
                if !(0.0 <= low && low < high && high <= 1.0) {
                    return Err(HarnessError::Config("indicator bounds need 0 <= low < high <= 1".into()));
                }
                Ok(Integrand::IndicatorRectangle { low, high })
            }
            "polynomial" if !coefficients.is_empty() => Ok(Integrand::Polynomial(coefficients)),
            "polynomial" => Err(HarnessError::Config("polynomial integrand needs coefficients".into())),
            other => Err(HarnessError::Config(format!("unknown integrand `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Integrand::Constant(_) => "constant",
            Integrand::ExponentialProduct { .. } => "exponential_product",
            Integrand::IndicatorRectangle { .. } => "indicator_rectangle",
            Integrand::Polynomial(_) => "polynomial",
        }
    }

    /// The one-variable factor `g(t)` on `[0, horizon]`.
    pub fn factor(&self, t: f64, horizon: f64) -> f64 {
        match self {
            Integrand::Constant(c) => *c,
            Integrand::ExponentialProduct { rate } => (-rate * t).exp(),
            Integrand::IndicatorRectangle { low, high } => {
                if t > low * horizon && t <= high * horizon {
                    1.0
                } else {
                    0.0
                }
            }
            Integrand::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci),
        }
    }

    /// `g` sampled at the right endpoints of `num_cells` cells.
    pub fn samples(&self, num_cells: usize, horizon: f64) -> Vec<f64> {
        let h = horizon / num_cells as f64;
        (0..num_cells).map(|k| self.factor((k + 1) as f64 * h, horizon)).collect()
    }

    /// `g^{⊗n}` on the grid.
    pub fn grid(&self, n: usize, num_cells: usize, horizon: f64) -> Result<GridFunction<f64>, HarnessError> {
        let f = GridFunction::tensor_power(horizon, self.samples(num_cells, horizon), n)?;
        Ok(f.with_symmetry(Symmetry::Yes)?)
    }

    /// `g^{⊗n}` on continuous times.
    pub fn time_fn(&self, horizon: f64) -> impl Fn(&[f64]) -> f64 + '_ {
        move |t: &[f64]| t.iter().map(|&x| self.factor(x, horizon)).product()
    }

    /// `sup_{[0,T]^n} |g^{⊗n}|`, estimated on a fine mesh.
    pub fn sup_abs(&self, n: usize, horizon: f64) -> f64 {
        let sup1 = (0..=4096).map(|k| self.factor(k as f64 * horizon / 4096.0, horizon).abs()).fold(0.0, f64::max);
        sup1.powi(n as i32)
    }
}

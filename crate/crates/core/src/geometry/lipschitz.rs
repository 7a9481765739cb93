use crate::error::{LabError, Result};

/// Interface graph `x_n = psi(x')` over the base interval `(-r, r)`, given by
/// equally spaced samples (odd count, middle sample at `x' = 0`).
///
/// `center` places the graph in the plane: the point `(x', psi(x'))` sits at
/// `center + (x', psi(x'))`. Between samples `psi` is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzGraph {
    r: f64,
    samples: Vec<f64>,
    big_r: f64,
    c0: f64,
    center: (f64, f64),
}

impl LipschitzGraph {
    pub fn new(r: f64, samples: Vec<f64>, big_r: f64, c0: f64, center: (f64, f64)) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(LabError::invalid("psi.r", "must be positive and finite"));
        }
        if !(big_r > 0.0 && big_r.is_finite()) {
            return Err(LabError::invalid("psi.R", "must be positive and finite"));
        }
        if !(c0 > 0.0 && c0 < 1.0) {
            return Err(LabError::invalid("psi.c0", format!("must lie in (0, 1), got {c0}")));
        }
        if !(center.0.is_finite() && center.1.is_finite()) {
            return Err(LabError::invalid("psi.center", "must be finite"));
        }
        let n = samples.len();
        if n < 3 || n.is_multiple_of(2) {
            return Err(LabError::invalid("psi.samples", "need an odd count of at least 3"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(LabError::invalid("psi.samples", "must be finite"));
        }
        if samples[n / 2] != 0.0 {
            return Err(LabError::invalid("psi.samples", "center sample must be 0"));
        }
        let g = LipschitzGraph {
            r,
            samples,
            big_r,
            c0,
            center,
        };
        let bound = g.lipschitz_bound();
        let slack = 1.0 + 1e-12;
        for k in 0..n {
            for l in k + 1..n {
                let rise = (g.samples[l] - g.samples[k]).abs();
                let run = g.sample_x(l) - g.sample_x(k);
                if rise > bound * run * slack {
                    return Err(LabError::invalid(
                        "psi.samples",
                        format!(
                            "slope {} between samples {k} and {l} exceeds c0 R / (4 r) = {bound}",
                            rise / run
                        ),
                    ));
                }
            }
        }
        Ok(g)
    }

    /// The flat graph `psi = 0` with three samples.
    pub fn flat(r: f64, big_r: f64, c0: f64, center: (f64, f64)) -> Result<Self> {
        LipschitzGraph::new(r, vec![0.0; 3], big_r, c0, center)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn big_r(&self) -> f64 {
        self.big_r
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn center(&self) -> (f64, f64) {
        self.center
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Admissible Lipschitz constant `c0 R / (4 r)`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.c0 * self.big_r / (4.0 * self.r)
    }

    fn step(&self) -> f64 {
        2.0 * self.r / (self.samples.len() - 1) as f64
    }

    fn sample_x(&self, k: usize) -> f64 {
        -self.r + k as f64 * self.step()
    }

    /// `psi(x')` for `|x'| <= r`, `None` outside.
    pub fn eval(&self, xp: f64) -> Option<f64> {
        if !(xp.abs() <= self.r) {
            return None;
        }
        let t = (xp + self.r) / self.step();
        let k = (t.floor() as usize).min(self.samples.len() - 2);
        let w = t - k as f64;
        Some(self.samples[k] * (1.0 - w) + self.samples[k + 1] * w)
    }

    pub fn min_value(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

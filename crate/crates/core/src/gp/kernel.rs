use serde::{Deserialize, Serialize};

use super::GpError;

const SQRT5: f64 = 2.236_067_977_499_79;

/// Matérn 5/2 profile as a function of the rescaled distance `r`.
#[inline]
pub fn matern52_profile(r: f64) -> f64 {
    let s = SQRT5 * r;
    (1.0 + s + 5.0 / 3.0 * r * r) * (-s).exp()
}

/// Matérn 5/2 covariance with per-dimension lengthscales and additive
/// observation noise `τ²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matern52 {
    pub amplitude: f64,
    pub lengthscales: Vec<f64>,
    pub noise: f64,
}

impl Matern52 {
    pub fn new(amplitude: f64, lengthscales: Vec<f64>, noise: f64) -> Result<Self, GpError> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(GpError::InvalidKernel(format!("amplitude {amplitude}")));
        }
        if lengthscales.is_empty() || lengthscales.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(GpError::InvalidKernel(format!("lengthscales {lengthscales:?}")));
        }
        if !(noise >= 0.0 && noise.is_finite()) {
            return Err(GpError::InvalidKernel(format!("noise {noise}")));
        }
        Ok(Self {
            amplitude,
            lengthscales,
            noise,
        })
    }

    pub fn isotropic(amplitude: f64, lengthscale: f64, dims: usize, noise: f64) -> Result<Self, GpError> {
        Self::new(amplitude, vec![lengthscale; dims], noise)
    }

    pub fn dims(&self) -> usize {
        self.lengthscales.len()
    }

    /// Euclidean distance after dividing each coordinate by its lengthscale.
    #[inline]
    pub fn scaled_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .zip(&self.lengthscales)
            .map(|((a, b), l)| {
                let d = (a - b) / l;
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Noise-free covariance `k(x, y)`; callers guarantee matching dimensions.
    #[inline]
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.amplitude * matern52_profile(self.scaled_distance(x, y))
    }

    /// Checked variant of [`Matern52::eval`].
    pub fn kernel_eval(&self, x: &[f64], y: &[f64]) -> Result<f64, GpError> {
        if x.len() != self.dims() || y.len() != self.dims() {
            return Err(GpError::DimensionMismatch {
                expected: self.dims(),
                got: if x.len() != self.dims() { x.len() } else { y.len() },
            });
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(GpError::NonFiniteInput);
        }
        Ok(self.eval(x, y))
    }
}

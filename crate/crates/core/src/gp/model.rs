use super::{GpError, Matern52};

/// Jitter levels tried, in order, when `K + τ²I` fails to factorize.
pub const JITTER_LADDER: [f64; 6] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// GP posterior at a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posterior {
    pub mean: f64,
    pub variance: f64,
}

impl Posterior {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// A fitted GP: Cholesky factor of `K + τ²I` and the solve vector
/// `(K + τ²I)⁻¹ (t - offset)`. Immutable once fitted.
#[derive(Debug, Clone)]
pub struct GpModel {
    kernel: Matern52,
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    offset: f64,
    chol: Vec<f64>,
    alpha: Vec<f64>,
    jitter: f64,
}

impl GpModel {
    /// Fits a zero-mean GP.
    pub fn fit(inputs: &[Vec<f64>], targets: &[f64], kernel: &Matern52) -> Result<Self, GpError> {
        Self::fit_with_offset(inputs, targets, kernel, 0.0)
    }

    /// Fits a GP whose prior mean is the empirical mean of the targets.
    pub fn fit_centered(inputs: &[Vec<f64>], targets: &[f64], kernel: &Matern52) -> Result<Self, GpError> {
        let offset = if targets.is_empty() {
            0.0
        } else {
            targets.iter().sum::<f64>() / targets.len() as f64
        };
        Self::fit_with_offset(inputs, targets, kernel, offset)
    }

    fn fit_with_offset(
        inputs: &[Vec<f64>],
        targets: &[f64],
        kernel: &Matern52,
        offset: f64,
    ) -> Result<Self, GpError> {
        let n = inputs.len();
        if n == 0 {
            return Err(GpError::Empty);
        }
        if targets.len() != n {
            return Err(GpError::DimensionMismatch {
                expected: n,
                got: targets.len(),
            });
        }
        for x in inputs {
            if x.len() != kernel.dims() {
                return Err(GpError::DimensionMismatch {
                    expected: kernel.dims(),
                    got: x.len(),
                });
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(GpError::NonFiniteInput);
            }
        }
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(GpError::NonFiniteInput);
        }

        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let k = kernel.eval(&inputs[i], &inputs[j]);
                gram[i * n + j] = k;
                gram[j * n + i] = k;
            }
            gram[i * n + i] += kernel.noise;
        }
        let (chol, jitter) = JITTER_LADDER
            .iter()
            .find_map(|&jitter| cholesky(&gram, n, jitter).map(|l| (l, jitter)))
            .ok_or(GpError::IllConditioned {
                max_jitter: JITTER_LADDER[JITTER_LADDER.len() - 1],
            })?;
        let centered: Vec<f64> = targets.iter().map(|t| t - offset).collect();
        let solve = |b: &[f64]| {
            let mut x = forward_substitute(&chol, n, b);
            back_substitute_transposed(&chol, n, &mut x);
            x
        };
        let mut alpha = solve(&centered);
        // Two rounds of iterative refinement against the jittered Gram
        // matrix recover accuracy lost to conditioning when points cluster.
        for _ in 0..2 {
            let residual: Vec<f64> = (0..n)
                .map(|i| {
                    let row = &gram[i * n..(i + 1) * n];
                    let fitted: f64 = row.iter().zip(&alpha).map(|(k, a)| k * a).sum::<f64>() + jitter * alpha[i];
                    centered[i] - fitted
                })
                .collect();
            for (a, d) in alpha.iter_mut().zip(solve(&residual)) {
                *a += d;
            }
        }
        Ok(Self {
            kernel: kernel.clone(),
            inputs: inputs.to_vec(),
            targets: targets.to_vec(),
            offset,
            chol,
            alpha,
            jitter,
        })
    }

    pub fn kernel(&self) -> &Matern52 {
        &self.kernel
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Prior mean added back to every posterior mean.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// The solve vector `(K + τ²I)⁻¹ (t - offset)`.
    pub fn solve_vector(&self) -> &[f64] {
        &self.alpha
    }

    /// Diagonal jitter that was needed for the factorization.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Refits on the same kernel with the same mean convention.
    pub fn refit(&self, inputs: &[Vec<f64>], targets: &[f64]) -> Result<Self, GpError> {
        if self.offset == 0.0 {
            Self::fit(inputs, targets, &self.kernel)
        } else {
            Self::fit_centered(inputs, targets, &self.kernel)
        }
    }

    /// Posterior of a new observation at `x`: `μ = rᵀ α + offset` and
    /// `σ² = k(x, x) + τ² - rᵀ (K + τ²I)⁻¹ r`, floored at zero.
    pub fn posterior(&self, x: &[f64]) -> Result<Posterior, GpError> {
        if x.len() != self.kernel.dims() {
            return Err(GpError::DimensionMismatch {
                expected: self.kernel.dims(),
                got: x.len(),
            });
        }
        let r: Vec<f64> = self.inputs.iter().map(|xi| self.kernel.eval(xi, x)).collect();
        let mean = self.offset + r.iter().zip(&self.alpha).map(|(a, b)| a * b).sum::<f64>();
        let v = forward_substitute(&self.chol, self.len(), &r);
        let prior = self.kernel.amplitude + self.kernel.noise;
        let variance = (prior - v.iter().map(|a| a * a).sum::<f64>()).max(0.0);
        Ok(Posterior { mean, variance })
    }

    /// Log marginal likelihood of the (centered) targets.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.len();
        let centered = self.targets.iter().map(|t| t - self.offset);
        let fit: f64 = centered.zip(&self.alpha).map(|(t, a)| t * a).sum();
        let log_det: f64 = (0..n).map(|i| self.chol[i * n + i].ln()).sum::<f64>() * 2.0;
        -0.5 * fit - 0.5 * log_det - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln()
    }
}

/// Lower Cholesky factor (row-major) of `a + jitter·I`, or `None` if a pivot
/// is not positive.
fn cholesky(a: &[f64], n: usize, jitter: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            if i == j {
                sum += jitter;
            }
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(sum > 0.0) {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Solves `L y = b`.
fn forward_substitute(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * y[k];
        }
        y[i] = sum / l[i * n + i];
    }
    y
}

/// Solves `Lᵀ x = y` in place.
fn back_substitute_transposed(l: &[f64], n: usize, y: &mut [f64]) {
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[k * n + i] * y[k];
        }
        y[i] = sum / l[i * n + i];
    }
}

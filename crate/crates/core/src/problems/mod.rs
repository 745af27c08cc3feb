//! Synthetic test problems, the noise model and assumption diagnostics.

mod blur;
mod diagnostics;
mod source;
mod tomography;

pub use blur::{
    gaussian_blur_1d, gaussian_blur_2d, gaussian_taps, motion_blur_2d, motion_taps, Convolution1d,
    Separable2d,
};
pub use diagnostics::{assumption_diagnostics, DiagnosticReport, RangeProjector};
pub use source::{make_source_solution, SourceCondition};
pub use tomography::{default_rays, ray_weights, tomography_parallel, ParallelTomography};

use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::operator::{to_dense, LinearOperator};
use crate::rng::{Stream, NOISE_STREAM};
use crate::vector::{norm, scale};

/// How a convolution treats pixels outside the signal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Boundary {
    /// Outside values are zero.
    #[default]
    Zero,
    /// Outside values mirror the signal (half-sample symmetric).
    Reflexive,
}

impl Boundary {
    pub fn token(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::Reflexive => "reflexive",
        }
    }

    pub fn from_token(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Self::Zero),
            "reflexive" => Ok(Self::Reflexive),
            other => Err(Error::InvalidArgument(format!(
                "unknown boundary '{other}' (expected zero or reflexive)"
            ))),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

/// Adds white Gaussian noise of relative size `xi`.
///
/// Draws `e` from the noise stream of `seed` and returns
/// `(y + xi ||y|| e / ||e||, xi ||y||)`.
pub fn add_noise(y: &[f64], xi: f64, seed: u64) -> Result<(Vec<f64>, f64)> {
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise level must be nonnegative, got {xi}"
        )));
    }
    if xi == 0.0 {
        return Ok((y.to_vec(), 0.0));
    }
    let ny = norm(y);
    if ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    let delta = xi * ny;
    let mut e = Stream::new(seed, NOISE_STREAM).normal_vec(y.len());
    let ne = norm(&e);
    scale(delta / ne, &mut e);
    Ok((y.iter().zip(&e).map(|(a, b)| a + b).collect(), delta))
}

/// Piecewise-constant `n x n` test image on a 0.3 background: a rectangle,
/// two overlapping disks and a thin bar. Row `r`, column `c` sits at
/// `(x, y) = (c / n, r / n)`.
pub fn phantom_image(n: usize) -> Vec<f64> {
    let mut img = vec![0.3; n * n];
    for r in 0..n {
        let y = r as f64 / n as f64;
        for c in 0..n {
            let x = c as f64 / n as f64;
            let p = &mut img[r * n + c];
            if x > 0.15 && x < 0.45 && y > 0.2 && y < 0.7 {
                *p = 0.8;
            }
            if (x - 0.68).powi(2) + (y - 0.35).powi(2) < 0.15 * 0.15 {
                *p = 1.0;
            }
            if (x - 0.6).powi(2) + (y - 0.75).powi(2) < 0.1 * 0.1 {
                *p += 0.5;
            }
            if x > 0.3 && x < 0.85 && y > 0.85 && y < 0.92 {
                *p = 0.6;
            }
        }
    }
    img
}

/// An operator with a known exact solution and noisy data.
#[derive(Clone)]
pub struct TestProblem {
    pub op: Arc<dyn LinearOperator>,
    pub x_dagger: Vec<f64>,
    pub y_clean: Vec<f64>,
    pub y_delta: Vec<f64>,
    pub xi: f64,
    /// `||y_delta - y_clean||`, equal to `xi ||y_clean||`.
    pub delta: f64,
    pub seed: u64,
    pub metadata: String,
    /// `(rows, cols)` when the unknown is an image.
    pub image_shape: Option<(usize, usize)>,
}

impl std::fmt::Debug for TestProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestProblem")
            .field("op", &self.op.label())
            .field("xi", &self.xi)
            .field("delta", &self.delta)
            .field("seed", &self.seed)
            .field("metadata", &self.metadata)
            .finish_non_exhaustive()
    }
}

impl TestProblem {
    pub fn from_parts(
        op: Arc<dyn LinearOperator>,
        x_dagger: Vec<f64>,
        xi: f64,
        seed: u64,
        metadata: impl Into<String>,
    ) -> Result<Self> {
        let y_clean = op.apply(&x_dagger)?;
        let (y_delta, delta) = add_noise(&y_clean, xi, seed)?;
        Ok(Self {
            op,
            x_dagger,
            y_clean,
            y_delta,
            xi,
            delta,
            seed,
            metadata: metadata.into(),
            image_shape: None,
        })
    }

    pub fn with_image_shape(mut self, rows: usize, cols: usize) -> Self {
        self.image_shape = Some((rows, cols));
        self
    }

    pub fn is_square(&self) -> bool {
        self.op.is_square()
    }

    /// 1D Gaussian blur with a source-condition solution `(T^T T)^nu w`,
    /// `||w|| = 1`.
    pub fn blur_1d(n: usize, gamma: f64, boundary: Boundary, nu: f64, xi: f64, seed: u64) -> Result<Self> {
        let op = gaussian_blur_1d(n, gamma, boundary)?;
        let (_, x) = make_source_solution(&op, nu, seed, 1.0)?;
        let meta = format!("{}; source nu={nu}; xi={xi}; seed={seed}", op.label());
        Self::from_parts(Arc::new(op), x, xi, seed, meta)
    }

    /// 2D Gaussian blur of [`phantom_image`].
    pub fn blur_2d(n: usize, gamma: f64, boundary: Boundary, xi: f64, seed: u64) -> Result<Self> {
        let op = gaussian_blur_2d(n, gamma, boundary)?;
        let meta = format!("{}; phantom; xi={xi}; seed={seed}", op.label());
        Ok(Self::from_parts(Arc::new(op), phantom_image(n), xi, seed, meta)?.with_image_shape(n, n))
    }

    /// Nonsymmetric motion-type blur of [`phantom_image`].
    pub fn motion_blur(n: usize, len: usize, gamma: f64, xi: f64, seed: u64) -> Result<Self> {
        let op = motion_blur_2d(n, len, gamma)?;
        let meta = format!("{}; phantom; xi={xi}; seed={seed}", op.label());
        Ok(Self::from_parts(Arc::new(op), phantom_image(n), xi, seed, meta)?.with_image_shape(n, n))
    }

    /// Parallel-beam projections of [`phantom_image`].
    pub fn tomography(n: usize, n_angles: usize, rays: Option<usize>, xi: f64, seed: u64) -> Result<Self> {
        let op = tomography_parallel(n, n_angles, rays)?;
        let meta = format!("{}; phantom; xi={xi}; seed={seed}", op.label());
        Ok(Self::from_parts(Arc::new(op), phantom_image(n), xi, seed, meta)?.with_image_shape(n, n))
    }

    /// Writes `x_dagger.mtx`, `y_clean.mtx`, `y_delta.mtx` and, when the
    /// operator has at most `max_dense_entries` entries, `operator.mtx`.
    pub fn export(&self, dir: &Path, max_dense_entries: usize) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        crate::io::write_vector_file(&dir.join("x_dagger.mtx"), &self.x_dagger)?;
        crate::io::write_vector_file(&dir.join("y_clean.mtx"), &self.y_clean)?;
        crate::io::write_vector_file(&dir.join("y_delta.mtx"), &self.y_delta)?;
        if self.op.n_rows().saturating_mul(self.op.n_cols()) <= max_dense_entries {
            crate::io::write_matrix_file(&dir.join("operator.mtx"), &to_dense(self.op.as_ref()))?;
        }
        Ok(())
    }
}

use crate::error::{Error, Result};
use crate::operator::LinearOperator;

/// Parallel-beam projection of an `n x n` image on the unit square.
///
/// Pixel `(r, c)` (stored at `r * n + c`) covers
/// `[c/n, (c+1)/n] x [r/n, (r+1)/n]`. Angle `k` is `theta_k = k pi / n_angles`;
/// ray `j` at that angle runs along `(cos theta, sin theta)` at signed
/// distance `s_j = sqrt(2) ((j + 1/2) / rays - 1/2)` from the centre of the
/// square, so the offsets span its diagonal. Entries are exact intersection
/// lengths, stored as compressed rows.
#[derive(Clone, Debug)]
pub struct ParallelTomography {
    n: usize,
    n_angles: usize,
    rays: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

/// Intersection lengths of the line `origin + t * direction` (unit
/// `direction`) with the pixels of an `n x n` grid on the unit square, in
/// order of traversal.
pub fn ray_weights(n: usize, origin: [f64; 2], direction: [f64; 2]) -> Vec<(usize, f64)> {
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for a in 0..2 {
        if direction[a].abs() < 1e-15 {
            if origin[a] < 0.0 || origin[a] > 1.0 {
                return Vec::new();
            }
        } else {
            let t0 = (0.0 - origin[a]) / direction[a];
            let t1 = (1.0 - origin[a]) / direction[a];
            t_lo = t_lo.max(t0.min(t1));
            t_hi = t_hi.min(t0.max(t1));
        }
    }
    if !(t_hi > t_lo) {
        return Vec::new();
    }
    let mut ts = vec![t_lo, t_hi];
    for a in 0..2 {
        if direction[a].abs() < 1e-15 {
            continue;
        }
        for k in 1..n {
            let t = (k as f64 / n as f64 - origin[a]) / direction[a];
            if t > t_lo && t < t_hi {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);

    let mut out: Vec<(usize, f64)> = Vec::new();
    for w in ts.windows(2) {
        let len = w[1] - w[0];
        if len <= 1e-14 {
            continue;
        }
        let tm = 0.5 * (w[0] + w[1]);
        let x = origin[0] + tm * direction[0];
        let y = origin[1] + tm * direction[1];
        let c = ((x * n as f64).floor() as isize).clamp(0, n as isize - 1) as usize;
        let r = ((y * n as f64).floor() as isize).clamp(0, n as isize - 1) as usize;
        let idx = r * n + c;
        match out.last_mut() {
            Some((last, l)) if *last == idx => *l += len,
            _ => out.push((idx, len)),
        }
    }
    out
}

/// `floor(n sqrt(2))`, the default number of rays per angle.
pub fn default_rays(n: usize) -> usize {
    (n as f64 * std::f64::consts::SQRT_2).floor() as usize
}

impl ParallelTomography {
    pub fn new(n: usize, n_angles: usize, rays: usize) -> Result<Self> {
        if n == 0 || n_angles == 0 || rays == 0 {
            return Err(Error::InvalidArgument(format!(
                "tomography needs positive sizes (n={n}, angles={n_angles}, rays={rays})"
            )));
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for k in 0..n_angles {
            let theta = k as f64 * std::f64::consts::PI / n_angles as f64;
            let (s, c) = theta.sin_cos();
            let dir = [c, s];
            let normal = [-s, c];
            for j in 0..rays {
                let off = std::f64::consts::SQRT_2 * ((j as f64 + 0.5) / rays as f64 - 0.5);
                let origin = [0.5 + off * normal[0], 0.5 + off * normal[1]];
                for (idx, w) in ray_weights(n, origin, dir) {
                    cols.push(idx);
                    vals.push(w);
                }
                row_ptr.push(cols.len());
            }
        }
        Ok(Self {
            n,
            n_angles,
            rays,
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(index, weight)` entries of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }
}

impl LinearOperator for ParallelTomography {
    fn n_rows(&self) -> usize {
        self.n_angles * self.rays
    }
    fn n_cols(&self) -> usize {
        self.n * self.n
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).fold(0.0, |acc, (c, w)| acc + w * x[c]);
        }
    }
    fn apply_adjoint_into(&self, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (r, ur) in u.iter().enumerate() {
            for (c, w) in self.row(r) {
                out[c] += w * ur;
            }
        }
    }
    fn label(&self) -> String {
        format!(
            "tomography_parallel(n={}, angles={}, rays={})",
            self.n, self.n_angles, self.rays
        )
    }
}

/// Parallel-beam tomography operator; `rays_per_angle = None` uses
/// [`default_rays`].
pub fn tomography_parallel(
    n: usize,
    n_angles: usize,
    rays_per_angle: Option<usize>,
) -> Result<ParallelTomography> {
    ParallelTomography::new(n, n_angles, rays_per_angle.unwrap_or_else(|| default_rays(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::adjoint_mismatch;

    #[test]
    fn single_pixel() {
        let w = ray_weights(1, [0.0, 0.5], [1.0, 0.0]);
        assert_eq!(w.len(), 1);
        assert!((w[0].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn horizontal_ray_crosses_one_row() {
        let n = 8;
        let w = ray_weights(n, [0.0, 2.5 / n as f64], [1.0, 0.0]);
        assert_eq!(w.len(), n);
        assert!(w.iter().all(|(idx, _)| idx / n == 2));
        assert!((w.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_ray_length() {
        let w = ray_weights(5, [0.0, 0.0], [std::f64::consts::FRAC_1_SQRT_2; 2]);
        let total: f64 = w.iter().map(|p| p.1).sum();
        assert!((total - std::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn missing_ray_is_empty() {
        assert!(ray_weights(4, [0.0, 1.5], [1.0, 0.0]).is_empty());
    }

    #[test]
    fn small_operator_properties() {
        let t = tomography_parallel(8, 12, Some(11)).unwrap();
        assert_eq!((t.n_rows(), t.n_cols()), (132, 64));
        assert!(adjoint_mismatch(&t, 30, 1) < 1e-10);
        assert!(t.vals.iter().all(|v| *v > 0.0));
        assert_eq!(default_rays(32), 45);
    }
}

use super::{reference_norm, validate, Breakdown, KrylovDecomposition, KrylovOptions, Reorthogonalization};
use crate::error::{Error, Result};
use crate::operator::{DenseMatrix, LinearOperator};
use crate::vector::{axpy, dot, norm, scale};

/// Arnoldi decomposition `T V_l = V_{l+1} H` of a square operator.
#[derive(Clone, Debug)]
pub struct ArnoldiDecomposition {
    /// `l_eff + 1` orthonormal columns (`l_eff` after a terminal breakdown).
    pub v: Vec<Vec<f64>>,
    /// Upper Hessenberg, `(l_eff + 1) x l_eff` or square after breakdown.
    pub h: DenseMatrix,
    pub ell_requested: usize,
    pub breakdown: Option<Breakdown>,
    pub norm_estimate: f64,
    ell_eff: usize,
}

impl ArnoldiDecomposition {
    pub fn truncated(&self, ell: usize) -> Result<Self> {
        if ell == 0 || ell > self.ell_eff {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate a decomposition of dimension {} to {ell}",
                self.ell_eff
            )));
        }
        if ell == self.ell_eff {
            let mut out = self.clone();
            out.ell_requested = ell;
            return Ok(out);
        }
        Ok(Self {
            v: self.v[..ell + 1].to_vec(),
            h: self.h.leading(ell + 1, ell),
            ell_requested: ell,
            breakdown: None,
            norm_estimate: self.norm_estimate,
            ell_eff: ell,
        })
    }
}

impl KrylovDecomposition for ArnoldiDecomposition {
    fn projected(&self) -> &DenseMatrix {
        &self.h
    }
    fn left_basis(&self) -> &[Vec<f64>] {
        &self.v
    }
    fn right_basis(&self) -> &[Vec<f64>] {
        &self.v[..self.ell_eff]
    }
    fn ell_requested(&self) -> usize {
        self.ell_requested
    }
    fn breakdown(&self) -> Option<Breakdown> {
        self.breakdown
    }
    fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }
}

/// Runs `ell` steps of the Arnoldi process with modified Gram-Schmidt
/// started from `y`.
///
/// [`Reorthogonalization::Full`] repeats the Gram-Schmidt pass once. A
/// vanishing subdiagonal entry stops the run with a square `H`.
pub fn arnoldi_decompose(
    op: &dyn LinearOperator,
    y: &[f64],
    ell: usize,
    opts: &KrylovOptions,
) -> Result<ArnoldiDecomposition> {
    if !op.is_square() {
        return Err(Error::NonSquare {
            context: "arnoldi_decompose",
            rows: op.n_rows(),
            cols: op.n_cols(),
        });
    }
    let beta = validate(op, y, ell)?;
    let passes = if opts.reorth == Reorthogonalization::Full {
        2
    } else {
        1
    };
    let mut t_norm = reference_norm(op, opts);

    let mut v0 = y.to_vec();
    scale(1.0 / beta, &mut v0);
    let mut v = vec![v0];
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(ell);
    let mut breakdown = None;

    let mut w = vec![0.0; op.n_rows()];
    for k in 1..=ell {
        op.apply_into(&v[k - 1], &mut w);
        let mut h = vec![0.0; k + 1];
        for _ in 0..passes {
            for (j, vj) in v.iter().enumerate() {
                let c = dot(vj, &w);
                axpy(-c, vj, &mut w);
                h[j] += c;
            }
        }
        let sub = norm(&w);
        let col_norm = norm(&h[..k]).hypot(sub);
        t_norm = t_norm.max(col_norm);
        if sub <= opts.breakdown_tol * t_norm || !sub.is_finite() {
            if k == 1 && col_norm <= opts.breakdown_tol * t_norm {
                return Err(Error::TrivialKrylovSpace);
            }
            h[k] = 0.0;
            breakdown = Some(Breakdown { step: k, value: sub });
            cols.push(h);
            break;
        }
        h[k] = sub;
        cols.push(h);
        scale(1.0 / sub, &mut w);
        v.push(w.clone());
    }

    let ell_eff = cols.len();
    let rows = if breakdown.is_some() { ell_eff } else { ell_eff + 1 };
    let mut hm = DenseMatrix::zeros(rows, ell_eff);
    for (j, c) in cols.iter().enumerate() {
        for (i, val) in c.iter().enumerate().take(rows) {
            hm[(i, j)] = *val;
        }
    }
    Ok(ArnoldiDecomposition {
        v,
        h: hm,
        ell_requested: ell,
        breakdown,
        norm_estimate: t_norm,
        ell_eff,
    })
}

//! Objective derivatives and the equality-constrained Newton step.

use crate::distributions::SimplexPoint;
use crate::error::{Error, Result};
use crate::special::{digamma_unchecked, trigamma_unchecked};

/// Gradient and Hessian of f(a) = −ln Dirichlet(c | a).
///
/// g_i = ψ(a_i) − ψ(s) − ln c_i and H_ij = ψ′(a_i)·1(i=j) − ψ′(s), s = Σ a_i.
pub fn neg_log_density_gradient_hessian(c: &SimplexPoint, a: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let ln_c: Vec<f64> = c.as_slice().iter().map(|x| x.ln()).collect();
    gradient_hessian(&ln_c, a)
}

pub(crate) fn gradient_hessian(ln_c: &[f64], a: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let s: f64 = a.iter().sum();
    let psi_s = digamma_unchecked(s);
    let tri_s = trigamma_unchecked(s);
    let g = a.iter().zip(ln_c).map(|(&ai, &lc)| digamma_unchecked(ai) - psi_s - lc).collect();
    let k = a.len();
    let mut h = vec![vec![-tri_s; k]; k];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] += trigamma_unchecked(a[i]);
    }
    (g, h)
}

/// Solves `[H Jᵀ; J 0] [δ; λ] = [−g; −h]` by dense LU with partial pivoting
/// and one round of iterative refinement.
pub fn newton_eq_step(g: &[f64], hessian: &[Vec<f64>], jacobian: &[f64], h: f64) -> Result<(Vec<f64>, f64)> {
    let k = g.len();
    if hessian.len() != k || jacobian.len() != k || hessian.iter().any(|r| r.len() != k) {
        return Err(Error::DimensionMismatch { expected: k, got: jacobian.len() });
    }
    let n = k + 1;
    let mut m = vec![0.0; n * n];
    for i in 0..k {
        m[i * n..i * n + k].copy_from_slice(&hessian[i]);
        m[i * n + k] = jacobian[i];
        m[k * n + i] = jacobian[i];
    }
    let mut rhs: Vec<f64> = g.iter().map(|x| -x).collect();
    rhs.push(-h);

    let lu = Lu::factor(m.clone(), n)?;
    let mut sol = lu.solve(&rhs);
    // refinement: sol += LU⁻¹ (rhs − M sol)
    let resid: Vec<f64> = (0..n).map(|i| rhs[i] - (0..n).map(|j| m[i * n + j] * sol[j]).sum::<f64>()).collect();
    let corr = lu.solve(&resid);
    for (s, c) in sol.iter_mut().zip(corr) {
        *s += c;
    }
    if sol.iter().any(|x| !x.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let lambda = sol.pop().expect("n >= 1");
    Ok((sol, lambda))
}

struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mut a: Vec<f64>, n: usize) -> Result<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::SingularSystem);
        }
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
                .expect("nonempty range");
            let pivot = a[pivot_row * n + col];
            if pivot.abs() <= scale * 1e-300 || !pivot.is_finite() {
                return Err(Error::SingularSystem);
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                }
                perm.swap(col, pivot_row);
            }
            for i in col + 1..n {
                let factor = a[i * n + col] / pivot;
                a[i * n + col] = factor;
                for j in col + 1..n {
                    a[i * n + j] -= factor * a[col * n + j];
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[i * n + j] * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

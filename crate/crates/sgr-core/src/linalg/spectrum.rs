//! Extreme-eigenvalue estimation: condition numbers of SPD operators and the
//! step-size bound `eta < min 2 Re(lambda) / |lambda|^2` for the residual
//! iteration.
//!
//! Small operators (up to a dense cap) are handled exactly through
//! [`dense_eig`]. Above the cap, a Lanczos iteration with full
//! reorthogonalization estimates the extreme eigenvalues of the symmetric
//! part and a power iteration estimates the spectral radius; the resulting
//! bound `2 lambda_min(sym) / rho^2` under-estimates the true threshold, so
//! the fallback is conservative.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eig::{dense_eig_with_cap, sym_tridiag_eigenvalues, DEFAULT_DENSE_CAP};
use super::{LinalgError, SparseMatrix};
use crate::math::{abs, axpy, copysign, dot, norm2, scale, sqrt};

/// Extreme-eigenvalue summary of a square operator together with the largest
/// stable step size for the residual iteration `q <- q - eta (A q - b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    /// Smallest eigenvalue real part (or its certified estimate).
    pub lambda_min_real: f64,
    /// Largest eigenvalue real part (or its estimate).
    pub lambda_max_real: f64,
    /// Largest eigenvalue modulus (or its estimate).
    pub lambda_max_modulus: f64,
    /// `min over the spectrum of 2 Re(lambda) / |lambda|^2`.
    pub eta_max: f64,
}

/// Failure modes of [`condition_number_spd`].
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionEstimateError {
    /// The iteration cap was reached before the requested accuracy; the best
    /// available estimate is carried for diagnostics.
    DidNotConverge { best_estimate: f64, iterations: usize },
    /// The smallest Ritz value is non-positive, contradicting the SPD
    /// assumption.
    NotPositiveDefinite { lambda_min: f64 },
    /// Structural problem with the input matrix.
    Structure(LinalgError),
}

impl fmt::Display for ConditionEstimateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionEstimateError::DidNotConverge {
                best_estimate,
                iterations,
            } => write!(
                f,
                "condition number estimate did not converge after {iterations} iterations \
                 (best estimate {best_estimate})"
            ),
            ConditionEstimateError::NotPositiveDefinite { lambda_min } => {
                write!(f, "operator not positive definite: lambda_min {lambda_min}")
            }
            ConditionEstimateError::Structure(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ConditionEstimateError {}

/// `kappa(A) = lambda_max / lambda_min` of a symmetric positive definite
/// operator (caller-asserted), to relative accuracy `tol`, by a Lanczos
/// iteration with full reorthogonalization capped at `10 n` steps.
pub fn condition_number_spd(a: &SparseMatrix, tol: f64) -> Result<f64, ConditionEstimateError> {
    if a.nrows() != a.ncols() {
        return Err(ConditionEstimateError::Structure(
            LinalgError::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            },
        ));
    }
    let n = a.nrows();
    if n == 0 {
        return Err(ConditionEstimateError::Structure(
            LinalgError::InvalidStructure(alloc::string::String::from("empty matrix")),
        ));
    }
    if n == 1 {
        let v = a.get(0, 0);
        if v <= 0.0 {
            return Err(ConditionEstimateError::NotPositiveDefinite { lambda_min: v });
        }
        return Ok(1.0);
    }
    let out = lanczos_extremes(|x| a.matvec(x).expect("conforming dims"), n, tol, 10 * n, 0x51ED);
    if out.theta_min <= 0.0 {
        return Err(ConditionEstimateError::NotPositiveDefinite {
            lambda_min: out.theta_min,
        });
    }
    let estimate = out.theta_max / out.theta_min;
    if !out.converged {
        return Err(ConditionEstimateError::DidNotConverge {
            best_estimate: estimate,
            iterations: out.iterations,
        });
    }
    Ok(estimate)
}

/// Largest stable step size for the residual iteration on `A`, per
/// `eta_max = min 2 Re(lambda) / |lambda|^2` over the spectrum.
///
/// Uses a dense eigendecomposition for orders up to [`DEFAULT_DENSE_CAP`];
/// see [`eta_max_bound_with_cap`] to raise the cap or force the estimate
/// path. Errors with [`LinalgError::NotPositiveDefinite`] when an eigenvalue
/// real part is non-positive (the iteration cannot converge there).
pub fn eta_max_bound(a: &SparseMatrix) -> Result<Spectrum, LinalgError> {
    eta_max_bound_with_cap(a, DEFAULT_DENSE_CAP)
}

/// [`eta_max_bound`] with an explicit dense cap.
pub fn eta_max_bound_with_cap(a: &SparseMatrix, dense_cap: usize) -> Result<Spectrum, LinalgError> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let n = a.nrows();
    if n <= dense_cap {
        let eig = dense_eig_with_cap(&a.to_dense(), dense_cap)?;
        let mut lambda_min_real = f64::INFINITY;
        let mut lambda_max_real = f64::NEG_INFINITY;
        let mut lambda_max_modulus = 0.0_f64;
        let mut eta_max = f64::INFINITY;
        for ev in &eig {
            if ev.re <= 0.0 {
                return Err(LinalgError::NotPositiveDefinite { lambda_re: ev.re });
            }
            let modulus_sq = ev.re * ev.re + ev.im * ev.im;
            lambda_min_real = lambda_min_real.min(ev.re);
            lambda_max_real = lambda_max_real.max(ev.re);
            lambda_max_modulus = lambda_max_modulus.max(sqrt(modulus_sq));
            eta_max = eta_max.min(2.0 * ev.re / modulus_sq);
        }
        Ok(Spectrum {
            lambda_min_real,
            lambda_max_real,
            lambda_max_modulus,
            eta_max,
        })
    } else {
        // Estimate path. Bendixson: Re(lambda) lies between the extreme
        // eigenvalues of the symmetric part S = (A + A^T)/2, and
        // 2 lambda_min(S) / rho(A)^2 <= min 2 Re(lambda)/|lambda|^2,
        // so the reported eta_max is a conservative lower bound.
        let sym = lanczos_extremes(
            |x| {
                let mut y = a.matvec(x).expect("conforming dims");
                let yt = a.transpose_matvec(x).expect("conforming dims");
                for (yi, ti) in y.iter_mut().zip(&yt) {
                    *yi = 0.5 * (*yi + ti);
                }
                y
            },
            n,
            1e-8,
            10 * n,
            0x51ED,
        );
        let lambda_min_real = sym.theta_min - sym.bound_min;
        if lambda_min_real <= 0.0 {
            return Err(LinalgError::NotPositiveDefinite {
                lambda_re: lambda_min_real,
            });
        }
        let rho = power_modulus(a, 0x0D1F) * 1.05; // 5% headroom keeps the bound conservative
        Ok(Spectrum {
            lambda_min_real,
            lambda_max_real: sym.theta_max + sym.bound_max,
            lambda_max_modulus: rho,
            eta_max: 2.0 * lambda_min_real / (rho * rho),
        })
    }
}

pub(crate) struct LanczosExtremes {
    pub theta_min: f64,
    pub theta_max: f64,
    pub bound_min: f64,
    pub bound_max: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Lanczos iteration with full reorthogonalization for the extreme
/// eigenvalues of a symmetric operator given through its matrix action.
/// Residual bounds `|beta_k s_k|` certify `|theta - lambda| <= bound` for
/// some eigenvalue `lambda`.
pub(crate) fn lanczos_extremes<F>(
    mut apply: F,
    n: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> LanczosExtremes
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nv = norm2(&v);
    scale(&mut v, 1.0 / nv);

    let cap = max_iter.max(2).min(n);
    let mut basis: Vec<Vec<f64>> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut v_prev = vec![0.0; n];
    let mut beta_prev = 0.0;
    let mut exact_subspace = false;

    let check_every = 8usize;
    let mut k = 0usize;
    let mut final_beta = 0.0;
    while k < cap {
        let mut w = apply(&v);
        if beta_prev != 0.0 {
            axpy(-beta_prev, &v_prev, &mut w);
        }
        let alpha = dot(&w, &v);
        axpy(-alpha, &v, &mut w);
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for u in &basis {
                let c = dot(&w, u);
                if c != 0.0 {
                    axpy(-c, u, &mut w);
                }
            }
        }
        alphas.push(alpha);
        let beta = norm2(&w);
        k += 1;

        let op_scale = alphas
            .iter()
            .chain(betas.iter())
            .map(|x| abs(*x))
            .fold(1e-300, f64::max);
        if beta <= f64::EPSILON * 16.0 * op_scale {
            // invariant subspace: Ritz values are exact for the span
            exact_subspace = true;
            break;
        }
        if k == cap || k % check_every == 0 {
            let (theta_min, theta_max, bound_min, bound_max) =
                ritz_extremes(&alphas, &betas, beta);
            let ok_min = bound_min <= 0.5 * tol * abs(theta_min).max(1e-300);
            let ok_max = bound_max <= 0.5 * tol * abs(theta_max).max(1e-300);
            if ok_min && ok_max {
                return LanczosExtremes {
                    theta_min,
                    theta_max,
                    bound_min,
                    bound_max,
                    iterations: k,
                    converged: true,
                };
            }
        }
        if k == cap {
            final_beta = beta;
            break;
        }
        betas.push(beta);
        beta_prev = beta;
        v_prev = core::mem::replace(&mut v, w);
        scale(&mut v, 1.0 / beta);
        basis.push(v.clone());
    }

    let (theta_min, theta_max, bound_min, bound_max) = ritz_extremes(&alphas, &betas, final_beta);
    LanczosExtremes {
        theta_min,
        theta_max,
        bound_min,
        bound_max,
        iterations: k,
        converged: exact_subspace || k == n,
    }
}

/// Extreme Ritz values of the current tridiagonal matrix together with their
/// residual bounds `|beta_next * (last eigenvector component)|`.
fn ritz_extremes(alphas: &[f64], betas: &[f64], beta_next: f64) -> (f64, f64, f64, f64) {
    let theta = sym_tridiag_eigenvalues(alphas, betas).expect("conforming tridiagonal");
    let theta_min = theta[0];
    let theta_max = theta[theta.len() - 1];
    if beta_next == 0.0 {
        return (theta_min, theta_max, 0.0, 0.0);
    }
    let s_min = ritz_last_component(alphas, betas, theta_min);
    let s_max = ritz_last_component(alphas, betas, theta_max);
    (theta_min, theta_max, beta_next * s_min, beta_next * s_max)
}

/// Magnitude of the last component of the normalized eigenvector of the
/// tridiagonal matrix for Ritz value `theta`, by two steps of inverse
/// iteration.
fn ritz_last_component(alphas: &[f64], betas: &[f64], theta: f64) -> f64 {
    let k = alphas.len();
    if k == 1 {
        return 1.0;
    }
    let shifted: Vec<f64> = alphas.iter().map(|a| a - theta).collect();
    let mut x = vec![1.0 / sqrt(k as f64); k];
    for _ in 0..2 {
        shifted_tridiag_solve(betas, &shifted, betas, &mut x);
        let nrm = norm2(&x);
        if !nrm.is_finite() || nrm == 0.0 {
            return 1.0; // conservative: forces the bound to stay large
        }
        scale(&mut x, 1.0 / nrm);
    }
    abs(x[k - 1])
}

/// Solves `(tridiag) x = rhs` in place by LU with partial pivoting (fill on
/// the second superdiagonal). Near-zero pivots are regularized, which is the
/// standard device for inverse iteration at a computed eigenvalue.
fn shifted_tridiag_solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut a = sub.to_vec();
    let mut b = diag.to_vec();
    let mut c = sup.to_vec();
    let mut d2 = vec![0.0; n];
    let magnitude = b
        .iter()
        .chain(a.iter())
        .chain(c.iter())
        .map(|x| abs(*x))
        .fold(f64::MIN_POSITIVE, f64::max);
    let tiny = f64::EPSILON * magnitude;

    for i in 0..n - 1 {
        if abs(a[i]) > abs(b[i]) {
            core::mem::swap(&mut b[i], &mut a[i]);
            let tmp = c[i];
            c[i] = b[i + 1];
            b[i + 1] = tmp;
            if i + 1 < n - 1 {
                let tmp = d2[i];
                d2[i] = c[i + 1];
                c[i + 1] = tmp;
            }
            rhs.swap(i, i + 1);
        }
        if abs(b[i]) < tiny {
            b[i] = copysign(tiny, if b[i] == 0.0 { 1.0 } else { b[i] });
        }
        let m = a[i] / b[i];
        b[i + 1] -= m * c[i];
        if i + 1 < n - 1 {
            c[i + 1] -= m * d2[i];
        }
        rhs[i + 1] -= m * rhs[i];
    }
    if abs(b[n - 1]) < tiny {
        b[n - 1] = copysign(tiny, if b[n - 1] == 0.0 { 1.0 } else { b[n - 1] });
    }
    rhs[n - 1] /= b[n - 1];
    if n >= 2 {
        rhs[n - 2] = (rhs[n - 2] - c[n - 2] * rhs[n - 1]) / b[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - c[i] * rhs[i + 1] - d2[i] * rhs[i + 2]) / b[i];
    }
}

/// Spectral radius estimate by power iteration with renormalization; the
/// estimate is the geometric mean of the last window of growth factors, which
/// also handles dominant complex pairs (their growth oscillates periodically).
fn power_modulus(a: &SparseMatrix, seed: u64) -> f64 {
    let n = a.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nx = norm2(&x);
    scale(&mut x, 1.0 / nx);

    const WINDOW: usize = 64;
    let steps = (10 * n).clamp(200, 4000);
    let mut growths = vec![0.0f64; WINDOW];
    let mut count = 0usize;
    for step in 0..steps {
        let y = a.matvec(&x).expect("conforming dims");
        let g = norm2(&y);
        if g == 0.0 || !g.is_finite() {
            return g.max(0.0);
        }
        x = y;
        scale(&mut x, 1.0 / g);
        growths[step % WINDOW] = g;
        count = count.min(WINDOW - 1) + 1;
    }
    let used = count.min(WINDOW);
    let log_sum: f64 = growths[..used].iter().map(|g| crate::math::ln(*g)).sum();
    crate::math::exp(log_sum / used as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    #[test]
    fn eta_max_identity_is_two() {
        let a = SparseMatrix::identity(4);
        let s = eta_max_bound(&a).unwrap();
        assert!((s.eta_max - 2.0).abs() < 1e-12);
        assert!((s.lambda_max_modulus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eta_max_diag_1_2() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 2.0)]).unwrap();
        let s = eta_max_bound(&a).unwrap();
        assert!((s.eta_max - 1.0).abs() < 1e-12, "min(2/1, 2*2/4) = 1");
    }

    #[test]
    fn eta_max_complex_pair() {
        // [[1,-1],[1,1]] has eigenvalues 1 +- i, so eta = 2*1/2 = 1
        let a = SparseMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 1.0), (0, 1, -1.0), (1, 0, 1.0), (1, 1, 1.0)],
        )
        .unwrap();
        let s = eta_max_bound(&a).unwrap();
        assert!((s.eta_max - 1.0).abs() < 1e-12);
        assert!((s.lambda_max_modulus - core::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn non_positive_definite_is_flagged() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, -1.0), (1, 1, 2.0)]).unwrap();
        assert!(matches!(
            eta_max_bound(&a),
            Err(LinalgError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn condition_number_identity() {
        let a = SparseMatrix::identity(6);
        let k = condition_number_spd(&a, 1e-8).unwrap();
        assert!((k - 1.0).abs() < 1e-8);
    }

    #[test]
    fn condition_number_diag() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 1.0), (1, 1, 4.0), (2, 2, 10.0)],
        )
        .unwrap();
        let k = condition_number_spd(&a, 1e-10).unwrap();
        assert!((k - 10.0).abs() < 1e-8, "kappa(diag(1,4,10)) = 10, got {k}");
    }

    #[test]
    fn condition_number_rejects_indefinite() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, -3.0)]).unwrap();
        assert!(matches!(
            condition_number_spd(&a, 1e-8),
            Err(ConditionEstimateError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn spd_bound_matches_two_over_lambda_max() {
        // random-ish SPD: tridiagonal with weak coupling
        let n = 12;
        let mut t = alloc::vec::Vec::new();
        for i in 0..n {
            t.push((i, i, 3.0 + (i as f64) * 0.17));
            if i + 1 < n {
                t.push((i, i + 1, -0.5));
                t.push((i + 1, i, -0.5));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let s = eta_max_bound(&a).unwrap();
        let eig = dense_eig_with_cap(&a.to_dense(), 100).unwrap();
        let lambda_max = eig.last().unwrap().re;
        assert!(
            (s.eta_max - 2.0 / lambda_max).abs() <= 1e-10 * (2.0 / lambda_max),
            "eta {} vs 2/lambda_max {}",
            s.eta_max,
            2.0 / lambda_max
        );
    }

    #[test]
    fn estimate_path_is_conservative_on_spd() {
        // force the estimate path with a tiny cap; bound must not exceed the
        // exact one
        let n = 30;
        let mut t = alloc::vec::Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let exact = eta_max_bound(&a).unwrap();
        let est = eta_max_bound_with_cap(&a, 4).unwrap();
        assert!(
            est.eta_max <= exact.eta_max * (1.0 + 1e-9),
            "estimate {} must be conservative vs exact {}",
            est.eta_max,
            exact.eta_max
        );
        assert!(est.eta_max > 0.0);
    }

    #[test]
    fn dense_matrix_symmetry_detection() {
        let m = DenseMatrix::from_rows(2, 2, alloc::vec![1.0, 2.0, 2.0, 5.0]).unwrap();
        assert!(m.is_symmetric());
    }
}

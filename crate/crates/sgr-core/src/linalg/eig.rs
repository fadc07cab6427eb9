//! Dense eigenvalue decomposition for small systems.
//!
//! Symmetric matrices go through Householder tridiagonalization followed by
//! the implicit QL iteration with Wilkinson shifts; general matrices are
//! balanced, reduced to upper Hessenberg form by stabilized elimination, and
//! passed to the Francis double-shift QR iteration (eigenvalues only). This
//! serves as the spectral oracle for small instances; large operators use the
//! iterative estimates in [`super::spectrum`].

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{DenseMatrix, LinalgError};
use crate::math::{abs, copysign, hypot, sqrt};

/// Largest order accepted for dense decompositions unless a caller raises it.
pub const DEFAULT_DENSE_CAP: usize = 2000;

/// Eigenvalues of a square dense matrix, sorted by `(re, im)`.
///
/// Accurate to about 1e-10 relative for well-separated spectra. Fails with
/// [`LinalgError::DenseCapExceeded`] above [`DEFAULT_DENSE_CAP`] rows; use
/// [`dense_eig_with_cap`] to raise the cap deliberately.
pub fn dense_eig(a: &DenseMatrix) -> Result<Vec<Complex64>, LinalgError> {
    dense_eig_with_cap(a, DEFAULT_DENSE_CAP)
}

/// [`dense_eig`] with an explicit size cap.
pub fn dense_eig_with_cap(a: &DenseMatrix, cap: usize) -> Result<Vec<Complex64>, LinalgError> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let n = a.nrows();
    if n > cap {
        return Err(LinalgError::DenseCapExceeded { n, cap });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut eig = if a.is_symmetric() {
        let (d, e) = householder_tridiagonalize(a);
        sym_tridiag_eigenvalues(&d, &e)?
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect()
    } else {
        let mut h = a.clone();
        balance(&mut h);
        to_hessenberg(&mut h);
        hqr_eigenvalues(&mut h)?
    };
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eig)
}

/// Eigenvalues of a symmetric tridiagonal matrix, ascending.
///
/// `offdiag[i]` couples `diag[i]` and `diag[i + 1]`. Implicit QL with
/// Wilkinson shifts.
pub fn sym_tridiag_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if offdiag.len() + 1 != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n - 1,
            got: offdiag.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0); // sentinel coupling beyond the last row

    let scale: f64 = d.iter().chain(e.iter()).map(|x| abs(*x)).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(d);
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            // locate a negligible coupling bounding the active block [l..=m]
            let mut m = l;
            while m + 1 < n {
                let dd = abs(d[m]) + abs(d[m + 1]);
                let thresh = if dd > 0.0 {
                    f64::EPSILON * dd
                } else {
                    f64::EPSILON * scale
                };
                if abs(e[m]) <= thresh {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(LinalgError::EigDidNotConverge);
            }
            // Wilkinson shift from the top 2x2 of the block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + copysign(r, g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflowed = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// Returns `(diag, offdiag)` with `offdiag[i]` coupling rows `i` and `i + 1`.
fn householder_tridiagonalize(a: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n]; // e[i] couples rows i-1 and i; e[0] unused

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += abs(a[(i, k)]);
            }
            if scale == 0.0 {
                e[i] = a[(i, l)];
            } else {
                for k in 0..=l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let mut f = a[(i, l)];
                let g = if f >= 0.0 { -sqrt(h) } else { sqrt(h) };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[(j, k)] * a[(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[(j, k)] -= f * e[k] + g * a[(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
    }
    for i in 0..n {
        d[i] = a[(i, i)];
    }
    let offdiag = e[1..].to_vec();
    (d, offdiag)
}

/// Diagonal similarity scaling to balance row/column norms (radix powers, so
/// eigenvalues are unchanged exactly).
fn balance(a: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs(a[(j, i)]);
                    r += abs(a[(i, j)]);
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                let mut c_scaled = c;
                while c_scaled < g {
                    f *= RADIX;
                    c_scaled *= RADIX * RADIX;
                }
                g = r * RADIX;
                while c_scaled > g {
                    f /= RADIX;
                    c_scaled /= RADIX * RADIX;
                }
                if (c_scaled + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= g;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarity
/// transformations.
fn to_hessenberg(a: &mut DenseMatrix) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    for m in 1..(n - 1) {
        let mut x = 0.0;
        let mut pivot = m;
        for j in m..n {
            if abs(a[(j, m - 1)]) > abs(x) {
                x = a[(j, m - 1)];
                pivot = j;
            }
        }
        if pivot != m {
            for j in (m - 1)..n {
                let tmp = a[(pivot, j)];
                a[(pivot, j)] = a[(m, j)];
                a[(m, j)] = tmp;
            }
            for j in 0..n {
                let tmp = a[(j, pivot)];
                a[(j, pivot)] = a[(j, m)];
                a[(j, m)] = tmp;
            }
        }
        if x != 0.0 {
            for i in (m + 1)..n {
                let mut y = a[(i, m - 1)];
                if y != 0.0 {
                    y /= x;
                    a[(i, m - 1)] = 0.0;
                    for j in m..n {
                        let delta = y * a[(m, j)];
                        a[(i, j)] -= delta;
                    }
                    for j in 0..n {
                        let delta = y * a[(j, i)];
                        a[(j, m)] += delta;
                    }
                }
            }
        }
    }
    // clear anything left below the first subdiagonal
    for i in 2..n {
        for j in 0..(i - 1) {
            a[(i, j)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only.
fn hqr_eigenvalues(h: &mut DenseMatrix) -> Result<Vec<Complex64>, LinalgError> {
    let n = h.nrows();
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += abs(h[(i, j)]);
        }
    }
    if anorm == 0.0 {
        return Ok(eig);
    }

    let mut t = 0.0;
    let mut nn: isize = n as isize - 1;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // find a negligible subdiagonal; block is [l..=nn]
            let mut l = nn;
            while l >= 1 {
                let lu = l as usize;
                let mut s = abs(h[(lu - 1, lu - 1)]) + abs(h[(lu, lu)]);
                if s == 0.0 {
                    s = anorm;
                }
                if abs(h[(lu, lu - 1)]) <= f64::EPSILON * s {
                    h[(lu, lu - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let nu = nn as usize;
            let mut x = h[(nu, nu)];
            if l == nn {
                eig[nu] = Complex64::new(x + t, 0.0);
                nn -= 1;
                break;
            }
            let mut y = h[(nu - 1, nu - 1)];
            let mut w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = sqrt(abs(q));
                x += t;
                if q >= 0.0 {
                    let z = p + copysign(z, p);
                    let first = x + z;
                    let second = if z != 0.0 { x - w / z } else { first };
                    eig[nu - 1] = Complex64::new(first, 0.0);
                    eig[nu] = Complex64::new(second, 0.0);
                } else {
                    eig[nu - 1] = Complex64::new(x + p, z);
                    eig[nu] = Complex64::new(x + p, -z);
                }
                nn -= 2;
                break;
            }
            if its == 30 {
                return Err(LinalgError::EigDidNotConverge);
            }
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=nu {
                    h[(i, i)] -= x;
                }
                let s = abs(h[(nu, nu - 1)]) + abs(h[(nu - 1, nu - 2)]);
                y = 0.75 * s;
                x = y;
                w = -0.4375 * s * s;
            }
            its += 1;

            // look for two consecutive small subdiagonals starting the bulge
            let mut m = nn - 2;
            let mut p = 0.0;
            let mut q = 0.0;
            let mut r = 0.0;
            while m >= l {
                let mu = m as usize;
                let z = h[(mu, mu)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[(mu + 1, mu)] + h[(mu, mu + 1)];
                q = h[(mu + 1, mu + 1)] - z - rr - ss;
                r = h[(mu + 2, mu + 1)];
                let s = abs(p) + abs(q) + abs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = abs(h[(mu, mu - 1)]) * (abs(q) + abs(r));
                let v = abs(p) * (abs(h[(mu - 1, mu - 1)]) + abs(z) + abs(h[(mu + 1, mu + 1)]));
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            let mu = m as usize;
            for i in (mu + 2)..=nu {
                h[(i, i - 2)] = 0.0;
            }
            for i in (mu + 3)..=nu {
                h[(i, i - 3)] = 0.0;
            }

            // double QR sweep over rows l..=nn, chasing the bulge from m
            for k in mu..nu {
                if k != mu {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if k != nu - 1 { h[(k + 2, k - 1)] } else { 0.0 };
                    x = abs(p) + abs(q) + abs(r);
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = copysign(sqrt(p * p + q * q + r * r), p);
                if s == 0.0 {
                    continue;
                }
                if k == mu {
                    if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                } else {
                    h[(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=nu {
                    let mut pp = h[(k, j)] + q * h[(k + 1, j)];
                    if k != nu - 1 {
                        pp += r * h[(k + 2, j)];
                        h[(k + 2, j)] -= pp * z;
                    }
                    h[(k + 1, j)] -= pp * y;
                    h[(k, j)] -= pp * x;
                }
                let mmin = if nu < k + 3 { nu } else { k + 3 };
                for i in (l as usize)..=mmin {
                    let mut pp = x * h[(i, k)] + y * h[(i, k + 1)];
                    if k != nu - 1 {
                        pp += z * h[(i, k + 2)];
                        h[(i, k + 2)] -= pp * r;
                    }
                    h[(i, k + 1)] -= pp * q;
                    h[(i, k)] -= pp;
                }
            }
        }
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        math::abs(a - b) <= tol * math::abs(b).max(1.0)
    }

    #[test]
    fn diagonal_eigenvalues() {
        let a = DenseMatrix::diagonal(&[3.0, 7.0]);
        let eig = dense_eig(&a).unwrap();
        assert!(close(eig[0].re, 3.0, 1e-14) && eig[0].im == 0.0);
        assert!(close(eig[1].re, 7.0, 1e-14) && eig[1].im == 0.0);
    }

    #[test]
    fn dirichlet_laplacian_closed_form() {
        // tridiag(-1, 2, -1) at n = 4: eigenvalues 2 - 2 cos(k pi / 5)
        let n = 4;
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 2.0;
            if i + 1 < n {
                a[(i, i + 1)] = -1.0;
                a[(i + 1, i)] = -1.0;
            }
        }
        let eig = dense_eig(&a).unwrap();
        for (k, ev) in eig.iter().enumerate() {
            let expected = 2.0 - 2.0 * math::cos((k + 1) as f64 * core::f64::consts::PI / 5.0);
            assert!(
                close(ev.re, expected, 1e-12),
                "eig {k}: got {}, want {expected}",
                ev.re
            );
            assert_eq!(ev.im, 0.0);
        }
    }

    #[test]
    fn rotation_matrix_has_imaginary_pair() {
        let a = DenseMatrix::from_rows(2, 2, vec![0.0, -1.0, 1.0, 0.0]).unwrap();
        let eig = dense_eig(&a).unwrap();
        assert!(math::abs(eig[0].re) < 1e-14 && close(eig[0].im, -1.0, 1e-14));
        assert!(math::abs(eig[1].re) < 1e-14 && close(eig[1].im, 1.0, 1e-14));
    }

    #[test]
    fn complex_pair_with_real_part() {
        // [[1,-1],[1,1]] has eigenvalues 1 +- i
        let a = DenseMatrix::from_rows(2, 2, vec![1.0, -1.0, 1.0, 1.0]).unwrap();
        let eig = dense_eig(&a).unwrap();
        for ev in &eig {
            assert!(close(ev.re, 1.0, 1e-14));
            assert!(close(math::abs(ev.im), 1.0, 1e-14));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let a = DenseMatrix::zeros(5, 5);
        assert!(matches!(
            dense_eig_with_cap(&a, 4),
            Err(LinalgError::DenseCapExceeded { n: 5, cap: 4 })
        ));
    }

    #[test]
    fn tridiag_eigenvalues_match_dense_path() {
        let d = [1.0, -0.5, 3.0, 2.0, 0.25];
        let e = [0.7, -1.2, 0.3, 2.0];
        let vals = sym_tridiag_eigenvalues(&d, &e).unwrap();
        let n = d.len();
        let mut full = DenseMatrix::zeros(n, n);
        for i in 0..n {
            full[(i, i)] = d[i];
            if i + 1 < n {
                full[(i, i + 1)] = e[i];
                full[(i + 1, i)] = e[i];
            }
        }
        let dense = dense_eig(&full).unwrap();
        for (v, expect) in vals.iter().zip(dense.iter()) {
            assert!(close(*v, expect.re, 1e-12));
        }
    }
}

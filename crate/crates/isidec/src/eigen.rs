//! Dense symmetric eigenvalue solver (eigenvalues only).
//!
//! Finite-block mutual information needs the spectrum of a dense symmetric
//! Gram matrix.  At the block lengths this crate targets a dense solver is
//! entirely adequate, so we use the classical two-stage method: Householder
//! reduction to tridiagonal form followed by the implicit-shift QL
//! iteration.  Eigenvectors are never accumulated.

use crate::error::{Error, Result};

/// Maximum QL iterations per eigenvalue before giving up.
const MAX_QL_ITERS: usize = 60;

/// Computes all eigenvalues of a symmetric matrix, sorted ascending.
///
/// `a` is the full matrix in row-major order and is consumed as scratch
/// space.  Only symmetry of the input is assumed; it is the caller's job to
/// ensure `a` is symmetric (the routine reads both triangles during the
/// reduction).
pub(crate) fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("matrix order must be at least 1".into()));
    }
    if a.len() != n * n {
        return Err(Error::DimensionMismatch {
            context: "symmetric matrix buffer",
            expected: n * n,
            actual: a.len(),
        });
    }

    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    tridiagonalize(&mut a, n, &mut d, &mut e);
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    Ok(d)
}

/// Householder reduction of a symmetric matrix to tridiagonal form,
/// without accumulating the transformation.
///
/// On return `d` holds the diagonal and `e[1..]` the subdiagonal
/// (`e[0]` is zero).
fn tridiagonalize(a: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    for i in (1..n).rev() {
        let l = i - 1;
        if l == 0 {
            e[i] = a[i * n];
            continue;
        }
        let mut scale = 0.0;
        for k in 0..i {
            scale += a[i * n + k].abs();
        }
        if scale == 0.0 {
            // Row already reduced; nothing to annihilate.
            e[i] = a[i * n + l];
            continue;
        }
        let mut h = 0.0;
        for k in 0..i {
            a[i * n + k] /= scale;
            h += a[i * n + k] * a[i * n + k];
        }
        let f = a[i * n + l];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        h -= f * g;
        a[i * n + l] = f - g;

        // Form p = A v / h and the correction scalar.
        let mut f_acc = 0.0;
        for j in 0..i {
            let mut g = 0.0;
            for k in 0..=j {
                g += a[j * n + k] * a[i * n + k];
            }
            for k in (j + 1)..i {
                g += a[k * n + j] * a[i * n + k];
            }
            e[j] = g / h;
            f_acc += e[j] * a[i * n + j];
        }
        let hh = f_acc / (h + h);

        // Rank-two update of the leading block: A <- A - v w^T - w v^T.
        for j in 0..i {
            let fj = a[i * n + j];
            let gj = e[j] - hh * fj;
            e[j] = gj;
            for k in 0..=j {
                a[j * n + k] -= fj * e[k] + gj * a[i * n + k];
            }
        }
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal, `e[1..]` the subdiagonal on entry; on return `d`
/// holds the eigenvalues in no particular order.
fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    // Renumber the subdiagonal so e[i] couples d[i] and d[i + 1].
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iters = 0;
        loop {
            // Look for a negligible subdiagonal element to split the matrix.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break; // d[l] has converged
            }
            iters += 1;
            if iters > MAX_QL_ITERS {
                return Err(Error::DegenerateInput(
                    "tridiagonal eigenvalue iteration failed to converge",
                ));
            }

            // Wilkinson-style shift from the leading 2 x 2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut aborted = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Underflow in the rotation chain: deflate and retry.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    aborted = true;
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
            if aborted {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

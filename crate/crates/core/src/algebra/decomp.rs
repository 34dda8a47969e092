//! Self-contained decompositions for small dense complex matrices
//! (side length at most 16): one-sided Jacobi SVD, Hermitian eigenvalues via
//! real-symmetric Jacobi, Householder QR, and the unitary polar factor.

use super::matrix::{inner, norm_sqr, Amplitude, Matrix, ONE, ZERO};

const MAX_SWEEPS: usize = 80;

/// `a = u * diag(s) * v^dag` with `k = min(rows, cols)` singular values in
/// non-increasing order. Both `u` (rows x k) and `v` (cols x k) have
/// orthonormal columns, including those paired with zero singular values.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

pub fn svd(a: &Matrix) -> Svd {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.adjoint());
        Svd { u: t.v, s: t.s, v: t.u }
    }
}

/// One-sided (Hestenes) Jacobi on the columns of a tall matrix.
fn svd_tall(a: &Matrix) -> Svd {
    let m = a.rows();
    let n = a.cols();
    let mut cols: Vec<Vec<Amplitude>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Amplitude>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norm_sqr(&cols[p]);
                let beta = norm_sqr(&cols[q]);
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g < 1e-300 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g; // e^{i phi}
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Right-multiply by G with G_pp = c, G_pq = s,
                // G_qp = -s e^{-i phi}, G_qq = c e^{-i phi}.
                let e = phase.conj();
                rotate(&mut cols, p, q, c, s, e);
                rotate(&mut v, p, q, c, s, e);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| norm_sqr(c).sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let scale = norms.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let mut s = Vec::with_capacity(n);
    let mut u_cols: Vec<Option<Vec<Amplitude>>> = Vec::with_capacity(n);
    let mut v_cols: Vec<Vec<Amplitude>> = Vec::with_capacity(n);
    for &j in &order {
        let sigma = norms[j];
        if sigma > 1e-14 * scale && sigma > 1e-300 {
            u_cols.push(Some(cols[j].iter().map(|z| z / sigma).collect()));
            s.push(sigma);
        } else {
            u_cols.push(None);
            s.push(0.0);
        }
        v_cols.push(v[j].clone());
    }
    let u_cols = complete_columns(m, u_cols);

    let u_refs: Vec<&[Amplitude]> = u_cols.iter().map(Vec::as_slice).collect();
    let v_refs: Vec<&[Amplitude]> = v_cols.iter().map(Vec::as_slice).collect();
    Svd {
        u: Matrix::from_columns(&u_refs),
        s,
        v: Matrix::from_columns(&v_refs),
    }
}

fn rotate(cols: &mut [Vec<Amplitude>], p: usize, q: usize, c: f64, s: f64, e: Amplitude) {
    let (lo, hi) = cols.split_at_mut(q);
    let cp = &mut lo[p];
    let cq = &mut hi[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let yq = *y * e;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

/// Fills the `None` slots with unit vectors orthogonal to every other column,
/// drawn by Gram-Schmidt from computational basis kets in index order.
pub fn complete_columns(dim: usize, cols: Vec<Option<Vec<Amplitude>>>) -> Vec<Vec<Amplitude>> {
    let mut fixed: Vec<Vec<Amplitude>> = cols.iter().flatten().cloned().collect();
    let mut candidates = 0..dim;
    let mut out = Vec::with_capacity(cols.len());
    for col in cols {
        match col {
            Some(c) => out.push(c),
            None => loop {
                let k = candidates
                    .next()
                    .expect("orthogonal complement exhausted before completion");
                let mut e = vec![ZERO; dim];
                e[k] = ONE;
                if let Some(v) = orthonormalize_against(&e, &fixed) {
                    fixed.push(v.clone());
                    out.push(v);
                    break;
                }
            },
        }
    }
    out
}

/// Projects `v` off `basis` (twice, for stability) and normalizes; `None` if
/// the remainder is numerically zero.
pub fn orthonormalize_against(v: &[Amplitude], basis: &[Vec<Amplitude>]) -> Option<Vec<Amplitude>> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
    }
    let n = norm_sqr(&w).sqrt();
    if n < 1e-8 {
        return None;
    }
    Some(w.into_iter().map(|z| z / n).collect())
}

/// Eigenvalues of a Hermitian matrix in non-increasing order.
///
/// The `n x n` Hermitian `A + iB` is embedded as the real symmetric
/// `[[A, -B], [B, A]]`, whose spectrum is that of the original with every
/// eigenvalue doubled; cyclic Jacobi then runs on real data.
pub fn hermitian_eigenvalues(h: &Matrix) -> Vec<f64> {
    assert!(h.is_square(), "hermitian_eigenvalues: non-square input");
    let n = h.dim();
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    // Symmetrize against tiny Hermiticity defects.
    for i in 0..m {
        for j in (i + 1)..m {
            let avg = 0.5 * (a[i * m + j] + a[j * m + i]);
            a[i * m + j] = avg;
            a[j * m + i] = avg;
        }
    }
    let mut eig = symmetric_jacobi_eigenvalues(a, m);
    eig.sort_by(|x, y| y.total_cmp(x));
    eig.into_iter().step_by(2).collect()
}

fn symmetric_jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i * n + i] * a[i * n + i]).sum();
        if off <= 1e-32 * diag.max(1e-300) || off < 1e-300 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// Householder QR of a square matrix: `a = q * r` with `q` unitary and `r`
/// upper triangular. The diagonal of `r` carries arbitrary phases.
pub fn householder_qr(a: &Matrix) -> (Matrix, Matrix) {
    assert!(a.is_square(), "householder_qr: non-square input");
    let n = a.dim();
    let mut r = a.clone();
    let mut q = Matrix::identity(n);
    for k in 0..n.saturating_sub(1) {
        let x: Vec<Amplitude> = (k..n).map(|i| r[(i, k)]).collect();
        let xnorm = norm_sqr(&x).sqrt();
        if xnorm < 1e-300 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = norm_sqr(&v).sqrt();
        if vnorm < 1e-300 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // r <- (I - 2 v v^dag) r on rows k..n
        for j in 0..n {
            let dot: Amplitude = (k..n).map(|i| v[i - k].conj() * r[(i, j)]).sum();
            for i in k..n {
                r[(i, j)] -= 2.0 * v[i - k] * dot;
            }
        }
        // q <- q (I - 2 v v^dag) on columns k..n
        for i in 0..n {
            let dot: Amplitude = (k..n).map(|j| q[(i, j)] * v[j - k]).sum();
            for j in k..n {
                q[(i, j)] -= 2.0 * dot * v[j - k].conj();
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            r[(i, j)] = ZERO;
        }
    }
    (q, r)
}

/// Closest unitary to `a` in Frobenius norm (`u v^dag` from the SVD).
pub fn unitary_polar_factor(a: &Matrix) -> Matrix {
    let d = svd(a);
    &d.u * &d.v.adjoint()
}

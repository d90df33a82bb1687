//! Dense symmetric eigensolvers.
//!
//! [`symmetric_eigen`] is the brute-force reference: Householder reduction to
//! tridiagonal form followed by implicit QL with Wilkinson shifts.
//! [`jacobi_eigen`] is a cyclic Jacobi method for the small projected
//! matrices of the iterative solver; keeping the two separate means the
//! oracle shares no code with the path it checks.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{hypot, sqrt};

/// Eigenvalues (ascending) and, optionally, column eigenvectors stored
/// row-major as `vectors[row * n + col]`.
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<f64>>,
}

/// Full eigendecomposition of a dense symmetric `n × n` row-major matrix.
pub fn symmetric_eigen(a: &[f64], n: usize, want_vectors: bool) -> SymmetricEigen {
    assert_eq!(a.len(), n * n);
    let mut z = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut z, n, &mut d, &mut e, want_vectors);
    if want_vectors {
        transpose(&mut z, n);
    }
    tql(&mut d, &mut e, n, want_vectors.then_some(&mut z[..]));

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        let mut v = vec![0.0; n * n];
        for (new_col, &old_col) in order.iter().enumerate() {
            for row in 0..n {
                v[row * n + new_col] = z[old_col * n + row];
            }
        }
        v
    });
    SymmetricEigen { values, vectors }
}

fn transpose(a: &mut [f64], n: usize) {
    for r in 0..n {
        for c in (r + 1)..n {
            a.swap(r * n + c, c * n + r);
        }
    }
}

// Householder reduction (tred2 layout). On exit `d` holds the diagonal,
// `e[1..]` the subdiagonal, and `z` the accumulated orthogonal transform.
fn tridiagonalize(z: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64], vectors: bool) {
    if n == 0 {
        return;
    }
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| z[i * n + k].abs()).sum();
            if scale == 0.0 {
                e[i] = z[i * n + l];
            } else {
                for k in 0..=l {
                    z[i * n + k] /= scale;
                    h += z[i * n + k] * z[i * n + k];
                }
                let f = z[i * n + l];
                let g = if f >= 0.0 { -sqrt(h) } else { sqrt(h) };
                e[i] = scale * g;
                h -= f * g;
                z[i * n + l] = f - g;
                if vectors {
                    for j in 0..=l {
                        z[j * n + i] = z[i * n + j] / h;
                    }
                }
                // e = A u / h from the lower triangle, walked by rows.
                let (head, tail) = z.split_at(i * n);
                let u = &tail[..=l];
                e[..=l].fill(0.0);
                for j in 0..=l {
                    let row = &head[j * n..j * n + j];
                    let uj = u[j];
                    let mut g = head[j * n + j] * uj;
                    for (k, &a) in row.iter().enumerate() {
                        g += a * u[k];
                        e[k] += a * uj;
                    }
                    e[j] += g;
                }
                let mut f = 0.0;
                for j in 0..=l {
                    e[j] /= h;
                    f += e[j] * u[j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = z[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        z[j * n + k] -= f * e[k] + g * z[i * n + k];
                    }
                }
            }
        } else {
            e[i] = z[i * n + l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    let mut scratch = if vectors { vec![0.0; n] } else { Vec::new() };
    for i in 0..n {
        if vectors {
            if d[i] != 0.0 {
                scratch[..i].fill(0.0);
                for k in 0..i {
                    let zik = z[i * n + k];
                    for (g, &zkj) in scratch[..i].iter_mut().zip(&z[k * n..k * n + i]) {
                        *g += zik * zkj;
                    }
                }
                for k in 0..i {
                    let zki = z[k * n + i];
                    for (zkj, &g) in z[k * n..k * n + i].iter_mut().zip(&scratch[..i]) {
                        *zkj -= g * zki;
                    }
                }
            }
            d[i] = z[i * n + i];
            z[i * n + i] = 1.0;
            for j in 0..i {
                z[j * n + i] = 0.0;
                z[i * n + j] = 0.0;
            }
        } else {
            d[i] = z[i * n + i];
        }
    }
}

// Implicit QL on the tridiagonal (d, e), rotating the rows of `zt` (the
// transposed transform) when given.
fn tql(d: &mut [f64], e: &mut [f64], n: usize, mut zt: Option<&mut [f64]>) {
    if n == 0 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 200, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let rr = (d[i] - g) * s + 2.0 * c * b;
                p = s * rr;
                d[i + 1] = g + p;
                g = c * rr - b;
                if let Some(z) = zt.as_deref_mut() {
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let row_i = &mut lo[i * n..];
                    for (a, b) in row_i.iter_mut().zip(&mut hi[..n]) {
                        let f = *b;
                        *b = s * *a + c * f;
                        *a = c * *a - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Cyclic Jacobi eigendecomposition for small symmetric matrices.
/// Returns ascending eigenvalues and row-major column eigenvectors.
pub fn jacobi_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        let diag: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (theta.abs() + sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vecs[row * n + new_col] = v[row * n + old_col];
        }
    }
    (values, vecs)
}

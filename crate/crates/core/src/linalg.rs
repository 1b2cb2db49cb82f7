//! Hermitian spectral routines through the real symmetric embedding
//! `[[Re, -Im], [Im, Re]]`.

use faer::{Mat, Side};
use num_complex::Complex64;

fn symmetric_part(d: usize, data: &[Complex64]) -> (Mat<f64>, bool) {
    let real = data.iter().all(|v| v.im == 0.0);
    let h = |r: usize, c: usize| (data[r * d + c] + data[c * d + r].conj()) * 0.5;
    if real {
        (Mat::from_fn(d, d, |r, c| h(r, c).re), true)
    } else {
        let e = Mat::from_fn(2 * d, 2 * d, |r, c| {
            let v = h(r % d, c % d);
            match (r < d, c < d) {
                (true, true) | (false, false) => v.re,
                (true, false) => -v.im,
                (false, true) => v.im,
            }
        });
        (e, false)
    }
}

pub fn symmetric_eigenvalues(m: &Mat<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev = m
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("symmetric eigenvalue iteration converges");
    ev.sort_by(f64::total_cmp);
    ev
}

/// Ascending eigenvalues of the Hermitian part of a `d x d` matrix.
pub fn hermitian_eigenvalues(d: usize, data: &[Complex64]) -> Vec<f64> {
    let (m, real) = symmetric_part(d, data);
    let ev = symmetric_eigenvalues(&m);
    if real {
        ev
    } else {
        ev.into_iter().step_by(2).collect()
    }
}

pub fn symmetric_function(m: &Mat<f64>, f: impl Fn(f64) -> f64) -> Mat<f64> {
    let n = m.nrows();
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    let eig = m.self_adjoint_eigen(Side::Lower).expect("symmetric eigendecomposition converges");
    let u = eig.U();
    let s = eig.S().column_vector();
    let fs: Vec<f64> = (0..n).map(|i| f(s[i])).collect();
    let scaled = Mat::from_fn(n, n, |r, c| u[(r, c)] * fs[c]);
    &scaled * u.transpose()
}

/// `f` applied to the spectrum of the Hermitian part of a `d x d` matrix.
pub fn hermitian_function(d: usize, data: &[Complex64], f: impl Fn(f64) -> f64) -> Vec<Complex64> {
    let (m, real) = symmetric_part(d, data);
    let fm = symmetric_function(&m, f);
    let mut out = Vec::with_capacity(d * d);
    for r in 0..d {
        for c in 0..d {
            out.push(if real {
                Complex64::new(fm[(r, c)], 0.0)
            } else {
                Complex64::new(fm[(r, c)], fm[(r + d, c)])
            });
        }
    }
    out
}

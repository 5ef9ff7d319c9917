//! Small dense complex matrices and a cyclic Jacobi eigensolver for the
//! Hermitian case.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix<const N: usize> = [[Complex64; N]; N];

pub const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

pub fn zeros<const N: usize>() -> Matrix<N> {
    [[Complex64::new(0.0, 0.0); N]; N]
}

pub fn identity<const N: usize>() -> Matrix<N> {
    let mut m = zeros();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn matmul<const N: usize>(a: &Matrix<N>, b: &Matrix<N>) -> Matrix<N> {
    let mut out = zeros();
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..N {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn adjoint<const N: usize>(a: &Matrix<N>) -> Matrix<N> {
    let mut out = zeros();
    for i in 0..N {
        for j in 0..N {
            out[j][i] = a[i][j].conj();
        }
    }
    out
}

pub fn frobenius<const N: usize>(a: &Matrix<N>) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entrywise deviation |M − M†|.
pub fn hermiticity_defect<const N: usize>(a: &Matrix<N>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..N {
        for j in i..N {
            worst = worst.max((a[i][j] - a[j][i].conj()).norm());
        }
    }
    worst
}

pub fn trace<const N: usize>(a: &Matrix<N>) -> Complex64 {
    (0..N).map(|i| a[i][i]).sum()
}

/// Eigen-decomposition `M = V·diag(values)·V†` of a Hermitian matrix.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen<const N: usize> {
    /// Non-increasing.
    pub values: [f64; N],
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: Matrix<N>,
}

impl<const N: usize> HermitianEigen<N> {
    /// Rebuilds `V·diag(f(λ))·V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Matrix<N> {
        let mut out = zeros();
        for k in 0..N {
            let w = f(self.values[k]);
            if w == 0.0 {
                continue;
            }
            for i in 0..N {
                let vik = self.vectors[i][k] * w;
                for j in 0..N {
                    out[i][j] += vik * self.vectors[j][k].conj();
                }
            }
        }
        out
    }
}

fn off_diagonal<const N: usize>(a: &Matrix<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi iteration. The input is symmetrized as
/// `(M + M†)/2` first; callers are responsible for checking that `M` was
/// Hermitian to begin with.
pub fn eigh<const N: usize>(m: &Matrix<N>) -> Result<HermitianEigen<N>> {
    let mut a = zeros::<N>();
    for i in 0..N {
        for j in 0..N {
            a[i][j] = 0.5 * (m[i][j] + m[j][i].conj());
        }
    }
    let scale = frobenius(&a);
    let mut v = identity::<N>();

    let mut converged = scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if off_diagonal(&a) <= OFF_DIAGONAL_TOL * scale {
            converged = true;
            break;
        }
        if sweeps == MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::EigenNotConverged(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[j][j].re.total_cmp(&a[i][i].re));
    let mut values = [0.0; N];
    let mut vectors = zeros::<N>();
    for (k, &src) in order.iter().enumerate() {
        values[k] = a[src][src].re;
        for i in 0..N {
            vectors[i][k] = v[i][src];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Singular values in non-increasing order, by one-sided (Hestenes) Jacobi:
/// columns are rotated pairwise until mutually orthogonal and the singular
/// values are then the column norms. Small singular values come out with
/// absolute accuracy ~ε‖M‖, unlike square roots of eigenvalues of M·M†.
pub fn singular_values<const N: usize>(m: &Matrix<N>) -> Result<[f64; N]> {
    let mut a = *m;
    let column_dot = |a: &Matrix<N>, p: usize, q: usize| -> Complex64 {
        (0..N).map(|k| a[k][p].conj() * a[k][q]).sum()
    };
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..N {
            for q in (p + 1)..N {
                let alpha = column_dot(&a, p, p).re;
                let beta = column_dot(&a, q, q).re;
                let gamma = column_dot(&a, p, q);
                let r = gamma.norm();
                if r == 0.0 || r <= OFF_DIAGONAL_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / r).conj();
                let theta = (beta - alpha) / (2.0 * r);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * phase_conj * y;
                    row[q] = s * x + c * phase_conj * y;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::EigenNotConverged(MAX_SWEEPS));
    }
    let mut values = [0.0; N];
    for (j, v) in values.iter_mut().enumerate() {
        *v = (0..N).map(|k| a[k][j].norm_sqr()).sum::<f64>().sqrt();
    }
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Zeroes `a[p][q]` with the unitary `diag(1, e^{-iφ})·[[c, s], [-s, c]]`
/// acting on rows/columns p and q, where `a[p][q] = r·e^{iφ}`.
fn rotate<const N: usize>(a: &mut Matrix<N>, v: &mut Matrix<N>, p: usize, q: usize) {
    let apq = a[p][q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let theta = (a[q][q].re - a[p][p].re) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase_conj = phase.conj();
    let w = [
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [-s * phase_conj, c * phase_conj],
    ];

    for k in 0..N {
        let (akp, akq) = (a[k][p], a[k][q]);
        a[k][p] = akp * w[0][0] + akq * w[1][0];
        a[k][q] = akp * w[0][1] + akq * w[1][1];
        let (vkp, vkq) = (v[k][p], v[k][q]);
        v[k][p] = vkp * w[0][0] + vkq * w[1][0];
        v[k][q] = vkp * w[0][1] + vkq * w[1][1];
    }
    for k in 0..N {
        let (apk, aqk) = (a[p][k], a[q][k]);
        a[p][k] = w[0][0].conj() * apk + w[1][0].conj() * aqk;
        a[q][k] = w[0][1].conj() * apk + w[1][1].conj() * aqk;
    }
    a[p][q] = Complex64::new(0.0, 0.0);
    a[q][p] = Complex64::new(0.0, 0.0);
    a[p][p] = Complex64::new(a[p][p].re, 0.0);
    a[q][q] = Complex64::new(a[q][q].re, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// A fixed 4×4 unitary: product of a DFT matrix and a diagonal phase.
    fn fixed_unitary() -> Matrix<4> {
        let mut u = zeros::<4>();
        for j in 0..4 {
            for k in 0..4 {
                let angle = std::f64::consts::PI * 0.5 * (j * k) as f64 + 0.3 * k as f64;
                u[j][k] = Complex64::from_polar(0.5, angle);
            }
        }
        u
    }

    #[test]
    fn unitary_is_unitary() {
        let u = fixed_unitary();
        let prod = matmul(&u, &adjoint(&u));
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((prod[i][j] - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn recovers_rotated_diagonal() {
        let u = fixed_unitary();
        let mut d = zeros::<4>();
        for (i, x) in [4.0, 3.0, 2.0, 1.0].into_iter().enumerate() {
            d[i][i] = c(x, 0.0);
        }
        let m = matmul(&matmul(&u, &d), &adjoint(&u));
        let eig = eigh(&m).unwrap();
        for (got, want) in eig.values.iter().zip([4.0, 3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{:?}", eig.values);
        }
        let rebuilt = eig.map_values(|x| x);
        let mut diff = zeros::<4>();
        for i in 0..4 {
            for j in 0..4 {
                diff[i][j] = rebuilt[i][j] - m[i][j];
            }
        }
        assert!(frobenius(&diff) <= 1e-12 * frobenius(&m));
    }

    #[test]
    fn identity_and_zero() {
        let eig = eigh(&identity::<4>()).unwrap();
        assert_eq!(eig.values, [1.0; 4]);
        let eig = eigh(&zeros::<3>()).unwrap();
        assert_eq!(eig.values, [0.0; 3]);
    }

    #[test]
    fn complex_two_by_two() {
        // [[2, 1-i], [1+i, 3]] has eigenvalues 1 and 4
        let m = [[c(2.0, 0.0), c(1.0, -1.0)], [c(1.0, 1.0), c(3.0, 0.0)]];
        let eig = eigh(&m).unwrap();
        assert!((eig.values[0] - 4.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_values_of_rotated_diagonal() {
        // U·diag(3, 2, 1e-12, 0)·V† with V = U·diag(phases)
        let u = fixed_unitary();
        let mut d = zeros::<4>();
        for (i, x) in [3.0, 2.0, 1e-12, 0.0].into_iter().enumerate() {
            d[i][i] = Complex64::from_polar(x, 0.4 * i as f64);
        }
        let m = matmul(&matmul(&u, &d), &adjoint(&u));
        let s = singular_values(&m).unwrap();
        for (got, want) in s.iter().zip([3.0, 2.0, 1e-12, 0.0]) {
            assert!((got - want).abs() < 1e-15 * 3.0 * 4.0, "{s:?}");
        }
    }

    #[test]
    fn singular_values_non_normal() {
        // [[1, 1], [0, 1]] has singular values (√5 ± 1)/2
        let m = [[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        let s = singular_values(&m).unwrap();
        assert!((s[0] - (5f64.sqrt() + 1.0) / 2.0).abs() < 1e-15);
        assert!((s[1] - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn hermiticity_defect_detects_asymmetry() {
        let mut m = identity::<2>();
        m[0][1] = c(0.0, 1.0);
        m[1][0] = c(0.0, 1.0);
        assert!((hermiticity_defect(&m) - 2.0).abs() < 1e-15);
    }
}

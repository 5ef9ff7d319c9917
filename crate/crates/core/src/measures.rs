//! Mixedness and entanglement measures: normalized linear entropy and
//! Wootters concurrence.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationValue;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::states::{DensityMatrix2, DensityMatrix4, PairAmplitudes};

/// Eigenvalues more negative than this are treated as a genuinely invalid
/// state rather than rounding noise.
pub const CLAMP_THRESHOLD: f64 = -1e-9;
const HERMITIAN_INPUT_TOL: f64 = 1e-10;

/// Eigenvalues of a 4×4 Hermitian matrix in non-increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSpectrum4(pub [f64; 4]);

impl EigenSpectrum4 {
    /// Clamps rounding noise to zero; fails on anything below
    /// [`CLAMP_THRESHOLD`].
    pub fn clamped(&self) -> Result<[f64; 4]> {
        let mut out = self.0;
        for x in &mut out {
            if *x < CLAMP_THRESHOLD {
                return Err(Error::InvalidDensityMatrix(format!(
                    "eigenvalue {x:e} is negative"
                )));
            }
            *x = x.max(0.0);
        }
        Ok(out)
    }
}

pub fn eigvals_hermitian_4(m: &Matrix<4>) -> Result<EigenSpectrum4> {
    let defect = linalg::hermiticity_defect(m);
    if defect > HERMITIAN_INPUT_TOL {
        return Err(Error::InvalidDensityMatrix(format!(
            "not Hermitian (defect {defect:e})"
        )));
    }
    Ok(EigenSpectrum4(linalg::eigh(m)?.values))
}

/// Tr(ρ)² − Tr(ρ²) for Hermitian ρ, summed as principal 2×2 minors so that
/// pure channel outputs give an exact zero.
fn purity_deficit<const N: usize>(m: &Matrix<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in (i + 1)..N {
            s += m[i][i].re * m[j][j].re - m[i][j].norm_sqr();
        }
    }
    2.0 * s
}

/// S_L = 2[1 − Tr(ρ²)], in [0, 1].
pub fn linear_entropy_2(rho: &DensityMatrix2) -> f64 {
    (2.0 * purity_deficit(rho.entries())).clamp(0.0, 1.0)
}

/// S_L = (4/3)[1 − Tr(ρ²)], in [0, 1].
pub fn linear_entropy_4(rho: &DensityMatrix4) -> f64 {
    (4.0 / 3.0 * purity_deficit(rho.entries())).clamp(0.0, 1.0)
}

/// σ_y ⊗ σ_y with σ_y = [[0, −i], [i, 0]]; real in this basis.
fn spin_flip(m: &Matrix<4>) -> Matrix<4> {
    const YY: [[f64; 4]; 4] = [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ];
    let mut yy = linalg::zeros::<4>();
    let mut conj = linalg::zeros::<4>();
    for i in 0..4 {
        for j in 0..4 {
            yy[i][j] = Complex64::new(YY[i][j], 0.0);
            conj[i][j] = m[i][j].conj();
        }
    }
    linalg::matmul(&linalg::matmul(&yy, &conj), &yy)
}

/// Wootters concurrence max{0, √λ₁ − √λ₂ − √λ₃ − √λ₄}.
///
/// The λᵢ are the eigenvalues of the Hermitian matrix √ρ·ρ̃·√ρ, which shares
/// its spectrum with ρρ̃. Since √ρ·ρ̃·√ρ = X·X† with X = √ρ·√ρ̃, the √λᵢ are
/// taken directly as singular values of X; square-rooting eigenvalues would
/// turn rounding noise near zero into errors of order √ε. Results within a
/// few ulps of 0 or 1 are snapped.
pub fn concurrence(rho: &DensityMatrix4) -> Result<f64> {
    let m = rho.entries();
    let eig = linalg::eigh(m)?;
    EigenSpectrum4(eig.values).clamped()?;
    let sqrt_rho = eig.map_values(|x| x.max(0.0).sqrt());
    let x = linalg::matmul(&sqrt_rho, &spin_flip(&sqrt_rho));
    let s = linalg::singular_values(&x)?;
    let c = s[0] - s[1] - s[2] - s[3];
    Ok(snap_unit(c))
}

fn snap_unit(x: f64) -> f64 {
    const ULPS: f64 = 8.0 * f64::EPSILON;
    if x <= ULPS {
        0.0
    } else if x >= 1.0 - ULPS {
        1.0
    } else {
        x
    }
}

/// C = 2|a||b||G| for the channel output of a|HH⟩ + b|VV⟩.
pub fn concurrence_closed(amps: &PairAmplitudes, g: CorrelationValue) -> f64 {
    snap_unit(2.0 * amps.a().norm() * amps.b().norm() * g.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{evolve_pair, evolve_single, SingleAmplitudes};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> DensityMatrix4 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix4::pure([c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap()
    }

    #[test]
    fn entropy_single() {
        let amps = SingleAmplitudes::from_population(0.5).unwrap();
        let pure = evolve_single(&amps, CorrelationValue::ONE).unwrap();
        assert_eq!(linear_entropy_2(&pure), 0.0);
        let mixed = evolve_single(&amps, CorrelationValue::ZERO).unwrap();
        assert_eq!(linear_entropy_2(&mixed), 1.0);
        let partial = evolve_single(&amps, CorrelationValue::new((-0.25f64).exp(), 0.0)).unwrap();
        // 2[1 − Tr ρ²] computed directly from the entries
        let m = partial.entries();
        let tr_sq: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
        let direct = 2.0 * (1.0 - tr_sq);
        let expected = 1.0 - (-0.5f64).exp();
        assert!((direct - expected).abs() < 1e-12);
        assert!((linear_entropy_2(&partial) - expected).abs() < 1e-12);
        assert!((expected - 0.393_469_340_287_366_6).abs() < 1e-15);
    }

    #[test]
    fn entropy_pair() {
        assert_eq!(linear_entropy_4(&bell()), 0.0);
        let amps = PairAmplitudes::from_population(0.5).unwrap();
        let dephased = evolve_pair(&amps, CorrelationValue::ZERO).unwrap();
        assert!((linear_entropy_4(&dephased) - 2.0 / 3.0).abs() < 1e-15);
        let mut id = linalg::zeros::<4>();
        for (i, row) in id.iter_mut().enumerate() {
            row[i] = c(0.25, 0.0);
        }
        assert_eq!(linear_entropy_4(&DensityMatrix4::new(id).unwrap()), 1.0);
    }

    #[test]
    fn concurrence_bell_and_mixture() {
        assert_eq!(concurrence(&bell()).unwrap(), 1.0);
        let amps = PairAmplitudes::from_population(0.5).unwrap();
        let mix = evolve_pair(&amps, CorrelationValue::ZERO).unwrap();
        assert_eq!(concurrence(&mix).unwrap(), 0.0);
        let one = evolve_pair(&amps, CorrelationValue::ONE).unwrap();
        assert_eq!(concurrence(&one).unwrap(), 1.0);
    }

    #[test]
    fn concurrence_routes_agree() {
        let amps = PairAmplitudes::from_population(0.5).unwrap();
        let g = CorrelationValue::new((-1.0f64).exp(), 0.0);
        let rho = evolve_pair(&amps, g).unwrap();
        let eig = concurrence(&rho).unwrap();
        assert!((eig - 0.367_879_441_171_442_3).abs() < 1e-12);
        assert!((concurrence_closed(&amps, g) - eig).abs() < 1e-12);

        let amps = PairAmplitudes::from_population(0.8).unwrap();
        let g = CorrelationValue(Complex64::from_polar(0.5, -0.7));
        let closed = concurrence_closed(&amps, g);
        assert!((closed - 0.4).abs() < 1e-15);
        let rho = evolve_pair(&amps, g).unwrap();
        assert!((concurrence(&rho).unwrap() - closed).abs() < 1e-12);
    }

    #[test]
    fn concurrence_accurate_near_pure() {
        for a2 in [0.5, 0.3, 0.99] {
            let amps = PairAmplitudes::from_population(a2).unwrap();
            for gap in [0.0, 1e-16, 1e-12, 1e-8, 1e-4] {
                let g = CorrelationValue(Complex64::from_polar(1.0 - gap, 0.3));
                let rho = evolve_pair(&amps, g).unwrap();
                let c = concurrence(&rho).unwrap();
                assert!(
                    (c - concurrence_closed(&amps, g)).abs() < 1e-14,
                    "a2={a2} gap={gap}: {c}"
                );
            }
        }
    }

    #[test]
    fn product_state_has_no_concurrence() {
        let amps = PairAmplitudes::from_population(1.0).unwrap();
        assert_eq!(concurrence_closed(&amps, CorrelationValue::ONE), 0.0);
        let rho = evolve_pair(&amps, CorrelationValue::ONE).unwrap();
        assert_eq!(concurrence(&rho).unwrap(), 0.0);
    }

    #[test]
    fn werner_state() {
        // p|Ψ⁻⟩⟨Ψ⁻| + (1 − p)I/4 has C = max(0, (3p − 1)/2)
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)];
        for p in [0.1, 1.0 / 3.0, 0.5, 0.9] {
            let mut m = linalg::zeros::<4>();
            for i in 0..4 {
                for j in 0..4 {
                    m[i][j] = p * psi[i] * psi[j].conj();
                }
                m[i][i] += (1.0 - p) / 4.0;
            }
            let rho = DensityMatrix4::new(m).unwrap();
            let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!(
                (concurrence(&rho).unwrap() - expected).abs() < 1e-12,
                "p={p}"
            );
        }
    }

    #[test]
    fn eigvals_examples() {
        assert_eq!(
            eigvals_hermitian_4(&linalg::identity()).unwrap().0,
            [1.0; 4]
        );
        let b = eigvals_hermitian_4(bell().entries()).unwrap();
        assert!((b.0[0] - 1.0).abs() < 1e-15);
        assert!(b.0[1..].iter().all(|x| x.abs() < 1e-15));
        let mut bad = linalg::identity::<4>();
        bad[0][1] = c(1e-6, 0.0);
        assert!(eigvals_hermitian_4(&bad).is_err());
    }

    #[test]
    fn clamping_rule() {
        assert_eq!(
            EigenSpectrum4([1.0, 0.0, -1e-12, -5e-10])
                .clamped()
                .unwrap(),
            [1.0, 0.0, 0.0, 0.0]
        );
        assert!(EigenSpectrum4([1.0, 0.0, 0.0, -2e-9]).clamped().is_err());
    }
}

//! Polarization states and the phase-damping channel.
//!
//! Two-qubit matrices use the basis order (HH, HV, VH, VV).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationValue;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
const CORRELATION_BOUND: f64 = 1.0 + 1e-12;

fn check_normalized(x: Complex64, y: Complex64) -> Result<()> {
    let n = x.norm_sqr() + y.norm_sqr();
    if (n - 1.0).abs() <= NORMALIZATION_TOL {
        Ok(())
    } else {
        Err(Error::NotNormalized(n))
    }
}

fn amplitudes_from_population(p: f64) -> Result<(Complex64, Complex64)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::NotNormalized(p));
    }
    Ok((
        Complex64::new(p.sqrt(), 0.0),
        Complex64::new((1.0 - p).sqrt(), 0.0),
    ))
}

/// α|H⟩ + β|V⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleAmplitudes {
    alpha: Complex64,
    beta: Complex64,
}

impl SingleAmplitudes {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        check_normalized(alpha, beta)?;
        Ok(SingleAmplitudes { alpha, beta })
    }

    /// Real amplitudes with |α|² = `alpha2`.
    pub fn from_population(alpha2: f64) -> Result<Self> {
        let (alpha, beta) = amplitudes_from_population(alpha2)?;
        Ok(SingleAmplitudes { alpha, beta })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }
}

/// a|HH⟩ + b|VV⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairAmplitudes {
    a: Complex64,
    b: Complex64,
}

impl PairAmplitudes {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        check_normalized(a, b)?;
        Ok(PairAmplitudes { a, b })
    }

    /// Real amplitudes with |a|² = `a2`.
    pub fn from_population(a2: f64) -> Result<Self> {
        let (a, b) = amplitudes_from_population(a2)?;
        Ok(PairAmplitudes { a, b })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }
}

fn validate<const N: usize>(m: &Matrix<N>) -> Result<()> {
    if m.iter()
        .flatten()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
    }
    let defect = linalg::hermiticity_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(Error::InvalidDensityMatrix(format!(
            "not Hermitian (defect {defect:e})"
        )));
    }
    let tr = linalg::trace(m);
    if (tr - 1.0).norm() > TRACE_TOL {
        return Err(Error::InvalidDensityMatrix(format!("trace {tr} is not 1")));
    }
    let min = linalg::eigh(m)?.values[N - 1];
    if min < -PSD_TOL {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {min:e}"
        )));
    }
    Ok(())
}

fn check_correlation(f: CorrelationValue) -> Result<()> {
    let modulus = f.abs();
    if modulus <= CORRELATION_BOUND {
        Ok(())
    } else {
        Err(Error::CorrelationOutOfRange(modulus))
    }
}

/// Single-qubit polarization density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2(Matrix<2>);

impl DensityMatrix2 {
    /// Validated construction: Hermitian, unit trace and positive
    /// semidefinite within the crate tolerances.
    pub fn new(entries: Matrix<2>) -> Result<Self> {
        validate(&entries)?;
        Ok(DensityMatrix2(entries))
    }

    pub fn entries(&self) -> &Matrix<2> {
        &self.0
    }

    pub fn validate(&self) -> Result<()> {
        validate(&self.0)
    }

    /// Passes the state through one more channel with correlation `f`.
    pub fn dephase(&self, f: CorrelationValue) -> Result<Self> {
        check_correlation(f)?;
        let mut m = self.0;
        m[0][1] *= f.0.conj();
        m[1][0] *= f.0;
        Ok(DensityMatrix2(m))
    }
}

/// Two-qubit polarization density matrix, basis (HH, HV, VH, VV).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(Matrix<4>);

impl DensityMatrix4 {
    pub fn new(entries: Matrix<4>) -> Result<Self> {
        validate(&entries)?;
        Ok(DensityMatrix4(entries))
    }

    pub fn entries(&self) -> &Matrix<4> {
        &self.0
    }

    pub fn validate(&self) -> Result<()> {
        validate(&self.0)
    }

    /// |ψ⟩⟨ψ| for a normalized 4-component state vector.
    pub fn pure(psi: [Complex64; 4]) -> Result<Self> {
        let mut m = linalg::zeros::<4>();
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = psi[i] * psi[j].conj();
            }
        }
        Self::new(m)
    }
}

/// Output of the channel for α|H⟩ + β|V⟩:
/// `[[|α|², αβ*F*], [α*βF, |β|²]]`.
pub fn evolve_single(amps: &SingleAmplitudes, f: CorrelationValue) -> Result<DensityMatrix2> {
    check_normalized(amps.alpha, amps.beta)?;
    check_correlation(f)?;
    let (alpha, beta) = (amps.alpha, amps.beta);
    let coherence = alpha * beta.conj() * f.0.conj();
    Ok(DensityMatrix2([
        [Complex64::new(alpha.norm_sqr(), 0.0), coherence],
        [coherence.conj(), Complex64::new(beta.norm_sqr(), 0.0)],
    ]))
}

/// Output for a|HH⟩ + b|VV⟩ when only photon 1 crosses the crystal: only the
/// four corner entries survive, with coherence `ab*G*`.
pub fn evolve_pair(amps: &PairAmplitudes, g: CorrelationValue) -> Result<DensityMatrix4> {
    check_normalized(amps.a, amps.b)?;
    check_correlation(g)?;
    let (a, b) = (amps.a, amps.b);
    let coherence = a * b.conj() * g.0.conj();
    let mut m = linalg::zeros::<4>();
    m[0][0] = Complex64::new(a.norm_sqr(), 0.0);
    m[3][3] = Complex64::new(b.norm_sqr(), 0.0);
    m[0][3] = coherence;
    m[3][0] = coherence.conj();
    Ok(DensityMatrix4(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_channel_gives_plus_state() {
        let amps = SingleAmplitudes::from_population(0.5).unwrap();
        let rho = evolve_single(&amps, CorrelationValue::ONE).unwrap();
        for z in rho.entries().iter().flatten() {
            assert!((z - 0.5).norm() < 1e-15);
        }
    }

    #[test]
    fn full_dephasing() {
        let amps = SingleAmplitudes::from_population(0.5).unwrap();
        let rho = evolve_single(&amps, CorrelationValue::ZERO).unwrap();
        let m = rho.entries();
        assert!((m[0][0].re - 0.5).abs() < 1e-15 && (m[1][1].re - 0.5).abs() < 1e-15);
        assert_eq!(m[0][1], c(0.0, 0.0));
        assert_eq!(m[1][0], c(0.0, 0.0));
    }

    #[test]
    fn pure_horizontal_unaffected() {
        let amps = SingleAmplitudes::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let rho = evolve_single(&amps, CorrelationValue::new(0.3, -0.2)).unwrap();
        assert_eq!(rho.entries()[0][0], c(1.0, 0.0));
        assert_eq!(rho.entries()[1][1], c(0.0, 0.0));
        assert_eq!(rho.entries()[0][1], c(0.0, 0.0));
    }

    #[test]
    fn coherence_carries_phases() {
        let alpha = Complex64::from_polar(0.6, 0.4);
        let beta = Complex64::from_polar(0.8, -1.1);
        let amps = SingleAmplitudes::new(alpha, beta).unwrap();
        let f = CorrelationValue(Complex64::from_polar(0.5, 0.9));
        let rho = evolve_single(&amps, f).unwrap();
        let expected = alpha * beta.conj() * f.0.conj();
        assert_eq!(rho.entries()[0][1], expected);
        assert_eq!(rho.entries()[1][0], expected.conj());
        rho.validate().unwrap();
    }

    #[test]
    fn bell_projector() {
        let amps = PairAmplitudes::from_population(0.5).unwrap();
        let rho = evolve_pair(&amps, CorrelationValue::ONE).unwrap();
        let m = rho.entries();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((m[i][j] - 0.5).norm() < 1e-15);
        }
        for (i, row) in m.iter().enumerate() {
            for (j, &z) in row.iter().enumerate() {
                if (1..3).contains(&i) || (1..3).contains(&j) {
                    assert_eq!(z, c(0.0, 0.0));
                }
            }
        }
        rho.validate().unwrap();
    }

    #[test]
    fn pair_fully_dephased() {
        let amps = PairAmplitudes::from_population(0.5).unwrap();
        let rho = evolve_pair(&amps, CorrelationValue::ZERO).unwrap();
        assert_eq!(rho.entries()[0][3], c(0.0, 0.0));
        assert!((rho.entries()[3][3].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pair_corner_magnitude() {
        let amps = PairAmplitudes::from_population(0.8).unwrap();
        let g = CorrelationValue(Complex64::from_polar(0.5, 2.0));
        let rho = evolve_pair(&amps, g).unwrap();
        // |ab*G| = √0.8·√0.2·0.5 = 0.2
        assert!((rho.entries()[0][3].norm() - 0.2).abs() < 1e-15);
        assert!((rho.entries()[3][0].norm() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized_and_out_of_range() {
        assert!(matches!(
            SingleAmplitudes::new(c(1.0, 0.0), c(1.0, 0.0)),
            Err(Error::NotNormalized(_))
        ));
        assert!(PairAmplitudes::from_population(1.5).is_err());
        assert!(PairAmplitudes::from_population(-0.1).is_err());
        let amps = SingleAmplitudes::from_population(0.3).unwrap();
        assert!(matches!(
            evolve_single(&amps, CorrelationValue::new(1.1, 0.0)),
            Err(Error::CorrelationOutOfRange(_))
        ));
    }

    #[test]
    fn channel_composes_exactly() {
        // dyadic values keep every product exact
        let amps = SingleAmplitudes::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let f1 = CorrelationValue::new(0.5, 0.25);
        let f2 = CorrelationValue::new(-0.75, 0.5);
        let once = evolve_single(&amps, f1 * f2).unwrap();
        let twice = evolve_single(&amps, f1).unwrap().dephase(f2).unwrap();
        assert_eq!(once.entries()[0][0], twice.entries()[0][0]);
        assert_eq!(once.entries()[1][1], twice.entries()[1][1]);
        assert!((once.entries()[0][1] - twice.entries()[0][1]).norm() < 1e-16);
    }

    #[test]
    fn validation_catches_bad_matrices() {
        let mut m = linalg::zeros::<2>();
        m[0][0] = c(0.7, 0.0);
        m[1][1] = c(0.3, 0.0);
        DensityMatrix2::new(m).unwrap();
        m[0][1] = c(0.1, 0.0);
        assert!(DensityMatrix2::new(m).is_err()); // not Hermitian
        m[1][0] = c(0.1, 0.0);
        DensityMatrix2::new(m).unwrap();
        m[0][1] = c(0.6, 0.0);
        m[1][0] = c(0.6, 0.0);
        assert!(DensityMatrix2::new(m).is_err()); // negative eigenvalue
        let mut t = linalg::identity::<4>();
        assert!(DensityMatrix4::new(t).is_err()); // trace 4
        for (i, row) in t.iter_mut().enumerate() {
            row[i] = c(0.25, 0.0);
        }
        DensityMatrix4::new(t).unwrap();
    }
}

//! The complex correlation F(l) = ∫ dν F(ν) exp(iνΔn·l/c).
//!
//! Two independent routes are provided: [`closed_form`] evaluates the
//! analytic Fourier transform of each family, and [`quadrature`] integrates
//! the density numerically. They share nothing beyond the spectrum
//! parameters, so agreement between them is a meaningful check.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, AdaptiveOptions, Estimate};
use crate::spectra::{Power, Sample, SpectrumEnvelope};

/// m/s
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Relative tolerance used when none is requested.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const MIN_TOLERANCE: f64 = 1e-13;
pub const MAX_TOLERANCE: f64 = 1e-6;

/// Gaussian-type integrands are cut off this many widths beyond the outer peaks.
const GAUSSIAN_CUTOFF: f64 = 10.0;
/// Lorentzian-type integrands are integrated on the real axis this many
/// widths beyond the outer peaks; the rest goes along a rotated contour.
const LORENTZIAN_CORE: f64 = 20.0;
/// Above this dimensionless delay, initial panels span at most half a period.
const OSCILLATORY_THRESHOLD: f64 = 20.0;
const MAX_PANELS: usize = 400_000;

/// Birefringent crystal, parameterized by Δn = n_V − n_H.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    delta_n: f64,
}

impl ChannelParams {
    pub fn new(delta_n: f64) -> Result<Self> {
        if delta_n.is_finite() && delta_n > 0.0 {
            Ok(ChannelParams { delta_n })
        } else {
            Err(Error::InvalidChannel(format!(
                "Δn must be positive and finite, got {delta_n}"
            )))
        }
    }

    /// Channel whose composite `k = Δn·Δω/c` (1/m) takes the given value for
    /// an envelope of width `width` (rad/s).
    pub fn from_k(k: f64, width: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidChannel(format!(
                "k must be positive and finite, got {k}"
            )));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidChannel(format!(
                "width must be positive and finite, got {width}"
            )));
        }
        Self::new(k * SPEED_OF_LIGHT / width)
    }

    pub fn delta_n(&self) -> f64 {
        self.delta_n
    }

    /// Δn·Δω/c in 1/m.
    pub fn k(&self, width: f64) -> f64 {
        self.delta_n * width / SPEED_OF_LIGHT
    }

    /// Group delay Δn·l/c between the polarizations, in seconds.
    pub fn delay(&self, length: f64) -> f64 {
        self.delta_n * length / SPEED_OF_LIGHT
    }
}

/// The complex factor multiplying the coherence after length `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "ReIm", into = "ReIm")]
pub struct CorrelationValue(pub Complex64);

#[derive(Serialize, Deserialize)]
struct ReIm {
    re: f64,
    im: f64,
}

impl From<ReIm> for CorrelationValue {
    fn from(v: ReIm) -> Self {
        CorrelationValue(Complex64::new(v.re, v.im))
    }
}

impl From<CorrelationValue> for ReIm {
    fn from(v: CorrelationValue) -> Self {
        ReIm {
            re: v.0.re,
            im: v.0.im,
        }
    }
}

impl CorrelationValue {
    pub const ONE: CorrelationValue = CorrelationValue(Complex64::new(1.0, 0.0));
    pub const ZERO: CorrelationValue = CorrelationValue(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        CorrelationValue(Complex64::new(re, im))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn abs(&self) -> f64 {
        self.0.norm()
    }

    pub fn conj(&self) -> Self {
        CorrelationValue(self.0.conj())
    }
}

impl From<Complex64> for CorrelationValue {
    fn from(z: Complex64) -> Self {
        CorrelationValue(z)
    }
}

impl std::ops::Mul for CorrelationValue {
    type Output = CorrelationValue;
    fn mul(self, rhs: Self) -> Self {
        CorrelationValue(self.0 * rhs.0)
    }
}

impl fmt::Display for CorrelationValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.0.re, self.0.im)
    }
}

/// exp(iω_ref·Δn·l/c): the phase dropped by working in detunings from ω_ref.
pub fn carrier_phase(reference_frequency: f64, channel: &ChannelParams, length: f64) -> Complex64 {
    Complex64::from_polar(1.0, reference_frequency * channel.delay(length))
}

fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

fn gaussian_envelope(u: f64, power: Power) -> f64 {
    match power {
        Power::Single => (-0.25 * u * u).exp(),
        Power::Squared => (-0.125 * u * u).exp(),
    }
}

fn lorentzian_envelope(u: f64, power: Power) -> f64 {
    let u = u.abs();
    match power {
        Power::Single => (-u).exp(),
        Power::Squared => (1.0 + u) * (-u).exp(),
    }
}

/// Analytic correlation for every family except `Tabulated`.
///
/// The white spectrum is the idealized delta correlation: exactly one at
/// `l = 0` and zero everywhere else.
pub fn closed_form(
    spectrum: &SpectrumEnvelope,
    channel: &ChannelParams,
    length: f64,
) -> Result<CorrelationValue> {
    let tau = channel.delay(length);
    let z = match *spectrum {
        SpectrumEnvelope::White => {
            return Ok(if length == 0.0 {
                CorrelationValue::ONE
            } else {
                CorrelationValue::ZERO
            })
        }
        SpectrumEnvelope::Tabulated { .. } => return Err(Error::TabulatedNeedsQuadrature),
        SpectrumEnvelope::Gaussian {
            center,
            width,
            power,
        } => gaussian_envelope(width * tau, power) * cis(center * tau),
        SpectrumEnvelope::Lorentzian {
            center,
            width,
            power,
        } => lorentzian_envelope(width * tau, power) * cis(center * tau),
        SpectrumEnvelope::Rectangular { center, width } => sinc(width * tau) * cis(center * tau),
        SpectrumEnvelope::MultiDelta { ref peaks } => {
            peaks.iter().map(|p| p.weight * cis(p.detuning * tau)).sum()
        }
        SpectrumEnvelope::DoubleGaussian {
            center,
            width,
            separation,
            power,
        } => {
            gaussian_envelope(width * tau, power)
                * (0.5 * separation * tau).cos()
                * cis(center * tau)
        }
        SpectrumEnvelope::DoubleLorentzian {
            center,
            width,
            separation,
            power,
        } => {
            lorentzian_envelope(width * tau, power)
                * (0.5 * separation * tau).cos()
                * cis(center * tau)
        }
    };
    Ok(CorrelationValue(z))
}

/// Numerical correlation to absolute accuracy `tol` (relative to the unit
/// mass of the density).
///
/// Smooth families use adaptive Gauss–Kronrod on the real axis. The
/// Lorentzian families keep a finite core on the real axis and integrate
/// their algebraic tails along vertical contours in the half plane where
/// the Fourier kernel decays. Multi-delta combs are summed exactly and
/// tabulated densities are integrated exactly per linear segment.
pub fn quadrature(
    spectrum: &SpectrumEnvelope,
    channel: &ChannelParams,
    length: f64,
    tol: f64,
) -> Result<CorrelationValue> {
    if !(MIN_TOLERANCE..=MAX_TOLERANCE).contains(&tol) {
        return Err(Error::InvalidTolerance(tol));
    }
    let tau = channel.delay(length);
    match spectrum {
        SpectrumEnvelope::White => Err(Error::WhiteIsSingular),
        SpectrumEnvelope::MultiDelta { peaks } => Ok(CorrelationValue(
            peaks.iter().map(|p| p.weight * cis(p.detuning * tau)).sum(),
        )),
        SpectrumEnvelope::Tabulated { samples } => Ok(CorrelationValue(filon_linear(samples, tau))),
        SpectrumEnvelope::Rectangular { center, width } => {
            let breaks = [center - width, *center, center + width];
            real_axis(spectrum, tau, *width, &breaks, tol)
        }
        SpectrumEnvelope::Gaussian { center, width, .. } => {
            let breaks = [
                center - GAUSSIAN_CUTOFF * width,
                *center,
                center + GAUSSIAN_CUTOFF * width,
            ];
            real_axis(spectrum, tau, *width, &breaks, tol)
        }
        SpectrumEnvelope::DoubleGaussian {
            center,
            width,
            separation,
            ..
        } => {
            let (p1, p2) = (center - 0.5 * separation, center + 0.5 * separation);
            let breaks = [
                p1 - GAUSSIAN_CUTOFF * width,
                p1,
                p2,
                p2 + GAUSSIAN_CUTOFF * width,
            ];
            real_axis(spectrum, tau, *width, &dedup(&breaks), tol)
        }
        SpectrumEnvelope::Lorentzian { center, width, .. } => {
            lorentzian_type(spectrum, tau, *width, *center, *center, tol)
        }
        SpectrumEnvelope::DoubleLorentzian {
            center,
            width,
            separation,
            ..
        } => {
            let (p1, p2) = (center - 0.5 * separation, center + 0.5 * separation);
            lorentzian_type(spectrum, tau, *width, p1, p2, tol)
        }
    }
}

fn dedup(breaks: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(breaks.len());
    for &b in breaks {
        if out.last().is_none_or(|&last| b > last) {
            out.push(b);
        }
    }
    out
}

fn options(tau: f64, width: f64, tol: f64) -> AdaptiveOptions {
    let max_panel_width = if (width * tau).abs() > OSCILLATORY_THRESHOLD {
        Some(PI / tau.abs())
    } else {
        None
    };
    AdaptiveOptions {
        abs_tol: tol,
        max_panels: MAX_PANELS,
        max_panel_width,
    }
}

fn not_converged(best: Estimate) -> Error {
    Error::NotConverged {
        re: best.value.re,
        im: best.value.im,
        error: best.error,
    }
}

fn real_axis(
    spectrum: &SpectrumEnvelope,
    tau: f64,
    width: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<CorrelationValue> {
    let integrand = |nu: f64| spectrum.evaluate(nu).expect("has density") * cis(nu * tau);
    integrate(integrand, breaks, &options(tau, width, tol))
        .map(|e| CorrelationValue(e.value))
        .map_err(not_converged)
}

fn lorentzian_type(
    spectrum: &SpectrumEnvelope,
    tau: f64,
    width: f64,
    first_peak: f64,
    last_peak: f64,
    tol: f64,
) -> Result<CorrelationValue> {
    let left = first_peak - LORENTZIAN_CORE * width;
    let right = last_peak + LORENTZIAN_CORE * width;
    let breaks = dedup(&[left, first_peak, last_peak, right]);
    let core = real_axis(spectrum, tau, width, &breaks, 0.5 * tol)?;

    // Vertical contour from the cut point into the half plane where
    // exp(iντ) decays; no poles lie beyond the cut points. The path
    // parameter t ∈ [0, ∞) is mapped to s ∈ (0, 1] by t = Δω(1 − s)/s.
    let sigma = if tau < 0.0 { -1.0 } else { 1.0 };
    let rotated = |start: f64| -> Result<Complex64> {
        let integrand = |s: f64| {
            let t = width * (1.0 - s) / s;
            let z = Complex64::new(start, sigma * t);
            let density = spectrum.analytic_density(z).expect("lorentzian family");
            density * (-tau.abs() * t).exp() * (width / (s * s))
        };
        let opts = AdaptiveOptions {
            abs_tol: 0.25 * tol,
            max_panels: MAX_PANELS,
            max_panel_width: None,
        };
        integrate(integrand, &[0.0, 1.0], &opts)
            .map(|e| e.value)
            .map_err(not_converged)
    };
    let i_sigma = Complex64::new(0.0, sigma);
    let right_tail = i_sigma * cis(tau * right) * rotated(right)?;
    let left_tail = -i_sigma * cis(tau * left) * rotated(left)?;
    Ok(CorrelationValue(core.0 + right_tail + left_tail))
}

/// ∫₀¹ (1 − t) e^{iθt} dt and ∫₀¹ t e^{iθt} dt.
fn linear_weights(theta: f64) -> (Complex64, Complex64) {
    if theta.abs() < 0.5 {
        let i_theta = Complex64::new(0.0, theta);
        let mut term = Complex64::new(1.0, 0.0);
        let (mut w0, mut w1) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for n in 0..24 {
            let nf = n as f64;
            w0 += term / ((nf + 1.0) * (nf + 2.0));
            w1 += term / (nf + 2.0);
            term *= i_theta / (nf + 1.0);
        }
        (w0, w1)
    } else {
        let e = cis(theta);
        let i_theta = Complex64::new(0.0, theta);
        let total = (e - 1.0) / i_theta;
        let w1 = e / i_theta + (e - 1.0) / (theta * theta);
        (total - w1, w1)
    }
}

/// Exact Fourier integral of the piecewise-linear interpolant (Filon-type
/// rule with linear density and analytic phase).
fn filon_linear(samples: &[Sample], tau: f64) -> Complex64 {
    samples
        .windows(2)
        .map(|w| {
            let h = w[1].detuning - w[0].detuning;
            let (w0, w1) = linear_weights(tau * h);
            h * cis(tau * w[0].detuning) * (w[0].density * w0 + w[1].density * w1)
        })
        .sum()
}

//! Frequency-spectrum envelopes.
//!
//! Every envelope is expressed in detuning coordinates `ν = ω − ω_ref`
//! (rad/s), so that optical carriers of order 1e15 rad/s never enter the
//! arithmetic. Densities are in s/rad and integrate to one, except for the
//! white spectrum which carries no density at all.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default peak separation of the double-Gaussian family, in widths.
pub const DOUBLE_GAUSSIAN_SEPARATION: f64 = 5.0;
/// Default peak separation of the double-Lorentzian family, in widths.
pub const DOUBLE_LORENTZIAN_SEPARATION: f64 = 30.0;

/// Header expected on tabulated spectrum CSV files.
pub const TABULATED_CSV_HEADER: [&str; 2] = ["detuning_rad_per_s", "density_s_per_rad"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    White,
    Gaussian,
    Lorentzian,
    Rectangular,
    MultiDelta,
    DoubleGaussian,
    DoubleLorentzian,
    Tabulated,
}

impl SpectrumKind {
    pub fn name(self) -> &'static str {
        match self {
            SpectrumKind::White => "white",
            SpectrumKind::Gaussian => "gaussian",
            SpectrumKind::Lorentzian => "lorentzian",
            SpectrumKind::Rectangular => "rectangular",
            SpectrumKind::MultiDelta => "multidelta",
            SpectrumKind::DoubleGaussian => "double_gaussian",
            SpectrumKind::DoubleLorentzian => "double_lorentzian",
            SpectrumKind::Tabulated => "tabulated",
        }
    }
}

impl fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent applied to the single-photon line shape.
///
/// `Squared` describes the two-photon down-conversion marginals, whose
/// density in ω₁ is proportional to the fourth power of the filter
/// amplitude, renormalized to unit area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Power {
    #[default]
    Single,
    Squared,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// rad/s
    pub detuning: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// rad/s
    pub detuning: f64,
    /// s/rad
    pub density: f64,
}

/// A normalized frequency density F(ν).
///
/// `center` is the peak detuning for single-peak families and the midpoint
/// between the two peaks for the double families. `width` is the 1/e
/// half-width for Gaussians, the HWHM for Lorentzians and the half-width of
/// the rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumEnvelope {
    White,
    Gaussian {
        center: f64,
        width: f64,
        power: Power,
    },
    Lorentzian {
        center: f64,
        width: f64,
        power: Power,
    },
    Rectangular {
        center: f64,
        width: f64,
    },
    MultiDelta {
        peaks: Vec<Peak>,
    },
    DoubleGaussian {
        center: f64,
        width: f64,
        separation: f64,
        power: Power,
    },
    DoubleLorentzian {
        center: f64,
        width: f64,
        separation: f64,
        power: Power,
    },
    Tabulated {
        samples: Vec<Sample>,
    },
}

fn check_width(width: f64) -> Result<()> {
    if width.is_finite() && width > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpectrum(format!(
            "width must be positive and finite, got {width}"
        )))
    }
}

fn check_center(center: f64) -> Result<()> {
    if center.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpectrum(format!(
            "center detuning must be finite, got {center}"
        )))
    }
}

impl SpectrumEnvelope {
    pub fn gaussian(center: f64, width: f64, power: Power) -> Result<Self> {
        check_center(center)?;
        check_width(width)?;
        Ok(SpectrumEnvelope::Gaussian {
            center,
            width,
            power,
        })
    }

    pub fn lorentzian(center: f64, width: f64, power: Power) -> Result<Self> {
        check_center(center)?;
        check_width(width)?;
        Ok(SpectrumEnvelope::Lorentzian {
            center,
            width,
            power,
        })
    }

    pub fn rectangular(center: f64, width: f64) -> Result<Self> {
        check_center(center)?;
        check_width(width)?;
        Ok(SpectrumEnvelope::Rectangular { center, width })
    }

    pub fn double_gaussian(center: f64, width: f64, separation: f64, power: Power) -> Result<Self> {
        check_center(center)?;
        check_width(width)?;
        check_separation(separation)?;
        Ok(SpectrumEnvelope::DoubleGaussian {
            center,
            width,
            separation,
            power,
        })
    }

    pub fn double_lorentzian(
        center: f64,
        width: f64,
        separation: f64,
        power: Power,
    ) -> Result<Self> {
        check_center(center)?;
        check_width(width)?;
        check_separation(separation)?;
        Ok(SpectrumEnvelope::DoubleLorentzian {
            center,
            width,
            separation,
            power,
        })
    }

    /// Equal-weight comb of delta peaks at the given detunings.
    pub fn multi_delta(detunings: &[f64]) -> Result<Self> {
        if detunings.is_empty() {
            return Err(Error::InvalidSpectrum(
                "multi-delta spectrum needs at least one peak".into(),
            ));
        }
        let weight = 1.0 / detunings.len() as f64;
        let peaks = detunings
            .iter()
            .map(|&detuning| Peak { detuning, weight })
            .collect();
        Self::multi_delta_weighted(peaks)
    }

    pub fn multi_delta_weighted(peaks: Vec<Peak>) -> Result<Self> {
        let spectrum = SpectrumEnvelope::MultiDelta { peaks };
        spectrum.validate()?;
        Ok(spectrum)
    }

    pub fn kind(&self) -> SpectrumKind {
        match self {
            SpectrumEnvelope::White => SpectrumKind::White,
            SpectrumEnvelope::Gaussian { .. } => SpectrumKind::Gaussian,
            SpectrumEnvelope::Lorentzian { .. } => SpectrumKind::Lorentzian,
            SpectrumEnvelope::Rectangular { .. } => SpectrumKind::Rectangular,
            SpectrumEnvelope::MultiDelta { .. } => SpectrumKind::MultiDelta,
            SpectrumEnvelope::DoubleGaussian { .. } => SpectrumKind::DoubleGaussian,
            SpectrumEnvelope::DoubleLorentzian { .. } => SpectrumKind::DoubleLorentzian,
            SpectrumEnvelope::Tabulated { .. } => SpectrumKind::Tabulated,
        }
    }

    pub fn power(&self) -> Power {
        match self {
            SpectrumEnvelope::Gaussian { power, .. }
            | SpectrumEnvelope::Lorentzian { power, .. }
            | SpectrumEnvelope::DoubleGaussian { power, .. }
            | SpectrumEnvelope::DoubleLorentzian { power, .. } => *power,
            _ => Power::Single,
        }
    }

    /// Envelope width Δω, when the family has one.
    pub fn width(&self) -> Option<f64> {
        match self {
            SpectrumEnvelope::Gaussian { width, .. }
            | SpectrumEnvelope::Lorentzian { width, .. }
            | SpectrumEnvelope::Rectangular { width, .. }
            | SpectrumEnvelope::DoubleGaussian { width, .. }
            | SpectrumEnvelope::DoubleLorentzian { width, .. } => Some(*width),
            _ => None,
        }
    }

    /// Detuning about which the density is mirror symmetric, if any.
    ///
    /// Multiplying the correlation by `exp(-i·ν_c·τ)` makes it real for
    /// symmetric spectra; the sweep uses this to bracket sign changes.
    pub fn symmetry_center(&self) -> Option<f64> {
        match self {
            SpectrumEnvelope::White => Some(0.0),
            SpectrumEnvelope::Gaussian { center, .. }
            | SpectrumEnvelope::Lorentzian { center, .. }
            | SpectrumEnvelope::Rectangular { center, .. }
            | SpectrumEnvelope::DoubleGaussian { center, .. }
            | SpectrumEnvelope::DoubleLorentzian { center, .. } => Some(*center),
            SpectrumEnvelope::MultiDelta { .. } | SpectrumEnvelope::Tabulated { .. } => None,
        }
    }

    /// Mean detuning ∫ν F(ν) dν. Zero for the white spectrum.
    pub fn mean_detuning(&self) -> f64 {
        if let Some(c) = self.symmetry_center() {
            return c;
        }
        match self {
            SpectrumEnvelope::MultiDelta { peaks } => {
                peaks.iter().map(|p| p.weight * p.detuning).sum()
            }
            SpectrumEnvelope::Tabulated { samples } => samples
                .windows(2)
                .map(|w| {
                    // exact integral of ν·p(ν) over a linear segment
                    let h = w[1].detuning - w[0].detuning;
                    h / 6.0
                        * (w[0].density * (2.0 * w[0].detuning + w[1].detuning)
                            + w[1].density * (w[0].detuning + 2.0 * w[1].detuning))
                })
                .sum(),
            _ => unreachable!(),
        }
    }

    /// Checks the invariants of the variant.
    pub fn validate(&self) -> Result<()> {
        match self {
            SpectrumEnvelope::White => Ok(()),
            SpectrumEnvelope::Gaussian { center, width, .. }
            | SpectrumEnvelope::Lorentzian { center, width, .. }
            | SpectrumEnvelope::Rectangular { center, width } => {
                check_center(*center)?;
                check_width(*width)
            }
            SpectrumEnvelope::DoubleGaussian {
                center,
                width,
                separation,
                ..
            }
            | SpectrumEnvelope::DoubleLorentzian {
                center,
                width,
                separation,
                ..
            } => {
                check_center(*center)?;
                check_width(*width)?;
                check_separation(*separation)
            }
            SpectrumEnvelope::MultiDelta { peaks } => {
                if peaks.is_empty() {
                    return Err(Error::InvalidSpectrum(
                        "multi-delta spectrum needs at least one peak".into(),
                    ));
                }
                if peaks
                    .iter()
                    .any(|p| !p.detuning.is_finite() || p.weight.is_nan() || p.weight < 0.0)
                {
                    return Err(Error::InvalidSpectrum(
                        "multi-delta peaks need finite detunings and non-negative weights".into(),
                    ));
                }
                let total: f64 = peaks.iter().map(|p| p.weight).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidSpectrum(format!(
                        "multi-delta weights sum to {total}, expected 1"
                    )));
                }
                Ok(())
            }
            SpectrumEnvelope::Tabulated { samples } => {
                check_samples(samples.iter().map(|s| (s.detuning, s.density)))?;
                let area = trapezoid(samples);
                if (area - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidSpectrum(format!(
                        "tabulated density integrates to {area}, expected 1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Density F(ν) at detuning `nu`, in s/rad.
    pub fn evaluate(&self, nu: f64) -> Result<f64> {
        let density = match *self {
            SpectrumEnvelope::White => return Err(Error::KindHasNoDensity("white")),
            SpectrumEnvelope::MultiDelta { .. } => {
                return Err(Error::KindHasNoDensity("multidelta"))
            }
            SpectrumEnvelope::Gaussian {
                center,
                width,
                power,
            } => gaussian_line(nu - center, width, power),
            SpectrumEnvelope::Lorentzian {
                center,
                width,
                power,
            } => lorentzian_line(Complex64::new(nu - center, 0.0), width, power).re,
            SpectrumEnvelope::Rectangular { center, width } => {
                if (nu - center).abs() <= width {
                    0.5 / width
                } else {
                    0.0
                }
            }
            SpectrumEnvelope::DoubleGaussian {
                center,
                width,
                separation,
                power,
            } => {
                let half = 0.5 * separation;
                0.5 * (gaussian_line(nu - center + half, width, power)
                    + gaussian_line(nu - center - half, width, power))
            }
            SpectrumEnvelope::DoubleLorentzian { .. } => {
                self.analytic_density(Complex64::new(nu, 0.0))
                    .expect("lorentzian")
                    .re
            }
            SpectrumEnvelope::Tabulated { ref samples } => interpolate(samples, nu),
        };
        Ok(density)
    }

    /// Analytic continuation of the density to complex detuning.
    ///
    /// Only the Lorentzian-type families are rational functions, so only they
    /// have one. Poles sit at `peak ± i·width`.
    pub(crate) fn analytic_density(&self, z: Complex64) -> Option<Complex64> {
        match *self {
            SpectrumEnvelope::Lorentzian {
                center,
                width,
                power,
            } => Some(lorentzian_line(z - center, width, power)),
            SpectrumEnvelope::DoubleLorentzian {
                center,
                width,
                separation,
                power,
            } => {
                let half = 0.5 * separation;
                Some(
                    0.5 * (lorentzian_line(z - center + half, width, power)
                        + lorentzian_line(z - center - half, width, power)),
                )
            }
            _ => None,
        }
    }
}

fn check_separation(separation: f64) -> Result<()> {
    if separation.is_finite() && separation >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpectrum(format!(
            "peak separation must be non-negative and finite, got {separation}"
        )))
    }
}

fn gaussian_line(offset: f64, width: f64, power: Power) -> f64 {
    let x = offset / width;
    match power {
        Power::Single => (-x * x).exp() / (width * PI.sqrt()),
        Power::Squared => (2.0 / PI).sqrt() / width * (-2.0 * x * x).exp(),
    }
}

fn lorentzian_line(offset: Complex64, width: f64, power: Power) -> Complex64 {
    let x = offset / width;
    let q = 1.0 + x * x;
    match power {
        Power::Single => 1.0 / (PI * width * q),
        Power::Squared => 2.0 / (PI * width * q * q),
    }
}

fn interpolate(samples: &[Sample], nu: f64) -> f64 {
    let first = samples[0];
    let last = samples[samples.len() - 1];
    if nu < first.detuning || nu > last.detuning {
        return 0.0;
    }
    let idx = samples.partition_point(|s| s.detuning <= nu);
    if idx == samples.len() {
        return last.density;
    }
    let (a, b) = (samples[idx - 1], samples[idx]);
    let t = (nu - a.detuning) / (b.detuning - a.detuning);
    a.density + t * (b.density - a.density)
}

fn trapezoid(samples: &[Sample]) -> f64 {
    samples
        .windows(2)
        .map(|w| 0.5 * (w[1].detuning - w[0].detuning) * (w[0].density + w[1].density))
        .sum()
}

fn check_samples(samples: impl Iterator<Item = (f64, f64)>) -> Result<usize> {
    let mut count = 0;
    let mut previous = f64::NEG_INFINITY;
    for (nu, density) in samples {
        if !nu.is_finite() || !density.is_finite() || nu <= previous || density < 0.0 {
            return Err(Error::EmptyOrUnsorted);
        }
        previous = nu;
        count += 1;
    }
    if count < 2 {
        return Err(Error::EmptyOrUnsorted);
    }
    Ok(count)
}

/// Builds a tabulated spectrum from raw `(detuning, density)` pairs,
/// rescaling the densities so that their trapezoid integral is one.
pub fn normalize_tabulated(samples: &[(f64, f64)]) -> Result<SpectrumEnvelope> {
    check_samples(samples.iter().copied())?;
    let raw: Vec<Sample> = samples
        .iter()
        .map(|&(detuning, density)| Sample { detuning, density })
        .collect();
    let area = trapezoid(&raw);
    if area <= 0.0 {
        return Err(Error::AllZero);
    }
    let samples = raw
        .into_iter()
        .map(|s| Sample {
            detuning: s.detuning,
            density: s.density / area,
        })
        .collect();
    Ok(SpectrumEnvelope::Tabulated { samples })
}

/// Reads a tabulated spectrum from CSV with header
/// `detuning_rad_per_s,density_s_per_rad` and normalizes it.
pub fn read_tabulated_csv(path: &Path) -> Result<SpectrumEnvelope> {
    let fail = |reason: String| Error::TabulatedInput {
        path: path.display().to_string(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| fail(e.to_string()))?;
    let headers = reader.headers().map_err(|e| fail(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != TABULATED_CSV_HEADER {
        return Err(fail(format!(
            "expected header `{}`, found `{}`",
            TABULATED_CSV_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut samples = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| fail(e.to_string()))?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .ok_or_else(|| fail(format!("row {}: missing column {}", line + 1, i + 1)))?
                .parse::<f64>()
                .map_err(|e| fail(format!("row {}: {e}", line + 1)))
        };
        samples.push((field(0)?, field(1)?));
    }
    normalize_tabulated(&samples)
}

/// Effective one-photon marginal of a down-converted pair.
///
/// The pump is treated as monochromatic, so the anticorrelation delta
/// collapses the ω₂ integral and leaves a density in ω₁ alone. The marginal
/// is expressed in detunings from the degenerate frequency ω_p/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdcSpectralModel {
    /// rad/s
    pub pump_frequency: f64,
    pub marginal: SpectrumEnvelope,
}

impl PdcSpectralModel {
    /// The frequency ω_p/2 that marginal detunings are measured from.
    pub fn reference_frequency(&self) -> f64 {
        0.5 * self.pump_frequency
    }
}

/// Marginal density for the filtered down-conversion spectra.
///
/// Gaussian and Lorentzian filters enter squared; the rectangle stays a
/// rectangle. `separation` overrides the default peak spacing of the double
/// families (5Δω and 30Δω).
pub fn pdc_marginal(
    kind: SpectrumKind,
    pump_frequency: f64,
    width: f64,
    separation: Option<f64>,
) -> Result<PdcSpectralModel> {
    if !pump_frequency.is_finite() {
        return Err(Error::InvalidSpectrum(format!(
            "pump frequency must be finite, got {pump_frequency}"
        )));
    }
    let marginal = match kind {
        SpectrumKind::Gaussian => SpectrumEnvelope::gaussian(0.0, width, Power::Squared)?,
        SpectrumKind::Lorentzian => SpectrumEnvelope::lorentzian(0.0, width, Power::Squared)?,
        SpectrumKind::Rectangular => SpectrumEnvelope::rectangular(0.0, width)?,
        SpectrumKind::DoubleGaussian => SpectrumEnvelope::double_gaussian(
            0.0,
            width,
            separation.unwrap_or(DOUBLE_GAUSSIAN_SEPARATION * width),
            Power::Squared,
        )?,
        SpectrumKind::DoubleLorentzian => SpectrumEnvelope::double_lorentzian(
            0.0,
            width,
            separation.unwrap_or(DOUBLE_LORENTZIAN_SEPARATION * width),
            Power::Squared,
        )?,
        other => return Err(Error::UnsupportedKind(other.name())),
    };
    Ok(PdcSpectralModel {
        pump_frequency,
        marginal,
    })
}

//! Crystal-length scans and detection of coherence zeros, revivals and
//! disentanglement.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{self, ChannelParams, CorrelationValue, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::measures::{concurrence, linear_entropy_2, linear_entropy_4};
use crate::spectra::{pdc_marginal, Power, SpectrumEnvelope, SpectrumKind};
use crate::spectra::{DOUBLE_GAUSSIAN_SEPARATION, DOUBLE_LORENTZIAN_SEPARATION};
use crate::states::{evolve_pair, evolve_single, PairAmplitudes, SingleAmplitudes};

/// |F| or C below this counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;
/// Minimum depth of an entropy dip for it to count as a revival.
pub const REVIVAL_PROMINENCE: f64 = 1e-6;
/// Largest closed-form/quadrature disagreement tolerated in `Both` mode.
pub const ORACLE_AGREEMENT: f64 = 1e-7;

/// 1/m, the composite Δn·Δω/c used for every figure.
pub const DEFAULT_K: f64 = 500.0;
/// rad/s. Only the product with Δn matters; this value gives Δn ≈ 0.015.
pub const DEFAULT_WIDTH: f64 = 1.0e13;
/// rad/s, a 405 nm pump. Only enters the reported reference frame.
pub const DEFAULT_PUMP_FREQUENCY: f64 = 4.651e15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthGrid {
    /// m
    pub start: f64,
    /// m
    pub stop: f64,
    pub count: usize,
}

impl Default for LengthGrid {
    fn default() -> Self {
        LengthGrid {
            start: 0.0,
            stop: 0.02,
            count: 2001,
        }
    }
}

impl LengthGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::InvalidConfig("grid bounds must be finite".into()));
        }
        if self.start < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "grid start {} is negative",
                self.start
            )));
        }
        if self.stop <= self.start {
            return Err(Error::InvalidConfig("grid stop must exceed start".into()));
        }
        if self.count < 2 {
            return Err(Error::InvalidConfig(
                "grid needs at least two points".into(),
            ));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.count - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + span * i as f64 / last)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    ClosedForm,
    Quadrature,
    /// Closed form, checked point by point against quadrature.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "photons", rename_all = "snake_case")]
pub enum PolarizationState {
    Single(SingleAmplitudes),
    Pair(PairAmplitudes),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub spectrum: SpectrumEnvelope,
    pub channel: ChannelParams,
    pub state: PolarizationState,
    pub grid: LengthGrid,
    /// `None` picks closed form for analytic spectra and quadrature for
    /// tabulated ones.
    pub mode: Option<CorrelationMode>,
    pub tolerance: f64,
}

impl SweepConfig {
    pub fn new(
        spectrum: SpectrumEnvelope,
        channel: ChannelParams,
        state: PolarizationState,
    ) -> Self {
        SweepConfig {
            spectrum,
            channel,
            state,
            grid: LengthGrid::default(),
            mode: None,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn effective_mode(&self) -> CorrelationMode {
        self.mode.unwrap_or(match self.spectrum {
            SpectrumEnvelope::Tabulated { .. } => CorrelationMode::Quadrature,
            _ => CorrelationMode::ClosedForm,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// m
    pub length: f64,
    pub correlation: CorrelationValue,
    pub entropy: f64,
    /// Absent for single-photon runs.
    pub concurrence: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    CoherenceZero,
    Revival,
    Disentangled,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EventKind::CoherenceZero => "CoherenceZero",
            EventKind::Revival => "Revival",
            EventKind::Disentangled => "Disentangled",
        };
        f.write_str(s)
    }
}

/// `amplitude` is the entropy at a revival minimum, and the (interpolated)
/// |F| or C at a zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub length: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub events: Vec<Event>,
}

impl SweepResult {
    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }
}

fn correlation_at(
    cfg: &SweepConfig,
    mode: CorrelationMode,
    length: f64,
) -> Result<CorrelationValue> {
    match mode {
        CorrelationMode::ClosedForm => {
            correlation::closed_form(&cfg.spectrum, &cfg.channel, length)
        }
        CorrelationMode::Quadrature => {
            correlation::quadrature(&cfg.spectrum, &cfg.channel, length, cfg.tolerance)
        }
        CorrelationMode::Both => {
            let closed = correlation::closed_form(&cfg.spectrum, &cfg.channel, length)?;
            let numeric =
                correlation::quadrature(&cfg.spectrum, &cfg.channel, length, cfg.tolerance)?;
            let difference = (closed.0 - numeric.0).norm();
            if difference > ORACLE_AGREEMENT {
                return Err(Error::OracleMismatch { length, difference });
            }
            Ok(closed)
        }
    }
}

fn row_at(cfg: &SweepConfig, mode: CorrelationMode, length: f64) -> Result<SweepRow> {
    let f = correlation_at(cfg, mode, length)?;
    let (entropy, conc) = match &cfg.state {
        PolarizationState::Single(amps) => (linear_entropy_2(&evolve_single(amps, f)?), None),
        PolarizationState::Pair(amps) => {
            let rho = evolve_pair(amps, f)?;
            (linear_entropy_4(&rho), Some(concurrence(&rho)?))
        }
    };
    Ok(SweepRow {
        length,
        correlation: f,
        entropy,
        concurrence: conc,
    })
}

/// Evaluates the configured scan and detects events.
///
/// Grid points are evaluated in parallel; rows always come back in grid
/// order. In `Both` mode the worst disagreement is reported if any point
/// exceeds [`ORACLE_AGREEMENT`].
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.grid.validate()?;
    cfg.spectrum.validate()?;
    if !(correlation::MIN_TOLERANCE..=correlation::MAX_TOLERANCE).contains(&cfg.tolerance) {
        return Err(Error::InvalidTolerance(cfg.tolerance));
    }
    let mode = cfg.effective_mode();
    let lengths = cfg.grid.points();
    let outcomes: Vec<Result<SweepRow>> =
        lengths.par_iter().map(|&l| row_at(cfg, mode, l)).collect();

    let mut rows = Vec::with_capacity(outcomes.len());
    let mut worst: Option<(f64, f64)> = None;
    for outcome in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(Error::OracleMismatch { length, difference }) => {
                if worst.is_none_or(|(_, d)| difference > d) {
                    worst = Some((length, difference));
                }
            }
            Err(e) => return Err(e),
        }
    }
    if let Some((length, difference)) = worst {
        return Err(Error::OracleMismatch { length, difference });
    }

    let events = detect_events(cfg, &rows);
    Ok(SweepResult { rows, events })
}

fn detect_events(cfg: &SweepConfig, rows: &[SweepRow]) -> Vec<Event> {
    let mut events = Vec::new();
    let center = cfg.spectrum.mean_detuning();
    let scale = match &cfg.state {
        PolarizationState::Single(_) => None,
        PolarizationState::Pair(amps) => Some(2.0 * amps.a().norm() * amps.b().norm()),
    };

    // Removing the mean carrier phase leaves a real, signed amplitude for
    // symmetric spectra, so zeros between grid points show up as sign flips.
    let derotated: Vec<Complex64> = rows
        .iter()
        .map(|r| {
            r.correlation.0 * Complex64::from_polar(1.0, -center * cfg.channel.delay(r.length))
        })
        .collect();
    let moduli: Vec<f64> = rows.iter().map(|r| r.correlation.abs()).collect();
    events.extend(zero_events(
        rows,
        &moduli,
        &derotated,
        EventKind::CoherenceZero,
        1.0,
    ));
    if let Some(scale) = scale {
        let conc: Vec<f64> = rows.iter().map(|r| r.concurrence.unwrap_or(0.0)).collect();
        events.extend(zero_events(
            rows,
            &conc,
            &derotated,
            EventKind::Disentangled,
            scale,
        ));
    }
    events.extend(revival_events(rows));
    events.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then((a.kind as u8).cmp(&(b.kind as u8)))
    });
    events
}

fn zero_events(
    rows: &[SweepRow],
    values: &[f64],
    signed: &[Complex64],
    kind: EventKind,
    scale: f64,
) -> Vec<Event> {
    let below: Vec<bool> = values.iter().map(|&v| v < ZERO_THRESHOLD).collect();
    let mut events = Vec::new();
    for i in 0..rows.len() {
        if below[i] {
            if i == 0 || !below[i - 1] {
                events.push(Event {
                    kind,
                    length: rows[i].length,
                    amplitude: values[i],
                });
            }
            continue;
        }
        if i + 1 == rows.len() || below[i + 1] {
            continue;
        }
        let (s0, s1) = (signed[i], signed[i + 1]);
        if s0.re * s1.re < 0.0 {
            let t = s0.re / (s0.re - s1.re);
            let im = s0.im + t * (s1.im - s0.im);
            if im.abs() < ZERO_THRESHOLD {
                let length = rows[i].length + t * (rows[i + 1].length - rows[i].length);
                events.push(Event {
                    kind,
                    length,
                    amplitude: scale * im.abs(),
                });
            }
        }
    }
    events
}

fn revival_events(rows: &[SweepRow]) -> Vec<Event> {
    let s: Vec<f64> = rows.iter().map(|r| r.entropy).collect();
    let n = s.len();
    let mut events = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        // treat a run of equal values as one candidate
        let mut j = i;
        while j + 1 < n && s[j + 1] == s[i] {
            j += 1;
        }
        if j + 1 < n && s[i - 1] > s[i] && s[j + 1] > s[i] {
            let level = s[i];
            let mut left_max = level;
            for &v in s[..i].iter().rev() {
                if v < level {
                    break;
                }
                left_max = left_max.max(v);
            }
            let mut right_max = level;
            for &v in &s[j + 1..] {
                if v < level {
                    break;
                }
                right_max = right_max.max(v);
            }
            if left_max.min(right_max) - level >= REVIVAL_PROMINENCE {
                events.push(Event {
                    kind: EventKind::Revival,
                    length: rows[i].length,
                    amplitude: level,
                });
            }
        }
        i = j + 1;
    }
    events
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3a,
    Fig3b,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fig1" => Ok(FigureId::Fig1),
            "fig2" => Ok(FigureId::Fig2),
            "fig3a" => Ok(FigureId::Fig3a),
            "fig3b" => Ok(FigureId::Fig3b),
            other => Err(format!(
                "unknown figure `{other}` (expected fig1, fig2, fig3a or fig3b)"
            )),
        }
    }
}

/// One labelled curve of a figure.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureCurve {
    /// Filename suffix, e.g. `alpha2_0.5` or `double_gaussian`.
    pub label: String,
    pub config: SweepConfig,
}

/// Sweep configurations behind each figure, all at k = 500 m⁻¹.
///
/// fig1/fig2: single photons with |α|² ∈ {0.1, 0.5, 0.8} and a double
/// Gaussian (5Δω apart) or double Lorentzian (30Δω apart) spectrum.
/// fig3a/fig3b: (|HH⟩ + |VV⟩)/√2 over the five down-conversion marginals;
/// the two panels share their data and differ in the plotted column.
pub fn figure_curves(id: FigureId, grid: LengthGrid) -> Result<Vec<FigureCurve>> {
    let width = DEFAULT_WIDTH;
    let channel = ChannelParams::from_k(DEFAULT_K, width)?;
    let curve = |label: String, spectrum: SpectrumEnvelope, state: PolarizationState| {
        let mut config = SweepConfig::new(spectrum, channel, state);
        config.grid = grid;
        FigureCurve { label, config }
    };
    match id {
        FigureId::Fig1 | FigureId::Fig2 => {
            let spectrum = if id == FigureId::Fig1 {
                SpectrumEnvelope::double_gaussian(
                    0.0,
                    width,
                    DOUBLE_GAUSSIAN_SEPARATION * width,
                    Power::Single,
                )?
            } else {
                SpectrumEnvelope::double_lorentzian(
                    0.0,
                    width,
                    DOUBLE_LORENTZIAN_SEPARATION * width,
                    Power::Single,
                )?
            };
            [0.1, 0.5, 0.8]
                .into_iter()
                .map(|alpha2| {
                    let state =
                        PolarizationState::Single(SingleAmplitudes::from_population(alpha2)?);
                    Ok(curve(format!("alpha2_{alpha2}"), spectrum.clone(), state))
                })
                .collect()
        }
        FigureId::Fig3a | FigureId::Fig3b => {
            let state = PolarizationState::Pair(PairAmplitudes::from_population(0.5)?);
            [
                SpectrumKind::Gaussian,
                SpectrumKind::Lorentzian,
                SpectrumKind::Rectangular,
                SpectrumKind::DoubleGaussian,
                SpectrumKind::DoubleLorentzian,
            ]
            .into_iter()
            .map(|kind| {
                let model = pdc_marginal(kind, DEFAULT_PUMP_FREQUENCY, width, None)?;
                Ok(curve(kind.name().to_string(), model.marginal, state))
            })
            .collect()
        }
    }
}

/// Runs every curve of a figure on the default grid.
pub fn reproduce_figure(id: FigureId) -> Result<Vec<(FigureCurve, SweepResult)>> {
    figure_curves(id, LengthGrid::default())?
        .into_iter()
        .map(|c| {
            let result = run_sweep(&c.config)?;
            Ok((c, result))
        })
        .collect()
}

//! Single-photon spectral functions `f(k)` and their normalization.
//!
//! Spectra are evaluated at detunings `dk = k - k_c`. The displacement phase
//! `e^{i k tau}` is stored with the spectrum but only the time-domain
//! simulator applies it: every probability on the analytic path depends on
//! `|f|` alone.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64 as C64;

use crate::analytic::CouplingProfile;
use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::quad::{integrate, integrate_real_line, QuadOptions};

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralShape {
    /// Cavity line shape, `g_L^*(k) / lambda_L`.
    CavityPhoton,
    Lorentzian { kappa_in: f64 },
    Gaussian { kappa_in: f64 },
    /// Piecewise-linear complex amplitude on an increasing `dk` grid, zero outside.
    Tabulated { dk: Vec<f64>, amp: Vec<C64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    pub shape: SpectralShape,
    /// Peak position relative to `k_c`. Ignored for the cavity photon.
    pub peak_offset: f64,
    /// Displacement of the packet from the cavity (time units).
    pub tau: f64,
}

impl SpectralFunction {
    pub fn cavity_photon() -> Self {
        Self { shape: SpectralShape::CavityPhoton, peak_offset: 0.0, tau: 0.0 }
    }

    pub fn lorentzian(kappa_in: f64) -> Result<Self> {
        check_width(kappa_in)?;
        Ok(Self { shape: SpectralShape::Lorentzian { kappa_in }, peak_offset: 0.0, tau: 0.0 })
    }

    pub fn gaussian(kappa_in: f64) -> Result<Self> {
        check_width(kappa_in)?;
        Ok(Self { shape: SpectralShape::Gaussian { kappa_in }, peak_offset: 0.0, tau: 0.0 })
    }

    /// Table without renormalization.
    pub fn tabulated_raw(points: Vec<(f64, C64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyTable);
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidSpectrum(format!(
                    "table abscissae must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if points.iter().any(|(x, a)| !x.is_finite() || !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidSpectrum("table contains non-finite values".into()));
        }
        let (dk, amp) = points.into_iter().unzip();
        Ok(Self { shape: SpectralShape::Tabulated { dk, amp }, peak_offset: 0.0, tau: 0.0 })
    }

    /// Table renormalized to unit norm; tables more than 1% off are rejected.
    pub fn tabulated(points: Vec<(f64, C64)>) -> Result<Self> {
        let mut f = Self::tabulated_raw(points)?;
        let n = table_norm(&f);
        if n == 0.0 || (n - 1.0).abs() > 0.01 {
            return Err(Error::UnnormalizedSpectrum(n));
        }
        if let SpectralShape::Tabulated { amp, .. } = &mut f.shape {
            let s = 1.0 / n.sqrt();
            amp.iter_mut().for_each(|a| *a *= s);
        }
        Ok(f)
    }

    /// Load a table from CSV: `dk, re[, im]`; lines starting with `#` are skipped.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::tabulated(parse_table(&text)?)
    }

    pub fn with_peak_offset(mut self, peak_offset: f64) -> Self {
        self.peak_offset = peak_offset;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    /// Spectral width used for quadrature scaling and grid guards.
    pub fn width(&self, params: &PhysicalParams) -> f64 {
        match &self.shape {
            SpectralShape::CavityPhoton => params.kappa,
            SpectralShape::Lorentzian { kappa_in } | SpectralShape::Gaussian { kappa_in } => *kappa_in,
            SpectralShape::Tabulated { dk, .. } => {
                let span = dk.last().unwrap() - dk.first().unwrap();
                if span > 0.0 {
                    span
                } else {
                    params.kappa
                }
            }
        }
    }

    /// Where the spectrum is centered.
    pub fn center(&self) -> f64 {
        match &self.shape {
            SpectralShape::CavityPhoton => 0.0,
            SpectralShape::Tabulated { dk, .. } => 0.5 * (dk.first().unwrap() + dk.last().unwrap()),
            _ => self.peak_offset,
        }
    }

    /// Points where the integrand of `|f|^2 ...` changes character.
    pub fn breakpoints(&self, params: &PhysicalParams) -> Vec<f64> {
        let w = self.width(params);
        let c = self.center();
        match &self.shape {
            SpectralShape::Tabulated { dk, .. } => dk.clone(),
            SpectralShape::Gaussian { .. } => {
                vec![c - 3.0 * w, c - 1.5 * w, c - 0.5 * w, c, c + 0.5 * w, c + 1.5 * w, c + 3.0 * w]
            }
            _ => vec![c - 2.0 * w, c - 0.5 * w, c, c + 0.5 * w, c + 2.0 * w],
        }
    }

    pub fn label(&self) -> &'static str {
        match self.shape {
            SpectralShape::CavityPhoton => "cavity_photon",
            SpectralShape::Lorentzian { .. } => "lorentzian",
            SpectralShape::Gaussian { .. } => "gaussian",
            SpectralShape::Tabulated { .. } => "tabulated",
        }
    }
}

fn check_width(kappa_in: f64) -> Result<()> {
    if kappa_in > 0.0 && kappa_in.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpectrum(format!("kappa_in must be positive, got {kappa_in}")))
    }
}

fn parse_table(text: &str) -> Result<Vec<(f64, C64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::InvalidSpectrum(e.to_string()))?;
        if record.iter().all(|s| s.is_empty()) {
            continue;
        }
        let parse = |i: usize| -> Result<f64> {
            record
                .get(i)
                .ok_or_else(|| Error::InvalidSpectrum(format!("row {}: missing column {}", line + 1, i + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::InvalidSpectrum(format!("row {}: {e}", line + 1)))
        };
        if record.len() < 2 || record.len() > 3 {
            return Err(Error::InvalidSpectrum(format!(
                "row {}: expected 2 or 3 columns, got {}",
                line + 1,
                record.len()
            )));
        }
        let im = if record.len() == 3 { parse(2)? } else { 0.0 };
        points.push((parse(0)?, C64::new(parse(1)?, im)));
    }
    Ok(points)
}

/// Exact `∫|f|^2` of the piecewise-linear table.
fn table_norm(f: &SpectralFunction) -> f64 {
    match &f.shape {
        SpectralShape::Tabulated { dk, amp } => dk
            .windows(2)
            .zip(amp.windows(2))
            .map(|(x, a)| {
                let h = x[1] - x[0];
                h * (a[0].norm_sqr() + (a[0] * a[1].conj()).re + a[1].norm_sqr()) / 3.0
            })
            .sum(),
        _ => unreachable!("table_norm on analytic shape"),
    }
}

/// `f(k_c + dk)` without the displacement phase.
pub fn evaluate(f: &SpectralFunction, params: &PhysicalParams, dk: f64) -> Result<C64> {
    match &f.shape {
        SpectralShape::Tabulated { dk: xs, amp } => {
            if xs.is_empty() {
                return Err(Error::EmptyTable);
            }
            Ok(interpolate(xs, amp, dk))
        }
        _ => Ok(evaluate_analytic(f, params, dk)),
    }
}

fn interpolate(xs: &[f64], amp: &[C64], x: f64) -> C64 {
    if xs.len() == 1 {
        return if x == xs[0] { amp[0] } else { C64::new(0.0, 0.0) };
    }
    if x < xs[0] || x > xs[xs.len() - 1] {
        return C64::new(0.0, 0.0);
    }
    let j = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let s = (x - x0) / (x1 - x0);
    amp[j - 1] * (1.0 - s) + amp[j] * s
}

fn evaluate_analytic(f: &SpectralFunction, params: &PhysicalParams, dk: f64) -> C64 {
    let x = dk - f.peak_offset;
    match f.shape {
        SpectralShape::CavityPhoton => {
            let k = params.kappa;
            C64::from_polar((k / (2.0 * PI)).sqrt(), -params.delta_lr) / C64::new(dk, -0.5 * k)
        }
        SpectralShape::Lorentzian { kappa_in } => {
            C64::new((kappa_in / (2.0 * PI)).sqrt(), 0.0) / C64::new(x, 0.5 * kappa_in)
        }
        SpectralShape::Gaussian { kappa_in } => {
            let a = 2f64.sqrt() / (PI.powf(0.25) * kappa_in.sqrt());
            C64::new(a * (-2.0 * x * x / (kappa_in * kappa_in)).exp(), 0.0)
        }
        SpectralShape::Tabulated { .. } => unreachable!(),
    }
}

/// `f(k_c + dk) e^{i dk tau}`: the packet displaced by `tau`.
pub fn evaluate_displaced(f: &SpectralFunction, params: &PhysicalParams, dk: f64) -> Result<C64> {
    Ok(evaluate(f, params, dk)? * C64::from_polar(1.0, dk * f.tau))
}

/// `∫ |f(k)|^2 dk`.
pub fn norm(f: &SpectralFunction, params: &PhysicalParams) -> Result<f64> {
    if let SpectralShape::Tabulated { dk, .. } = &f.shape {
        if dk.is_empty() {
            return Err(Error::EmptyTable);
        }
        return Ok(table_norm(f));
    }
    let q = integrate_real_line(
        |x| evaluate_analytic(f, params, x).norm_sqr(),
        f.center(),
        f.width(params),
        &f.breakpoints(params),
        QuadOptions::tight(),
    )?;
    Ok(q.value)
}

/// `∫_{|dk - center| <= half_width} |f|^2`.
pub fn mass_within(f: &SpectralFunction, params: &PhysicalParams, half_width: f64) -> Result<f64> {
    let c = f.center();
    let q = integrate(
        |x| evaluate(f, params, x).map(|v| v.norm_sqr()).unwrap_or(f64::NAN),
        c - half_width,
        c + half_width,
        &f.breakpoints(params),
        QuadOptions::tight(),
    )?;
    Ok(q.value)
}

/// Numerical test of the scattering-state condition.
///
/// With `h(k) = sqrt(2) g_L(k) f(k)` the amplitude with which the L-channel
/// packet drives the excited state, the condition holds iff
/// `lim_{eps->0+} ∫ h(k') / (z + i eps - k') dk' = -2 pi i h(z)` for real `z`.
/// Returns the largest relative mismatch over `z_samples` (detunings), with
/// `eps = 1e-6 kappa`. A small value means the packet is a proper scattering
/// state; order one means it is not.
pub fn scattering_residual(f: &SpectralFunction, params: &PhysicalParams, z_samples: &[f64]) -> Result<f64> {
    let profile = CouplingProfile::new(params);
    let sqrt2 = 2f64.sqrt();
    let h = |k: f64| -> C64 {
        evaluate(f, params, k).map(|v| sqrt2 * profile.g_l(k) * v).unwrap_or(C64::new(f64::NAN, 0.0))
    };
    let eps = 1e-6 * params.kappa;
    // Subtracting h(z) L(k') with L a unit-height Lorentzian removes the
    // near-pole; its own contribution is done in closed form.
    let c = params.kappa;
    let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-10, max_intervals: 40_000 };

    let mut worst: f64 = 0.0;
    for &z in z_samples {
        let hz = h(z);
        let regular = |k: f64| {
            let u = k - z;
            let lorentz = c * c / (u * u + c * c);
            (h(k) - hz * lorentz) / C64::new(-u, eps)
        };
        let mut cuts = f.breakpoints(params);
        cuts.extend([z - 1e3 * eps, z, z + 1e3 * eps]);
        let q = integrate_real_line(regular, z, c, &cuts, opts)?;
        let lhs = q.value + hz * C64::new(0.0, -PI * c / (c + eps));
        let rhs = C64::new(0.0, -2.0 * PI) * hz;
        let denom = rhs.norm().max(1e-300);
        worst = worst.max((lhs - rhs).norm() / denom);
    }
    Ok(worst)
}

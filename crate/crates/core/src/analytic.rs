//! Resolvent solution of the single-excitation problem.
//!
//! The two atoms plus one photon reduce to a collective excited state `|E>`
//! coupled to two photon continua: `|LL; k_L>` with strength `sqrt(2) g_L(k)`
//! and `|Phi; k_R>` with strength `g_R(k)`. A frequency-wise rotation splits
//! these into a bright combination (coupling `V(k)`) and a dark one that
//! evolves freely. Everything here works in detunings from `k_c`.
//!
//! Spontaneous emission enters through the complex detuning
//! `delta_e - i gamma / 2`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{total_coupling, validate, Method, PhysicalParams, ProbabilityResult};
use crate::par::Execution;
use crate::quad::{integrate, integrate_real_line, QuadOptions};
use crate::spectra::{self, SpectralFunction, SpectralShape};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Single-mode coupling profile `g_mu(k) = sqrt(kappa/2pi) lambda_mu e^{i theta_mu} / (dk + i kappa/2)`
/// with `theta_L = delta_LR`, `theta_R = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingProfile {
    lambda_l: f64,
    lambda_r: f64,
    kappa: f64,
    phase_l: C64,
}

/// Bright and dark combinations of `(|LL; k_L>, |Phi; k_R>)` at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightDark {
    /// Components of the bright state, `(sqrt(2) g_L^*, g_R^*) / V`.
    pub bright: [C64; 2],
    /// Components of the dark state, `(g_R, -sqrt(2) g_L) / V`.
    pub dark: [C64; 2],
}

impl BrightDark {
    /// Largest deviation of the 2x2 rotation from unitarity.
    pub fn unitarity_defect(&self) -> f64 {
        let n = |v: &[C64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
        let overlap = self.bright[0].conj() * self.dark[0] + self.bright[1].conj() * self.dark[1];
        (n(&self.bright) - 1.0)
            .abs()
            .max((n(&self.dark) - 1.0).abs())
            .max(overlap.norm())
    }
}

impl CouplingProfile {
    pub fn new(params: &PhysicalParams) -> Self {
        Self {
            lambda_l: params.lambda_l,
            lambda_r: params.lambda_r,
            kappa: params.kappa,
            phase_l: C64::from_polar(1.0, params.delta_lr),
        }
    }

    fn lineshape(&self, dk: f64) -> C64 {
        (self.kappa / (2.0 * PI)).sqrt() / C64::new(dk, 0.5 * self.kappa)
    }

    pub fn g_l(&self, dk: f64) -> C64 {
        self.lineshape(dk) * self.phase_l * self.lambda_l
    }

    pub fn g_r(&self, dk: f64) -> C64 {
        self.lineshape(dk) * self.lambda_r
    }

    pub fn v(&self, dk: f64) -> f64 {
        (2.0 * self.g_l(dk).norm_sqr() + self.g_r(dk).norm_sqr()).sqrt()
    }

    pub fn rotation(&self, dk: f64) -> BrightDark {
        let gl = self.g_l(dk);
        let gr = self.g_r(dk);
        let v = self.v(dk);
        BrightDark {
            bright: [SQRT_2 * gl.conj() / v, gr.conj() / v],
            dark: [gr / v, -SQRT_2 * gl / v],
        }
    }
}

/// Poles `omega_+-` (detunings) of the excited-state propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedRoots {
    pub omega_plus: C64,
    pub omega_minus: C64,
}

impl DressedRoots {
    /// Relabel so that each root continues the nearest root of `previous`.
    pub fn track(self, previous: &DressedRoots) -> DressedRoots {
        let keep = (self.omega_plus - previous.omega_plus).norm() + (self.omega_minus - previous.omega_minus).norm();
        let swap = (self.omega_plus - previous.omega_minus).norm() + (self.omega_minus - previous.omega_plus).norm();
        if swap < keep {
            DressedRoots { omega_plus: self.omega_minus, omega_minus: self.omega_plus }
        } else {
            self
        }
    }
}

fn complex_detuning(params: &PhysicalParams) -> C64 {
    C64::new(params.delta_e, -0.5 * params.gamma)
}

/// `omega_+- = (d - i kappa/2)/2 ± sqrt(((d + i kappa/2)/2)^2 + 2 lambda_L^2 + lambda_R^2)`
/// with `d = delta_e - i gamma/2`, principal square root.
pub fn dressed_roots(params: &PhysicalParams) -> DressedRoots {
    let d = complex_detuning(params);
    let half_k = C64::new(0.0, 0.5 * params.kappa);
    let mean = (d - half_k) * 0.5;
    let root = (((d + half_k) * 0.5).powi(2) + total_coupling(params)).sqrt();
    DressedRoots { omega_plus: mean + root, omega_minus: mean - root }
}

/// Level shift `<E|R(omega)|E> = (2 lambda_L^2 + lambda_R^2) / (d_omega + i kappa/2)`,
/// `d_omega = omega - k_c`.
pub fn level_shift(params: &PhysicalParams, d_omega: C64) -> Result<C64> {
    let den = d_omega + C64::new(0.0, 0.5 * params.kappa);
    if den.norm() < 1e-14 * params.kappa {
        return Err(Error::PoleProximity(format!("level shift at d_omega = {d_omega}")));
    }
    Ok(total_coupling(params) / den)
}

/// `(d - delta_e')(d + i kappa/2) - S`, which equals `(d - omega_+)(d - omega_-)`.
fn dressed_polynomial(params: &PhysicalParams, d: C64) -> C64 {
    (d - complex_detuning(params)) * (d + C64::new(0.0, 0.5 * params.kappa)) - total_coupling(params)
}

/// Excited-state propagator `<E|G(omega)|E>` at detuning `d_omega`.
pub fn excited_propagator(params: &PhysicalParams, d_omega: C64) -> Result<C64> {
    let den = dressed_polynomial(params, d_omega);
    let scale = params.kappa.max(total_coupling(params).sqrt()).max(params.delta_e.abs());
    if den.norm() < 1e-14 * scale * scale {
        return Err(Error::PoleProximity(format!("excited propagator at d_omega = {d_omega}")));
    }
    Ok((d_omega + C64::new(0.0, 0.5 * params.kappa)) / den)
}

/// Precomputed scattering amplitudes for one parameter set.
#[derive(Debug, Clone, Copy)]
pub struct Scatterer {
    params: PhysicalParams,
    total: f64,
}

impl Scatterer {
    pub fn new(params: &PhysicalParams) -> Self {
        Self { params: *params, total: total_coupling(params) }
    }

    /// `(dk - i kappa/2)(dk - omega_+)(dk - omega_-)`.
    fn denominator(&self, dk: f64) -> C64 {
        let d = C64::new(dk, 0.0);
        (d - C64::new(0.0, 0.5 * self.params.kappa)) * dressed_polynomial(&self.params, d)
    }

    fn checked_denominator(&self, dk: f64) -> Result<C64> {
        let den = self.denominator(dk);
        let scale = self.params.kappa.max(self.total.sqrt());
        if den.norm() < 1e-14 * scale.powi(3) {
            return Err(Error::PoleProximity(format!("scattering amplitude at dk = {dk}")));
        }
        Ok(den)
    }

    /// Bright-channel S-matrix element `1 - 2 pi i V(k)^2 <E|G(k)|E>`.
    pub fn s(&self, dk: f64) -> C64 {
        let p = &self.params;
        1.0 - I * p.kappa * self.total / self.denominator(dk)
    }

    /// Amplitude to leave the atoms in `|LL>` (L photon out).
    pub fn c_l(&self, dk: f64) -> C64 {
        let p = &self.params;
        let d = C64::new(dk, 0.0);
        let kk = p.kappa * p.kappa;
        let num = (d - complex_detuning(p)) * (dk * dk + 0.25 * kk) - dk * self.total
            + I * (0.5 * p.kappa * (p.lambda_r * p.lambda_r - 2.0 * p.lambda_l * p.lambda_l));
        num / self.denominator(dk)
    }

    /// Amplitude to leave the atoms in the Bell state (R photon out).
    pub fn c_r(&self, dk: f64) -> C64 {
        let p = &self.params;
        SQRT_2 * I * C64::from_polar(1.0, p.delta_lr) * (p.kappa * p.lambda_l * p.lambda_r) / self.denominator(dk)
    }

    pub fn amplitudes(&self, dk: f64) -> Result<AmplitudePair> {
        self.checked_denominator(dk)?;
        Ok(AmplitudePair { c_l: self.c_l(dk), c_r: self.c_r(dk) })
    }

    /// Same amplitudes by rotating into bright/dark states, scattering the
    /// bright part with `s(k)` and rotating back.
    pub fn amplitudes_bright_dark(&self, dk: f64) -> Result<AmplitudePair> {
        self.checked_denominator(dk)?;
        let rot = CouplingProfile::new(&self.params).rotation(dk);
        // Input |LL; k_L> = (1, 0); projections onto the two rotated states.
        let on_bright = rot.bright[0].conj();
        let on_dark = rot.dark[0].conj();
        let s = self.s(dk);
        let out = [
            s * on_bright * rot.bright[0] + on_dark * rot.dark[0],
            s * on_bright * rot.bright[1] + on_dark * rot.dark[1],
        ];
        // The Bell-state amplitude is defined with an overall minus sign.
        Ok(AmplitudePair { c_l: out[0], c_r: -out[1] })
    }
}

/// Output amplitudes `(C_L, C_R)` for a monochromatic injected component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub c_l: C64,
    pub c_r: C64,
}

impl AmplitudePair {
    pub fn total(&self) -> f64 {
        self.c_l.norm_sqr() + self.c_r.norm_sqr()
    }
}

/// S-matrix element of the bright channel at detuning `dk`.
pub fn s_matrix(params: &PhysicalParams, dk: f64) -> C64 {
    Scatterer::new(params).s(dk)
}

/// `(C_L, C_R)` at detuning `dk`. In debug builds the bright/dark route is
/// evaluated as well and required to agree.
pub fn injected_amplitudes(params: &PhysicalParams, dk: f64) -> Result<AmplitudePair> {
    let sc = Scatterer::new(params);
    let direct = sc.amplitudes(dk)?;
    #[cfg(debug_assertions)]
    {
        let rotated = sc.amplitudes_bright_dark(dk)?;
        let tol = 1e-10 * direct.total().sqrt().max(1.0);
        debug_assert!(
            (direct.c_l - rotated.c_l).norm() <= tol && (direct.c_r - rotated.c_r).norm() <= tol,
            "bright/dark route disagrees at dk = {dk}: {direct:?} vs {rotated:?}"
        );
    }
    Ok(direct)
}

/// Largest `| |C_L|^2 + |C_R|^2 - 1 |` over the given detunings.
pub fn unitarity_defect(params: &PhysicalParams, dks: &[f64], exec: Execution) -> f64 {
    let sc = Scatterer::new(params);
    exec.map(dks, |&dk| (sc.c_l(dk).norm_sqr() + sc.c_r(dk).norm_sqr() - 1.0).abs())
        .into_iter()
        .fold(0.0, f64::max)
}

/// Frequencies at which a monochromatic photon is fully converted.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferOffsets {
    /// Real detunings, ascending.
    pub offsets: Vec<f64>,
    /// Multiplicity of each offset as a zero of `C_L`.
    pub multiplicity: Vec<usize>,
    /// Side roots when they are not real.
    pub complex_side_roots: Option<[C64; 2]>,
    pub note: Option<String>,
}

/// Zeros of `C_L` (where `|C_R| = 1`): `dk = 0, ±sqrt(4 lambda_L^2 - kappa^2/4)`.
/// Only defined for `delta_e = gamma = 0` and `lambda_R = sqrt(2) lambda_L`.
pub fn perfect_transfer_offsets(params: &PhysicalParams) -> TransferOffsets {
    let k = params.kappa;
    let scale = k.max(params.lambda_l).max(params.lambda_r);
    let mut unmet = Vec::new();
    if params.delta_e.abs() > 1e-12 * scale {
        unmet.push("delta_e != 0");
    }
    if params.gamma > 1e-12 * scale {
        unmet.push("gamma != 0");
    }
    if (params.lambda_r - SQRT_2 * params.lambda_l).abs() > 1e-12 * scale {
        unmet.push("lambda_R != sqrt(2) lambda_L");
    }
    if !unmet.is_empty() {
        return TransferOffsets {
            offsets: Vec::new(),
            multiplicity: Vec::new(),
            complex_side_roots: None,
            note: Some(format!("no perfect transfer: {}", unmet.join(", "))),
        };
    }
    let disc = 4.0 * params.lambda_l * params.lambda_l - 0.25 * k * k;
    if disc.abs() <= 1e-12 * k * k {
        TransferOffsets {
            offsets: vec![0.0],
            multiplicity: vec![3],
            complex_side_roots: None,
            note: Some("three roots coincide at dk = 0".into()),
        }
    } else if disc > 0.0 {
        let s = disc.sqrt();
        TransferOffsets {
            offsets: vec![-s, 0.0, s],
            multiplicity: vec![1, 1, 1],
            complex_side_roots: None,
            note: None,
        }
    } else {
        let s = (-disc).sqrt();
        TransferOffsets {
            offsets: vec![0.0],
            multiplicity: vec![1],
            complex_side_roots: Some([C64::new(0.0, s), C64::new(0.0, -s)]),
            note: Some("side roots are complex".into()),
        }
    }
}

/// Resonant-or-detuned cavity-photon success probability in closed form.
/// Accepts `kappa = 0` (perfect-cavity limit).
pub fn cavity_pr_closed_form(lambda_l: f64, lambda_r: f64, kappa: f64, delta_e: f64) -> f64 {
    let s = 2.0 * lambda_l * lambda_l + lambda_r * lambda_r;
    let a = s + 0.5 * kappa * kappa;
    4.0 * lambda_l * lambda_l * lambda_r * lambda_r * a / (s * (a * a + delta_e * delta_e * kappa * kappa))
}

/// Cavity-photon probabilities from the closed forms (lossless atoms only).
pub fn cavity_photon_probs_closed(params: &PhysicalParams) -> Result<ProbabilityResult> {
    let p = validate(*params)?;
    if p.gamma > 0.0 {
        return Err(Error::GammaUnsupported(p.gamma));
    }
    let p_r = cavity_pr_closed_form(p.lambda_l, p.lambda_r, p.kappa, p.delta_e);
    Ok(ProbabilityResult { p_l: 1.0 - p_r, p_r, p_loss: 0.0, method: Method::ClosedForm, err_estimate: 0.0 })
}

fn resonance_cuts(params: &PhysicalParams) -> Vec<f64> {
    let roots = dressed_roots(params);
    let k = params.kappa;
    vec![roots.omega_plus.re, roots.omega_minus.re, -0.5 * k, 0.0, 0.5 * k, params.delta_e]
}

fn finish(p_l: f64, p_r: f64, err: f64, e_pop: f64, method: Method) -> ProbabilityResult {
    let raw_loss = 1.0 - p_l - p_r - e_pop;
    let p_loss = raw_loss.max(0.0);
    let err_estimate = err + if raw_loss < 0.0 { -raw_loss } else { 0.0 };
    ProbabilityResult { p_l, p_r, p_loss, method, err_estimate }
}

fn quad_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 20_000 }
}

/// Cavity-photon probabilities by integrating the squared output amplitudes.
pub fn cavity_photon_probs_quadrature(params: &PhysicalParams) -> Result<ProbabilityResult> {
    let p = validate(*params)?;
    let f = SpectralFunction::cavity_photon();
    let d_e = complex_detuning(&p);
    let half_k = C64::new(0.0, 0.5 * p.kappa);
    let bell = SQRT_2 * p.lambda_l * p.lambda_r;
    let lr2 = p.lambda_r * p.lambda_r;
    let amps = |dk: f64| {
        let d = C64::new(dk, 0.0);
        let fc = spectra::evaluate(&f, &p, dk).unwrap_or(C64::new(f64::NAN, 0.0));
        let den = dressed_polynomial(&p, d);
        let l = fc * ((d - d_e) * (d + half_k) - lr2) / den;
        let r = fc * bell / den;
        (l, r)
    };
    let cuts = resonance_cuts(&p);
    let ql = integrate_real_line(|dk| amps(dk).0.norm_sqr(), 0.0, p.kappa, &cuts, quad_opts())?;
    let qr = integrate_real_line(|dk| amps(dk).1.norm_sqr(), 0.0, p.kappa, &cuts, quad_opts())?;
    Ok(finish(ql.value, qr.value, ql.error + qr.error, 0.0, Method::Quadrature))
}

/// Closed-form bound on the resonant cavity-photon success probability and
/// the coupling ratio that attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrBound {
    pub bound: f64,
    pub lambda_r_star: f64,
}

/// `P_R <= 2 / (1 + sqrt(1 + (kappa/2 lambda_L)^2))^2`, attained at
/// `lambda_R = sqrt(2) (1 + (kappa/2 lambda_L)^2)^{1/4} lambda_L`.
/// Uses `lambda_L` and `kappa` only; valid for `delta_e = gamma = 0`.
pub fn pr_bound(params: &PhysicalParams) -> PrBound {
    let x = params.kappa / (2.0 * params.lambda_l);
    let q = (1.0 + x * x).sqrt();
    PrBound {
        bound: 2.0 / ((1.0 + q) * (1.0 + q)),
        lambda_r_star: SQRT_2 * q.sqrt() * params.lambda_l,
    }
}

/// Success probability for an injected packet, `P_R = ∫ |f C_R|^2`, with
/// `P_L = ∫ |f C_L|^2` and the remainder assigned to loss.
pub fn injected_pr(params: &PhysicalParams, f: &SpectralFunction) -> Result<ProbabilityResult> {
    let p = validate(*params)?;
    let n = spectra::norm(f, &p)?;
    if (n - 1.0).abs() > 1e-6 {
        return Err(Error::UnnormalizedSpectrum(n));
    }
    let sc = Scatterer::new(&p);
    let weight = |dk: f64| spectra::evaluate(f, &p, dk).map(|v| v.norm_sqr()).unwrap_or(f64::NAN);
    let mut cuts = resonance_cuts(&p);
    cuts.extend(f.breakpoints(&p));
    let opts = quad_opts();

    let (ql, qr) = match &f.shape {
        SpectralShape::Tabulated { dk, .. } => {
            let (a, b) = (dk[0], dk[dk.len() - 1]);
            (
                integrate(|x| weight(x) * sc.c_l(x).norm_sqr(), a, b, &cuts, opts)?,
                integrate(|x| weight(x) * sc.c_r(x).norm_sqr(), a, b, &cuts, opts)?,
            )
        }
        _ => {
            let (c, w) = (f.center(), f.width(&p));
            (
                integrate_real_line(|x| weight(x) * sc.c_l(x).norm_sqr(), c, w, &cuts, opts)?,
                integrate_real_line(|x| weight(x) * sc.c_r(x).norm_sqr(), c, w, &cuts, opts)?,
            )
        }
    };
    Ok(finish(ql.value, qr.value, ql.error + qr.error + (n - 1.0).abs(), 0.0, Method::Quadrature))
}

//! Brute-force time-domain check.
//!
//! Both photon continua are replaced by `n_modes` equally spaced modes on
//! `[-W, W]` around the cavity resonance. The single-excitation Hamiltonian
//! is then an arrowhead matrix of size `2 n_modes + 1`: diagonal detunings on
//! the photon modes, `delta_e - i gamma/2` on `|E>`, and couplings
//! `sqrt(2) g_L(k_j) sqrt(dk)` and `g_R(k_j) sqrt(dk)` between `|E>` and the
//! two channels.
//!
//! Time stepping is a Strang splitting. The diagonal part is applied as exact
//! phases; the coupling part only mixes `|E>` with one normalized photon
//! vector, so its exponential is an exact 2x2 rotation. Each step is unitary
//! up to rounding for `gamma = 0`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::analytic::{dressed_roots, CouplingProfile};
use crate::error::{Error, Result};
use crate::model::{total_coupling, validate, Method, PhysicalParams, ProbabilityResult};
use crate::par::Execution;
use crate::spectra::{self, SpectralFunction, SpectralShape};

/// Residual excited population that counts as fully decayed.
pub const EXCITED_THRESHOLD: f64 = 1e-4;
/// Allowed norm drift for lossless runs.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimGrid {
    /// Modes per channel.
    pub n_modes: usize,
    /// Half-width `W` of the frequency window.
    pub bandwidth: f64,
    pub t_final: f64,
    pub dt: f64,
    /// Displacement of an injected packet; ignored for the cavity photon.
    #[serde(default)]
    pub tau: f64,
}

impl SimGrid {
    pub fn delta_k(&self) -> f64 {
        2.0 * self.bandwidth / (self.n_modes as f64 - 1.0)
    }

    /// Longest run before the discrete spectrum revives the initial packet.
    pub fn recurrence_limit(&self) -> f64 {
        0.8 * 2.0 * PI / self.delta_k()
    }

    /// Grid with the mode spacing halved and everything else unchanged.
    pub fn refined(&self) -> SimGrid {
        SimGrid { n_modes: 2 * (self.n_modes - 1) + 1, ..*self }
    }

    /// Default grid for a scenario: 4001 modes, `W = 40 kappa`, `dt = 0.1/W`,
    /// `tau = 10/kappa_in` for injected packets, and `t_final` long enough for
    /// the excited state to decay, capped below the recurrence limit.
    pub fn suggested(params: &PhysicalParams, f: &SpectralFunction) -> SimGrid {
        let k = params.kappa;
        let bandwidth = 40.0 * k;
        let mut grid = SimGrid { n_modes: 4001, bandwidth, t_final: 0.0, dt: 0.1 / bandwidth, tau: 0.0 };
        let roots = dressed_roots(params);
        let decay = (-2.0 * roots.omega_plus.im.max(roots.omega_minus.im)).max(1e-300);
        let mut slow = decay;
        if !matches!(f.shape, SpectralShape::CavityPhoton) {
            let w = f.width(params);
            grid.tau = 10.0 / w;
            slow = slow.min(w);
        }
        let need = grid.tau + (14.0 / slow).max(10.0 / relaxation_rate(params));
        grid.t_final = need.min(0.95 * grid.recurrence_limit());
        grid
    }

    fn check_shape(&self) -> Result<()> {
        if self.n_modes < 200 {
            return Err(Error::GridTooCoarse(format!("n_modes = {} < 200", self.n_modes)));
        }
        for (name, v) in [("bandwidth", self.bandwidth), ("t_final", self.t_final), ("dt", self.dt)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("grid {name} must be positive and finite, got {v}")));
            }
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::Config(format!("grid tau must be non-negative, got {}", self.tau)));
        }
        Ok(())
    }

    /// Recurrence and time-step guards.
    pub fn check(&self) -> Result<()> {
        self.check_shape()?;
        let limit = self.recurrence_limit();
        if self.t_final >= limit {
            return Err(Error::GridTooCoarse(format!(
                "recurrence guard: t_final = {} must be below 0.8 * 2pi/dk = {limit}",
                self.t_final
            )));
        }
        if self.dt > 0.1 / self.bandwidth {
            return Err(Error::GridTooCoarse(format!(
                "dt guard: dt = {} exceeds 0.1/W = {}",
                self.dt,
                0.1 / self.bandwidth
            )));
        }
        Ok(())
    }

    /// Extra guards for packets injected from outside the cavity.
    pub fn check_injected(&self, params: &PhysicalParams, f: &SpectralFunction) -> Result<()> {
        if matches!(f.shape, SpectralShape::CavityPhoton) {
            return Ok(());
        }
        let w = f.width(params);
        if self.tau < 5.0 / w {
            return Err(Error::GridTooCoarse(format!(
                "displacement guard: tau = {} must be at least 5/kappa_in = {}",
                self.tau,
                5.0 / w
            )));
        }
        let need = self.tau + 10.0 / relaxation_rate(params);
        if self.t_final < need {
            return Err(Error::GridTooCoarse(format!(
                "relaxation guard: t_final = {} must be at least tau + 10/relaxation rate = {need}",
                self.t_final
            )));
        }
        Ok(())
    }
}

/// `kappa` in the strong-coupling regime, `(2 lambda_L^2 + lambda_R^2)/kappa` in the weak one.
pub fn relaxation_rate(params: &PhysicalParams) -> f64 {
    params.kappa.min(total_coupling(params) / params.kappa)
}

/// The discretized single-excitation Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedModel {
    /// Mode detunings, shared by both channels.
    pub dk: Vec<f64>,
    /// `<E|H|LL; k_j>`.
    pub coupling_l: Vec<C64>,
    /// `<E|H|Phi; k_j>`.
    pub coupling_r: Vec<C64>,
    /// `delta_e - i gamma/2`.
    pub e_energy: C64,
    pub delta_k: f64,
}

impl DiscretizedModel {
    pub fn dimension(&self) -> usize {
        2 * self.dk.len() + 1
    }

    /// Matrix element in the ordering `|E>`, L modes, R modes.
    pub fn matrix_element(&self, row: usize, col: usize) -> C64 {
        let n = self.dk.len();
        let zero = C64::new(0.0, 0.0);
        let coupling = |j: usize| if j <= n { self.coupling_l[j - 1] } else { self.coupling_r[j - n - 1] };
        match (row, col) {
            (0, 0) => self.e_energy,
            (0, j) => coupling(j),
            (j, 0) => coupling(j).conj(),
            (i, j) if i == j => C64::new(self.dk[(i - 1) % n], 0.0),
            _ => zero,
        }
    }

    /// `sum_j |<E|H|LL; k_j>|^2`, the discrete counterpart of `2 lambda_L^2`.
    pub fn coupling_sum_l(&self) -> f64 {
        self.coupling_l.iter().map(|c| c.norm_sqr()).sum()
    }

    fn omega(&self) -> f64 {
        self.coupling_l
            .iter()
            .chain(&self.coupling_r)
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub fn build(params: &PhysicalParams, grid: &SimGrid) -> Result<DiscretizedModel> {
    grid.check()?;
    build_unchecked(params, grid)
}

fn build_unchecked(params: &PhysicalParams, grid: &SimGrid) -> Result<DiscretizedModel> {
    // Parameters are validated except for the couplings, which may vanish here.
    let mut probe = *params;
    if probe.lambda_l == 0.0 && probe.lambda_r == 0.0 {
        probe.lambda_l = 1.0;
    }
    validate(probe)?;
    let n = grid.n_modes;
    let delta_k = grid.delta_k();
    let w = grid.bandwidth;
    let dk: Vec<f64> = (0..n).map(|j| -w + delta_k * j as f64).collect();
    let prof = CouplingProfile::new(params);
    let s = delta_k.sqrt();
    Ok(DiscretizedModel {
        coupling_l: dk.iter().map(|&x| SQRT_2 * prof.g_l(x) * s).collect(),
        coupling_r: dk.iter().map(|&x| prof.g_r(x) * s).collect(),
        dk,
        e_energy: C64::new(params.delta_e, -0.5 * params.gamma),
        delta_k,
    })
}

/// Amplitudes of the single-excitation state.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleState {
    pub e_amp: C64,
    pub l_amps: Vec<C64>,
    pub r_amps: Vec<C64>,
}

impl OracleState {
    pub fn p_l(&self) -> f64 {
        self.l_amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn p_r(&self) -> f64 {
        self.r_amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn p_e(&self) -> f64 {
        self.e_amp.norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.p_e() + self.p_l() + self.p_r()
    }
}

/// Channel that carries the incoming photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputChannel {
    #[default]
    L,
    R,
}

/// Incoming photon in the L channel: `f(k_j) e^{i k_j tau} sqrt(dk)`, renormalized.
pub fn initial_state(f: &SpectralFunction, grid: &SimGrid, params: &PhysicalParams) -> Result<OracleState> {
    initial_state_in(f, grid, params, InputChannel::L)
}

pub fn initial_state_in(
    f: &SpectralFunction,
    grid: &SimGrid,
    params: &PhysicalParams,
    channel: InputChannel,
) -> Result<OracleState> {
    grid.check_shape()?;
    let tau = if matches!(f.shape, SpectralShape::CavityPhoton) { 0.0 } else { grid.tau };
    let delta_k = grid.delta_k();
    let s = delta_k.sqrt();
    let mut amps = Vec::with_capacity(grid.n_modes);
    for j in 0..grid.n_modes {
        let x = -grid.bandwidth + delta_k * j as f64;
        amps.push(spectra::evaluate(f, params, x)? * C64::from_polar(s, x * tau));
    }
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm < 0.99 {
        return Err(Error::NormDeficit(norm));
    }
    let scale = 1.0 / norm.sqrt();
    amps.iter_mut().for_each(|a| *a *= scale);
    let zeros = vec![C64::new(0.0, 0.0); grid.n_modes];
    let (l_amps, r_amps) = match channel {
        InputChannel::L => (amps, zeros),
        InputChannel::R => (zeros, amps),
    };
    Ok(OracleState { e_amp: C64::new(0.0, 0.0), l_amps, r_amps })
}

/// One sample of the populations during a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub p_e: f64,
    pub p_l: f64,
    pub p_r: f64,
    pub norm: f64,
}

impl TraceSample {
    fn of(t: f64, s: &OracleState) -> Self {
        let (p_e, p_l, p_r) = (s.p_e(), s.p_l(), s.p_r());
        TraceSample { t, p_e, p_l, p_r, norm: p_e + p_l + p_r }
    }
}

/// Integrate `i d/dt psi = H psi` from 0 to `grid.t_final`.
pub fn evolve(model: &DiscretizedModel, state: &OracleState, grid: &SimGrid) -> Result<OracleState> {
    evolve_traced(model, state, grid, 100).map(|(s, _)| s)
}

/// As [`evolve`], also returning populations every `sample_every` steps
/// (and at the end). The norm is checked at every sample.
pub fn evolve_traced(
    model: &DiscretizedModel,
    state: &OracleState,
    grid: &SimGrid,
    sample_every: usize,
) -> Result<(OracleState, Vec<TraceSample>)> {
    let n = model.dk.len();
    if state.l_amps.len() != n || state.r_amps.len() != n {
        return Err(Error::Config(format!(
            "state has {} + {} modes, model has {n} per channel",
            state.l_amps.len(),
            state.r_amps.len()
        )));
    }
    let steps = (grid.t_final / grid.dt).ceil().max(1.0) as usize;
    let dt = grid.t_final / steps as f64;
    let sample_every = sample_every.max(1);

    let half: Vec<C64> = model.dk.iter().map(|&x| C64::from_polar(1.0, -0.5 * x * dt)).collect();
    let e_half = (C64::new(0.0, -0.5 * dt) * model.e_energy).exp();
    let omega = model.omega();
    let (cos, sin) = ((omega * dt).cos(), (omega * dt).sin());
    let lossless = model.e_energy.im == 0.0;

    let mut s = state.clone();
    let start = TraceSample::of(0.0, &s);
    let mut trace = vec![start];
    let mut last_norm = start.norm;

    let diagonal = |s: &mut OracleState| {
        s.e_amp *= e_half;
        for ((l, r), p) in s.l_amps.iter_mut().zip(s.r_amps.iter_mut()).zip(&half) {
            *l *= p;
            *r *= p;
        }
    };

    for step in 1..=steps {
        diagonal(&mut s);
        if omega > 0.0 {
            let mut beta = C64::new(0.0, 0.0);
            for j in 0..n {
                beta += model.coupling_l[j] * s.l_amps[j] + model.coupling_r[j] * s.r_amps[j];
            }
            beta /= omega;
            let e = s.e_amp;
            let minus_i = C64::new(0.0, -1.0);
            s.e_amp = e * cos + minus_i * sin * beta;
            let beta_new = minus_i * sin * e + beta * cos;
            let shift = (beta_new - beta) / omega;
            for j in 0..n {
                s.l_amps[j] += shift * model.coupling_l[j].conj();
                s.r_amps[j] += shift * model.coupling_r[j].conj();
            }
        }
        diagonal(&mut s);

        if step % sample_every == 0 || step == steps {
            let sample = TraceSample::of(step as f64 * dt, &s);
            if lossless {
                let drift = (sample.norm - start.norm).abs();
                if drift > NORM_DRIFT_LIMIT {
                    return Err(Error::NormDriftExceeded { drift, limit: NORM_DRIFT_LIMIT });
                }
            } else if sample.norm > last_norm + 1e-12 {
                return Err(Error::NormDriftExceeded { drift: sample.norm - last_norm, limit: 1e-12 });
            }
            last_norm = sample.norm;
            trace.push(sample);
        }
    }
    Ok((s, trace))
}

/// Populations at the end of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Populations {
    pub p_l: f64,
    pub p_r: f64,
    pub p_e: f64,
}

/// Full record of a simulated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    /// Result on the requested grid, with the refinement difference as error.
    pub result: ProbabilityResult,
    pub base: Populations,
    /// Same run with the mode spacing halved.
    pub refined: Populations,
    pub trace: Vec<TraceSample>,
}

fn run_once(
    params: &PhysicalParams,
    f: &SpectralFunction,
    grid: &SimGrid,
    channel: InputChannel,
    sample_every: usize,
) -> Result<(Populations, Vec<TraceSample>)> {
    let model = build(params, grid)?;
    let psi0 = initial_state_in(f, grid, params, channel)?;
    let (psi, trace) = evolve_traced(&model, &psi0, grid, sample_every)?;
    let pops = Populations { p_l: psi.p_l(), p_r: psi.p_r(), p_e: psi.p_e() };
    if pops.p_e >= EXCITED_THRESHOLD {
        return Err(Error::NotConverged(pops.p_e));
    }
    Ok((pops, trace))
}

/// Simulate one experiment on `grid` and on the grid with half the mode
/// spacing; the difference is reported as `err_estimate`.
pub fn simulate_experiment(params: &PhysicalParams, f: &SpectralFunction, grid: &SimGrid) -> Result<ProbabilityResult> {
    simulate_detailed(params, f, grid, InputChannel::L, Execution::available()).map(|r| r.result)
}

pub fn simulate_detailed(
    params: &PhysicalParams,
    f: &SpectralFunction,
    grid: &SimGrid,
    channel: InputChannel,
    exec: Execution,
) -> Result<OracleRun> {
    let p = validate(*params)?;
    grid.check()?;
    grid.check_injected(&p, f)?;
    let fine = grid.refined();
    let (base, refined) = exec.join(
        || run_once(&p, f, grid, channel, 100),
        || run_once(&p, f, &fine, channel, 100),
    );
    let (base, trace) = base?;
    let (refined, _) = refined?;
    let err = (base.p_r - refined.p_r).abs().max((base.p_l - refined.p_l).abs());
    let p_loss = (1.0 - base.p_l - base.p_r - base.p_e).max(0.0);
    Ok(OracleRun {
        result: ProbabilityResult { p_l: base.p_l, p_r: base.p_r, p_loss, method: Method::Oracle, err_estimate: err },
        base,
        refined,
        trace,
    })
}

//! One-dimensional parameter sweeps and the coupling-ratio optimizer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::{
    cavity_photon_probs_closed, cavity_photon_probs_quadrature, cavity_pr_closed_form, injected_pr,
};
use crate::error::{Error, Result};
use crate::harness::output::{fmt_num, CsvTable};
use crate::model::{Method, PhysicalParams, ProbabilityResult};
use crate::oracle::{simulate_experiment, SimGrid};
use crate::par::Execution;
use crate::spectra::{SpectralFunction, SpectralShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// `lambda_L / lambda_R` with `lambda_R` held fixed.
    RatioLambdaLOverLambdaR,
    /// `kappa_in / kappa` for a Lorentzian or Gaussian spectrum.
    KappaInOverKappa,
    DeltaE,
    Gamma,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::RatioLambdaLOverLambdaR => "ratio_lambdaL_over_lambdaR",
            SweepAxis::KappaInOverKappa => "kappa_in_over_kappa",
            SweepAxis::DeltaE => "delta_e",
            SweepAxis::Gamma => "gamma",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [SweepAxis::RatioLambdaLOverLambdaR, SweepAxis::KappaInOverKappa, SweepAxis::DeltaE, SweepAxis::Gamma]
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep axis `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    /// Additional abscissae merged into the uniform grid.
    pub extra_points: Vec<f64>,
    pub params: PhysicalParams,
    pub spectrum: SpectralFunction,
    pub engines: Vec<Method>,
    pub grid: Option<SimGrid>,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, lo: f64, hi: f64, steps: usize, params: PhysicalParams, spectrum: SpectralFunction) -> Self {
        Self { axis, lo, hi, steps, extra_points: Vec::new(), params, spectrum, engines: vec![Method::Quadrature], grid: None }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::Config(format!("sweep range needs lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.steps < 2 {
            return Err(Error::Config(format!("sweep needs at least 2 steps, got {}", self.steps)));
        }
        if self.engines.is_empty() {
            return Err(Error::Config("sweep needs at least one engine".into()));
        }
        if self.engines.contains(&Method::Oracle) && self.grid.is_none() {
            return Err(Error::Config("oracle engine requires a simulation grid".into()));
        }
        if self.axis == SweepAxis::RatioLambdaLOverLambdaR && self.params.lambda_r <= 0.0 {
            return Err(Error::Config("ratio axis needs lambda_R > 0".into()));
        }
        if self.axis == SweepAxis::KappaInOverKappa
            && !matches!(self.spectrum.shape, SpectralShape::Lorentzian { .. } | SpectralShape::Gaussian { .. })
        {
            return Err(Error::Config("kappa_in axis needs a lorentzian or gaussian spectrum".into()));
        }
        Ok(())
    }

    /// Sorted abscissae: the uniform grid plus `extra_points`. Extra points
    /// replace uniform points closer than `1e-9` of the range.
    pub fn abscissae(&self) -> Vec<f64> {
        let n = self.steps;
        let h = (self.hi - self.lo) / (n - 1) as f64;
        let close = 1e-9 * (self.hi - self.lo);
        let mut xs: Vec<f64> = (0..n)
            .map(|j| if j == n - 1 { self.hi } else { self.lo + h * j as f64 })
            .filter(|x| self.extra_points.iter().all(|e| (e - x).abs() > close))
            .collect();
        xs.extend(self.extra_points.iter().copied().filter(|e| e.is_finite()));
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() <= close);
        xs
    }

    /// Parameters and spectrum at one axis value.
    pub fn point(&self, v: f64) -> Result<(PhysicalParams, SpectralFunction)> {
        let mut p = self.params;
        let mut f = self.spectrum.clone();
        match self.axis {
            SweepAxis::RatioLambdaLOverLambdaR => p.lambda_l = v * p.lambda_r,
            SweepAxis::DeltaE => p.delta_e = v,
            SweepAxis::Gamma => p.gamma = v,
            SweepAxis::KappaInOverKappa => {
                let kappa_in = v * p.kappa;
                let base = match f.shape {
                    SpectralShape::Lorentzian { .. } => SpectralFunction::lorentzian(kappa_in)?,
                    _ => SpectralFunction::gaussian(kappa_in)?,
                };
                f = base.with_peak_offset(f.peak_offset).with_tau(f.tau);
            }
        }
        Ok((p.validate()?, f))
    }
}

/// One engine's outcome on one row; failures are kept as messages.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineOutcome {
    pub method: Method,
    pub outcome: std::result::Result<ProbabilityResult, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub results: Vec<EngineOutcome>,
}

impl SweepRow {
    pub fn get(&self, method: Method) -> Option<&ProbabilityResult> {
        self.results.iter().find(|r| r.method == method).and_then(|r| r.outcome.as_ref().ok())
    }
}

/// Evaluate one engine at one parameter point.
pub fn run_engine(
    method: Method,
    params: &PhysicalParams,
    f: &SpectralFunction,
    grid: Option<&SimGrid>,
) -> Result<ProbabilityResult> {
    let cavity = matches!(f.shape, SpectralShape::CavityPhoton);
    match method {
        Method::ClosedForm if cavity => cavity_photon_probs_closed(params),
        Method::ClosedForm => Err(Error::Config("closed form covers the cavity photon only".into())),
        Method::Quadrature if cavity => cavity_photon_probs_quadrature(params),
        Method::Quadrature => injected_pr(params, f),
        Method::Oracle => {
            let grid = grid.ok_or_else(|| Error::Config("oracle engine requires a simulation grid".into()))?;
            simulate_experiment(params, f, grid)
        }
    }
}

pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    sweep_with(spec, Execution::available())
}

/// Rows are evaluated independently (in parallel if requested) and returned
/// in ascending axis order. Engine failures are recorded per row.
pub fn sweep_with(spec: &SweepSpec, exec: Execution) -> Result<Vec<SweepRow>> {
    spec.check()?;
    let xs = spec.abscissae();
    Ok(exec.map(&xs, |&v| {
        let results = match spec.point(v) {
            Ok((p, f)) => spec
                .engines
                .iter()
                .map(|&method| EngineOutcome {
                    method,
                    outcome: run_engine(method, &p, &f, spec.grid.as_ref()).map_err(|e| e.to_string()),
                })
                .collect(),
            Err(e) => spec
                .engines
                .iter()
                .map(|&method| EngineOutcome { method, outcome: Err(e.to_string()) })
                .collect(),
        };
        SweepRow { axis_value: v, results }
    }))
}

/// Table with one `p_l, p_r, p_loss, err, error` column group per engine.
pub fn sweep_table(spec: &SweepSpec, rows: &[SweepRow]) -> CsvTable {
    let mut header = vec![spec.axis.as_str().to_string()];
    for m in &spec.engines {
        for col in ["p_l", "p_r", "p_loss", "err", "error"] {
            header.push(format!("{m}_{col}"));
        }
    }
    let mut t = CsvTable::new(header);
    t.meta("axis", spec.axis)
        .meta("range", format!("{} {} {}", fmt_num(spec.lo), fmt_num(spec.hi), spec.steps));
    super::echo_params(&mut t, &spec.params);
    super::echo_spectrum(&mut t, &spec.spectrum);
    if spec.axis == SweepAxis::KappaInOverKappa {
        t.metadata.retain(|(k, _)| k != "kappa_in");
    }
    if let Some(g) = &spec.grid {
        super::echo_grid(&mut t, g);
    }
    for row in rows {
        let mut cells = vec![fmt_num(row.axis_value)];
        for r in &row.results {
            match &r.outcome {
                Ok(p) => cells.extend([
                    fmt_num(p.p_l),
                    fmt_num(p.p_r),
                    fmt_num(p.p_loss),
                    fmt_num(p.err_estimate),
                    String::new(),
                ]),
                Err(e) => cells.extend([String::new(), String::new(), String::new(), String::new(), e.clone()]),
            }
        }
        t.push(cells);
    }
    t
}

/// Golden-section maximum of `f` on `[a, b]`, stopping when the bracket is
/// narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Maximize the closed-form cavity-photon `P_R` over `lambda_R` in
/// `(0, 10 lambda_L]` for the given `lambda_L`, `kappa` and `delta_e`.
/// Returns `(lambda_R*, P_R*)`.
pub fn optimize_ratio(params: &PhysicalParams) -> (f64, f64) {
    let lam = params.lambda_l;
    golden_section_max(
        |lr| cavity_pr_closed_form(lam, lr, params.kappa, params.delta_e),
        0.0,
        10.0 * lam,
        1e-8 * lam,
    )
}

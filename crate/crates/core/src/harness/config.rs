//! Run configuration: a JSON file whose fields can be overridden from the
//! command line.
//!
//! ```json
//! {"params": {"lambda_L": 0.25, "lambda_R": 0.3536, "kappa": 1.0},
//!  "spectrum": {"shape": "gaussian", "kappa_in": 0.3},
//!  "grid": {"n_modes": 4001, "bandwidth": 40.0},
//!  "engines": ["quadrature", "oracle"]}
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate, Method, PhysicalParams};
use crate::oracle::SimGrid;
use crate::spectra::{SpectralFunction, SpectralShape};

/// Physical parameters with every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(rename = "lambda_L", alias = "lambda_l", default)]
    pub lambda_l: Option<f64>,
    #[serde(rename = "lambda_R", alias = "lambda_r", default)]
    pub lambda_r: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub k_c: Option<f64>,
    #[serde(default)]
    pub delta_e: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(rename = "delta_LR", alias = "delta_lr", default)]
    pub delta_lr: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// `cavity_photon`, `lorentzian`, `gaussian` or `tabulated`.
    #[serde(default)]
    pub shape: Option<String>,
    #[serde(default)]
    pub kappa_in: Option<f64>,
    #[serde(default)]
    pub peak_offset: Option<f64>,
    #[serde(default)]
    pub tau: Option<f64>,
    /// CSV table for the `tabulated` shape.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub n_modes: Option<usize>,
    #[serde(default)]
    pub bandwidth: Option<f64>,
    #[serde(default)]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub tau: Option<f64>,
}

/// Contents of a config file, or of command-line flags, before resolution.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub engines: Option<Vec<Method>>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

fn pick<T: Clone>(over: &Option<T>, base: &Option<T>) -> Option<T> {
    over.clone().or_else(|| base.clone())
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `over` win; the rest come from `self`.
    pub fn overridden_by(&self, over: &ConfigFile) -> ConfigFile {
        let (p, q) = (&over.params, &self.params);
        let (s, t) = (&over.spectrum, &self.spectrum);
        let grid = match (&over.grid, &self.grid) {
            (None, None) => None,
            (g, h) => {
                let (g, h) = (g.clone().unwrap_or_default(), h.clone().unwrap_or_default());
                Some(GridConfig {
                    n_modes: pick(&g.n_modes, &h.n_modes),
                    bandwidth: pick(&g.bandwidth, &h.bandwidth),
                    t_final: pick(&g.t_final, &h.t_final),
                    dt: pick(&g.dt, &h.dt),
                    tau: pick(&g.tau, &h.tau),
                })
            }
        };
        ConfigFile {
            params: ParamsConfig {
                lambda_l: pick(&p.lambda_l, &q.lambda_l),
                lambda_r: pick(&p.lambda_r, &q.lambda_r),
                kappa: pick(&p.kappa, &q.kappa),
                k_c: pick(&p.k_c, &q.k_c),
                delta_e: pick(&p.delta_e, &q.delta_e),
                gamma: pick(&p.gamma, &q.gamma),
                delta_lr: pick(&p.delta_lr, &q.delta_lr),
            },
            spectrum: SpectrumConfig {
                shape: pick(&s.shape, &t.shape),
                kappa_in: pick(&s.kappa_in, &t.kappa_in),
                peak_offset: pick(&s.peak_offset, &t.peak_offset),
                tau: pick(&s.tau, &t.tau),
                path: pick(&s.path, &t.path),
            },
            grid,
            engines: pick(&over.engines, &self.engines),
            output_path: pick(&over.output_path, &self.output_path),
        }
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let p = &self.params;
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Config(format!("missing parameter {name}")));
        let params = validate(PhysicalParams {
            lambda_l: need(p.lambda_l, "lambda_L")?,
            lambda_r: need(p.lambda_r, "lambda_R")?,
            kappa: need(p.kappa, "kappa")?,
            k_c: p.k_c.unwrap_or(0.0),
            delta_e: p.delta_e.unwrap_or(0.0),
            gamma: p.gamma.unwrap_or(0.0),
            delta_lr: p.delta_lr.unwrap_or(0.0),
        })?;
        let spectrum = self.spectrum.build()?;
        Ok(RunConfig {
            params,
            spectrum,
            grid: self.grid.clone(),
            engines: self.engines.clone(),
            output_path: self.output_path.clone(),
        })
    }
}

impl SpectrumConfig {
    /// Spectrum described by this record. `kappa_in` is in absolute units.
    pub fn build(&self) -> Result<SpectralFunction> {
        let shape = self.shape.as_deref().unwrap_or("cavity_photon");
        let kappa_in = || {
            self.kappa_in
                .ok_or_else(|| Error::Config(format!("spectrum `{shape}` needs kappa_in")))
        };
        let f = match shape {
            "cavity_photon" => SpectralFunction::cavity_photon(),
            "lorentzian" => SpectralFunction::lorentzian(kappa_in()?)?,
            "gaussian" => SpectralFunction::gaussian(kappa_in()?)?,
            "tabulated" => {
                let path = self
                    .path
                    .as_ref()
                    .ok_or_else(|| Error::Config("tabulated spectrum needs a path".into()))?;
                SpectralFunction::load_csv(path)?
            }
            other => return Err(Error::Config(format!("unknown spectrum shape `{other}`"))),
        };
        let f = f.with_tau(self.tau.unwrap_or(0.0));
        Ok(match f.shape {
            SpectralShape::CavityPhoton | SpectralShape::Tabulated { .. } => f,
            _ => f.with_peak_offset(self.peak_offset.unwrap_or(0.0)),
        })
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub spectrum: SpectralFunction,
    pub grid: Option<GridConfig>,
    pub engines: Option<Vec<Method>>,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    /// Oracle grid: explicit fields first, then the spectrum's `tau`, then
    /// [`SimGrid::suggested`].
    pub fn sim_grid(&self) -> SimGrid {
        let d = SimGrid::suggested(&self.params, &self.spectrum);
        let g = self.grid.clone().unwrap_or_default();
        let tau = g.tau.or((self.spectrum.tau > 0.0).then_some(self.spectrum.tau)).unwrap_or(d.tau);
        let n_modes = g.n_modes.unwrap_or(d.n_modes);
        let bandwidth = g.bandwidth.unwrap_or(d.bandwidth);
        let mut grid = SimGrid { n_modes, bandwidth, t_final: d.t_final, dt: g.dt.unwrap_or(0.1 / bandwidth), tau };
        grid.t_final = match g.t_final {
            Some(t) => t,
            None => {
                let extra = (d.t_final - d.tau).max(0.0);
                (tau + extra).min(0.95 * grid.recurrence_limit())
            }
        };
        grid
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_layout() {
        let json = r#"{"params": {"lambda_L": 0.25, "lambda_R": 0.3536, "kappa": 1.0},
            "spectrum": {"shape": "gaussian", "kappa_in": 0.3},
            "grid": {"n_modes": 4001, "bandwidth": 40.0},
            "engines": ["quadrature", "oracle"]}"#;
        let c: ConfigFile = serde_json::from_str(json).unwrap();
        let r = c.resolve().unwrap();
        assert_eq!(r.params.lambda_l, 0.25);
        assert_eq!(r.engines, Some(vec![Method::Quadrature, Method::Oracle]));
        let g = r.sim_grid();
        assert_eq!(g.n_modes, 4001);
        assert!((g.tau - 10.0 / 0.3).abs() < 1e-12);
        g.check().unwrap();
    }

    #[test]
    fn flags_override_file() {
        let file: ConfigFile = serde_json::from_str(r#"{"params": {"lambda_L": 1, "lambda_R": 1, "kappa": 2}}"#).unwrap();
        let flags = ConfigFile {
            params: ParamsConfig { kappa: Some(0.5), ..Default::default() },
            ..Default::default()
        };
        let r = file.overridden_by(&flags).resolve().unwrap();
        assert_eq!(r.params.kappa, 0.5);
        assert_eq!(r.params.lambda_r, 1.0);
    }

    #[test]
    fn missing_and_unknown_fields() {
        let c: ConfigFile = serde_json::from_str(r#"{"params": {"lambda_L": 1, "kappa": 2}}"#).unwrap();
        assert!(matches!(c.resolve(), Err(Error::Config(m)) if m.contains("lambda_R")));
        assert!(serde_json::from_str::<ConfigFile>(r#"{"param": {}}"#).is_err());
        let c: ConfigFile =
            serde_json::from_str(r#"{"params": {"lambda_L": 1, "lambda_R": 1, "kappa": 2}, "spectrum": {"shape": "gaussian"}}"#)
                .unwrap();
        assert!(matches!(c.resolve(), Err(Error::Config(_))));
    }
}

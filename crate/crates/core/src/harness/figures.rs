//! Data behind the three result figures.
//!
//! * Figure 3: cavity-photon `P_R` against `lambda_L / lambda_R` for
//!   `kappa / lambda_R = 0, sqrt(2)/3, 7.5` (closed form).
//! * Figure 4: Lorentzian injected photon, `P_R` against `kappa_in / kappa`
//!   for `lambda_L / kappa = 2.5, 0.25, 0.13` (quadrature).
//! * Figure 5: as figure 4 with a Gaussian spectrum.
//!
//! Figures 4 and 5 use `lambda_R = sqrt(2) lambda_L`.

use std::f64::consts::SQRT_2;
use std::path::{Path, PathBuf};

use crate::analytic::{cavity_pr_closed_form, injected_pr};
use crate::error::{Error, Result};
use crate::harness::output::{fmt_num, CsvTable};
use crate::model::PhysicalParams;
use crate::par::Execution;
use crate::spectra::SpectralFunction;

/// A named curve ready to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureCurve {
    pub file_name: String,
    pub table: CsvTable,
}

fn uniform(lo: f64, hi: f64, n: usize, landmarks: &[f64]) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    let close = 1e-9 * (hi - lo);
    let mut xs: Vec<f64> = (0..n)
        .map(|j| if j == n - 1 { hi } else { lo + h * j as f64 })
        .filter(|x| landmarks.iter().all(|l| (l - x).abs() > close))
        .collect();
    xs.extend_from_slice(landmarks);
    xs.sort_by(f64::total_cmp);
    xs
}

fn curve_table(axis: &str, xs: &[f64], values: &[(f64, f64)]) -> CsvTable {
    let mut t = CsvTable::new([axis, "p_r", "err"]);
    for (x, (p, e)) in xs.iter().zip(values) {
        t.push(vec![fmt_num(*x), fmt_num(*p), fmt_num(*e)]);
    }
    t
}

fn figure3(exec: Execution) -> Vec<FigureCurve> {
    let lambda_r = 1.0;
    let ratios = [(0.0, "0"), (SQRT_2 / 3.0, "sqrt2_over_3"), (7.5, "7p5")];
    let landmarks = [1.0 / SQRT_2, (5.0f64 / 6.0).sqrt(), 1.0];
    let xs = uniform(0.2, 3.0, 281, &landmarks);
    ratios
        .iter()
        .map(|&(c, tag)| {
            let kappa = c * lambda_r;
            let values = exec.map(&xs, |&x| (cavity_pr_closed_form(x * lambda_r, lambda_r, kappa, 0.0), 0.0));
            let mut table = curve_table("lambda_L_over_lambda_R", &xs, &values);
            let mut head = CsvTable::default();
            head.meta("figure", 3)
                .meta("spectrum", "cavity_photon")
                .meta("engine", "closed_form")
                .meta("lambda_R", fmt_num(lambda_r))
                .meta("kappa_over_lambda_R", fmt_num(c))
                .meta("delta_e", 0)
                .meta("gamma", 0);
            table.metadata = head.metadata;
            FigureCurve { file_name: format!("fig3_kappa_over_lambda_r_{tag}.csv"), table }
        })
        .collect()
}

fn injected_figure(id: u8, exec: Execution) -> Result<Vec<FigureCurve>> {
    let kappa = 1.0;
    let xs = uniform(0.01, 2.0, 200, &[0.3]);
    let curves = [(2.5, "2p5"), (0.25, "0p25"), (0.13, "0p13")];
    let mut out = Vec::new();
    for (ll, tag) in curves {
        let params = PhysicalParams::new(ll * kappa, SQRT_2 * ll * kappa, kappa);
        let results = exec.map(&xs, |&x| {
            let f = if id == 4 {
                SpectralFunction::lorentzian(x * kappa)?
            } else {
                SpectralFunction::gaussian(x * kappa)?
            };
            injected_pr(&params, &f).map(|r| (r.p_r, r.err_estimate))
        });
        let values = results.into_iter().collect::<Result<Vec<_>>>()?;
        let mut table = curve_table("kappa_in_over_kappa", &xs, &values);
        let mut head = CsvTable::default();
        head.meta("figure", id)
            .meta("spectrum", if id == 4 { "lorentzian" } else { "gaussian" })
            .meta("engine", "quadrature")
            .meta("kappa", fmt_num(kappa))
            .meta("lambda_L_over_kappa", fmt_num(ll))
            .meta("lambda_R", "sqrt(2) lambda_L")
            .meta("delta_e", 0)
            .meta("gamma", 0);
        table.metadata = head.metadata;
        let kind = if id == 4 { "lorentzian" } else { "gaussian" };
        out.push(FigureCurve { file_name: format!("fig{id}_{kind}_lambda_l_over_kappa_{tag}.csv"), table });
    }
    Ok(out)
}

/// Curves of one figure, computed but not written.
pub fn figure_curves(id: u8, exec: Execution) -> Result<Vec<FigureCurve>> {
    match id {
        3 => Ok(figure3(exec)),
        4 | 5 => injected_figure(id, exec),
        other => Err(Error::Config(format!("no figure {other}; choose 3, 4 or 5"))),
    }
}

/// Write one CSV per curve into `out_dir` (created if missing).
pub fn figure(id: u8, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let curves = figure_curves(id, Execution::available())?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let mut paths = Vec::new();
    for c in curves {
        let path = out_dir.join(&c.file_name);
        c.table.save(&path)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value_at(c: &FigureCurve, x: f64) -> f64 {
        let row = c.table.rows.iter().find(|r| (r[0].parse::<f64>().unwrap() - x).abs() < 1e-11).unwrap();
        row[1].parse().unwrap()
    }

    #[test]
    fn figure3_landmarks() {
        let curves = figure_curves(3, Execution::available()).unwrap();
        assert_eq!(curves.len(), 3);
        assert!((value_at(&curves[1], 1.0) - 3.0 / 7.0).abs() < 1e-11);
        assert!((value_at(&curves[1], (5.0f64 / 6.0).sqrt()) - 0.45).abs() < 1e-11);
        assert!((value_at(&curves[0], 1.0 / SQRT_2) - 0.5).abs() < 1e-11);
        let max = curves[0].table.rows.iter().map(|r| r[1].parse::<f64>().unwrap()).fold(0.0, f64::max);
        assert!((max - 0.5).abs() < 1e-11);
        assert!(value_at(&curves[2], 1.0) < 0.05);
    }

    #[test]
    fn unknown_figure() {
        assert!(matches!(figure_curves(6, Execution::Sequential), Err(Error::Config(_))));
    }
}

//! Sweeps, optimization, figure data, configuration and the command line.

pub mod cli;
pub mod config;
pub mod figures;
pub mod output;
pub mod sweep;

use crate::model::PhysicalParams;
use crate::oracle::SimGrid;
use crate::spectra::{SpectralFunction, SpectralShape};
use output::{fmt_num, CsvTable};

pub(crate) fn echo_params(t: &mut CsvTable, p: &PhysicalParams) {
    t.meta("lambda_L", fmt_num(p.lambda_l))
        .meta("lambda_R", fmt_num(p.lambda_r))
        .meta("kappa", fmt_num(p.kappa))
        .meta("k_c", fmt_num(p.k_c))
        .meta("delta_e", fmt_num(p.delta_e))
        .meta("gamma", fmt_num(p.gamma))
        .meta("delta_LR", fmt_num(p.delta_lr));
}

pub(crate) fn echo_spectrum(t: &mut CsvTable, f: &SpectralFunction) {
    t.meta("spectrum", f.label());
    match &f.shape {
        SpectralShape::Lorentzian { kappa_in } | SpectralShape::Gaussian { kappa_in } => {
            t.meta("kappa_in", fmt_num(*kappa_in)).meta("peak_offset", fmt_num(f.peak_offset));
        }
        SpectralShape::Tabulated { dk, .. } => {
            t.meta("table_points", dk.len());
        }
        SpectralShape::CavityPhoton => {}
    }
    t.meta("tau", fmt_num(f.tau));
}

pub(crate) fn echo_grid(t: &mut CsvTable, g: &SimGrid) {
    t.meta("n_modes", g.n_modes)
        .meta("bandwidth", fmt_num(g.bandwidth))
        .meta("t_final", fmt_num(g.t_final))
        .meta("dt", fmt_num(g.dt))
        .meta("grid_tau", fmt_num(g.tau));
}

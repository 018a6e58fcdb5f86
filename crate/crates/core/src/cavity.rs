//! One-sided cavity: a perfect mirror at `x = 0` and a partially transmitting
//! mirror at `x = l`. Provides the continuous-frequency mode functions and the
//! complex resonances (quasi-modes) that the single-mode coupling is built on.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Reflection/transmission model of the output mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MirrorModel {
    /// Infinitely thin dielectric slab, permittivity `1 + zeta * delta(x - l)`.
    ThinDielectric { zeta: f64 },
    /// Frequency-independent coefficients.
    Constant { r: C64, t: C64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorSpec {
    pub model: MirrorModel,
    /// Cavity length.
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiMode {
    pub n: i64,
    /// Resonance frequency.
    pub k_n: f64,
    /// Linewidth (leakage rate).
    pub kappa_n: f64,
    /// `|1 + r(k) e^{2ikl}|` at the complex frequency `k_n - i kappa_n / 2`.
    pub residual: f64,
}

impl QuasiMode {
    pub fn complex_frequency(&self) -> C64 {
        C64::new(self.k_n, -0.5 * self.kappa_n)
    }
}

impl MirrorSpec {
    pub fn thin_dielectric(zeta: f64, length: f64) -> Result<Self> {
        if !(zeta >= 0.0 && zeta.is_finite()) {
            return Err(Error::InvalidMirror(format!("zeta must be finite and >= 0, got {zeta}")));
        }
        Self::checked(MirrorModel::ThinDielectric { zeta }, length)
    }

    /// Constant-coefficient mirror; `|R(k)| = 1` is checked on a k scan.
    pub fn constant(r: C64, t: C64, length: f64) -> Result<Self> {
        let spec = Self::checked(MirrorModel::Constant { r, t }, length)?;
        let fsr = PI / length;
        for j in 1..=64 {
            let k = fsr * j as f64 / 16.0 + 0.0137 * fsr;
            let d = 1.0 + r * (2.0 * I * k * length).exp();
            if d.norm() < 1e-12 {
                continue;
            }
            let big_r = exterior_reflection(&spec, k)?;
            if (big_r.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidMirror(format!(
                    "|R(k)| = {} at k = {k}; constant coefficients must satisfy r + t = -r/conj(r)",
                    big_r.norm()
                )));
            }
        }
        Ok(spec)
    }

    /// Constant mirror with reflection `r` and the transmission that makes the
    /// exterior reflection unimodular: `t = -r/conj(r) - r`.
    pub fn constant_lossless(r: C64, length: f64) -> Result<Self> {
        if r.norm() == 0.0 {
            return Self::constant(C64::new(0.0, 0.0), C64::new(1.0, 0.0), length);
        }
        let t = -r / r.conj() - r;
        Self::constant(r, t, length)
    }

    fn checked(model: MirrorModel, length: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidMirror(format!("cavity length must be positive, got {length}")));
        }
        Ok(Self { model, length })
    }

    /// Reflection coefficient continued to complex `k`.
    pub fn r_complex(&self, k: C64) -> C64 {
        match self.model {
            MirrorModel::ThinDielectric { zeta } => {
                let beta = 0.5 * zeta * k;
                I * beta / (1.0 - I * beta)
            }
            MirrorModel::Constant { r, .. } => r,
        }
    }

    fn dr_dk(&self, k: C64) -> C64 {
        match self.model {
            MirrorModel::ThinDielectric { zeta } => {
                let beta = 0.5 * zeta * k;
                let d = 1.0 - I * beta;
                I * (0.5 * zeta) / (d * d)
            }
            MirrorModel::Constant { .. } => C64::new(0.0, 0.0),
        }
    }

    /// Relative change of `r` across one free spectral range,
    /// `(pi/l) |d ln r / dk|`. The approximate quasi-mode formula is accurate
    /// to roughly this quantity divided by `2 pi`, relative to the linewidth.
    pub fn fsr_variation(&self, k: f64) -> f64 {
        let kc = C64::new(k, 0.0);
        let r = self.r_complex(kc);
        if r.norm() == 0.0 {
            return f64::INFINITY;
        }
        PI / self.length * (self.dr_dk(kc) / r).norm()
    }
}

fn require_positive_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("wave number must be positive, got {k}")))
    }
}

/// Mirror reflection and transmission coefficients at wave number `k`.
pub fn mirror_coeffs(m: &MirrorSpec, k: f64) -> Result<(C64, C64)> {
    require_positive_k(k)?;
    Ok(match m.model {
        MirrorModel::ThinDielectric { zeta } => {
            let beta = 0.5 * zeta * k;
            let d = C64::new(1.0, -beta);
            (I * beta / d, 1.0 / d)
        }
        MirrorModel::Constant { r, t } => (r, t),
    })
}

fn pole_denominator(m: &MirrorSpec, r: C64, k: f64) -> Result<C64> {
    let d = 1.0 + r * (2.0 * I * k * m.length).exp();
    if d.norm() < 1e-14 {
        return Err(Error::PoleProximity(format!("1 + r e^(2ikl) vanishes at k = {k}")));
    }
    Ok(d)
}

/// Interior amplitude `I(k) = -2it / (1 + r e^{2ikl})`.
pub fn interior_coeff(m: &MirrorSpec, k: f64) -> Result<C64> {
    let (r, t) = mirror_coeffs(m, k)?;
    let d = pole_denominator(m, r, k)?;
    Ok(-2.0 * I * t / d)
}

/// Exterior reflection `R(k) = (-r - t + r e^{-2ikl}) / (1 + r e^{2ikl})`.
pub fn exterior_reflection(m: &MirrorSpec, k: f64) -> Result<C64> {
    let (r, t) = mirror_coeffs(m, k)?;
    let d = pole_denominator(m, r, k)?;
    Ok((-r - t + r * (-2.0 * I * k * m.length).exp()) / d)
}

/// Mode function `U_k(x)`: `I(k) sin(kx)` inside, `e^{-ikx} + R(k) e^{ikx}` outside.
pub fn mode_function(m: &MirrorSpec, k: f64, x: f64) -> Result<C64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Config(format!("position must be positive, got {x}")));
    }
    if x <= m.length {
        Ok(interior_coeff(m, k)? * (k * x).sin())
    } else {
        let big_r = exterior_reflection(m, k)?;
        Ok((-I * k * x).exp() + big_r * (I * k * x).exp())
    }
}

/// Exterior branch evaluated at any `x`; used to check continuity at the mirror.
pub fn exterior_branch(m: &MirrorSpec, k: f64, x: f64) -> Result<C64> {
    let big_r = exterior_reflection(m, k)?;
    Ok((-I * k * x).exp() + big_r * (I * k * x).exp())
}

fn approx_root(m: &MirrorSpec, n: i64) -> Result<(f64, f64)> {
    if n < 0 {
        return Err(Error::Config(format!("mode index must be non-negative, got {n}")));
    }
    let l = m.length;
    let target = (2 * n + 1) as f64 * PI;
    // Phase condition 2kl + arg r(k) = (2n+1) pi; arg r lies in (-pi, pi], so
    // the root is bracketed by k -> 0+ and k = (2n+2) pi / 2l.
    let phase = |k: f64| 2.0 * k * l + m.r_complex(C64::new(k, 0.0)).arg() - target;
    let (mut lo, mut hi) = (1e-12 * PI / l, (target + PI) / (2.0 * l));
    if phase(lo) > 0.0 || phase(hi) < 0.0 {
        return Err(Error::NoConvergence(format!("mode {n}: phase condition not bracketed")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phase(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    let r = m.r_complex(C64::new(k, 0.0)).norm();
    if r == 0.0 {
        return Err(Error::NoConvergence(format!("mode {n}: mirror is transparent at k = {k}")));
    }
    Ok((k, -r.ln() / l))
}

fn root_residual(m: &MirrorSpec, k: C64) -> C64 {
    1.0 + m.r_complex(k) * (2.0 * I * k * m.length).exp()
}

/// Quasi-modes from the slowly-varying-mirror approximation
/// `k_n = [(2n+1) pi - arg r(k_n)] / 2l`, `kappa_n = -ln|r(k_n)| / l`.
pub fn quasi_modes_approx(m: &MirrorSpec, n_lo: i64, n_hi: i64) -> Result<Vec<QuasiMode>> {
    (n_lo..=n_hi)
        .map(|n| {
            let (k_n, kappa_n) = approx_root(m, n)?;
            let residual = root_residual(m, C64::new(k_n, -0.5 * kappa_n)).norm();
            Ok(QuasiMode { n, k_n, kappa_n, residual })
        })
        .collect()
}

/// Complex roots of `1 + r(k) e^{2ikl} = 0` by damped Newton iteration,
/// seeded from [`quasi_modes_approx`].
pub fn quasi_modes_exact(m: &MirrorSpec, n_lo: i64, n_hi: i64) -> Result<Vec<QuasiMode>> {
    (n_lo..=n_hi).map(|n| exact_root(m, n)).collect()
}

fn exact_root(m: &MirrorSpec, n: i64) -> Result<QuasiMode> {
    let (k0, kappa0) = approx_root(m, n)?;
    let l = m.length;
    let mut k = C64::new(k0, -0.5 * kappa0);
    let mut f = root_residual(m, k);
    for _ in 0..100 {
        if f.norm() < 1e-14 {
            break;
        }
        let e = (2.0 * I * k * l).exp();
        let df = m.dr_dk(k) * e + 2.0 * I * l * m.r_complex(k) * e;
        if df.norm() == 0.0 {
            return Err(Error::NoConvergence(format!("mode {n}: zero derivative")));
        }
        let step = f / df;
        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = k - step * damping;
            let ft = root_residual(m, trial);
            if ft.norm() < f.norm() {
                k = trial;
                f = ft;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if !accepted || (step * damping).norm() <= 1e-16 * k.norm() {
            break;
        }
    }
    let residual = f.norm();
    if residual >= 1e-10 {
        return Err(Error::NoConvergence(format!("mode {n}: residual {residual:e}")));
    }
    Ok(QuasiMode { n, k_n: k.re, kappa_n: -2.0 * k.im, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thin(zeta: f64) -> MirrorSpec {
        MirrorSpec::thin_dielectric(zeta, 1.0).unwrap()
    }

    #[test]
    fn thin_dielectric_hand_values() {
        let (r, t) = mirror_coeffs(&thin(2.0), 1.0).unwrap();
        assert!((r - C64::new(-0.5, 0.5)).norm() < 1e-15);
        assert!((t - C64::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn no_mirror_limit() {
        let m = thin(0.0);
        let (r, t) = mirror_coeffs(&m, 3.3).unwrap();
        assert_eq!(r, C64::new(0.0, 0.0));
        assert_eq!(t, C64::new(1.0, 0.0));
        assert!((interior_coeff(&m, 3.3).unwrap() - C64::new(0.0, -2.0)).norm() < 1e-15);
        assert!((exterior_reflection(&m, 3.3).unwrap() + 1.0).norm() < 1e-15);
        let k = 2.1;
        let x = 1.7;
        let u = mode_function(&m, k, x).unwrap();
        assert!((u - C64::new(0.0, -2.0 * (k * x).sin())).norm() < 1e-14);
    }

    #[test]
    fn perfect_mirror_limit() {
        let (r, _) = mirror_coeffs(&thin(1e12), 1.0).unwrap();
        assert!((r + 1.0).norm() < 1e-11);
    }

    #[test]
    fn lossless_by_construction() {
        for zeta in [0.1, 2.0, 50.0] {
            for j in 1..200 {
                let k = 0.037 * j as f64;
                let (r, t) = mirror_coeffs(&thin(zeta), k).unwrap();
                assert!((r.norm_sqr() + t.norm_sqr() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn exterior_reflection_unimodular() {
        let m = thin(2.0);
        assert!((exterior_reflection(&m, 1.0).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mode_function_at_hard_wall() {
        let u = mode_function(&thin(5.0), 2.3, 1e-12).unwrap();
        assert!(u.norm() < 1e-10);
    }

    #[test]
    fn mode_function_continuous_at_mirror() {
        for zeta in [0.5, 2.0, 50.0] {
            let m = thin(zeta);
            for j in 1..100 {
                let k = 0.173 * j as f64;
                let inside = mode_function(&m, k, m.length).unwrap();
                let outside = exterior_branch(&m, k, m.length).unwrap();
                assert!((inside - outside).norm() < 1e-10 * inside.norm().max(1.0));
            }
        }
    }

    #[test]
    fn rejects_inconsistent_constant_mirror() {
        let r = C64::new(0.99, 0.0);
        assert!(matches!(
            MirrorSpec::constant(r, C64::new(0.1, 0.0), 1.0),
            Err(Error::InvalidMirror(_))
        ));
        assert!(MirrorSpec::constant_lossless(r, 1.0).is_ok());
    }

    #[test]
    fn pole_is_an_error() {
        // r = -1 constant: 1 + r e^{2ikl} = 0 at k = pi/l.
        let m = MirrorSpec { model: MirrorModel::Constant { r: C64::new(-1.0, 0.0), t: C64::new(0.0, 0.0) }, length: 1.0 };
        assert!(matches!(interior_coeff(&m, PI), Err(Error::PoleProximity(_))));
    }

    #[test]
    fn constant_mirror_quasi_modes() {
        let m = MirrorSpec::constant_lossless(C64::new(0.99, 0.0), 1.0).unwrap();
        let approx = quasi_modes_approx(&m, 0, 4).unwrap();
        assert!((approx[0].k_n - PI / 2.0).abs() < 1e-12);
        assert!((approx[0].kappa_n - 0.010_050_335_853_501_4).abs() < 1e-12);
        for w in approx.windows(2) {
            assert!((w[1].k_n - w[0].k_n - PI).abs() < 1e-12);
        }
        let exact = quasi_modes_exact(&m, 0, 4).unwrap();
        for (a, e) in approx.iter().zip(&exact) {
            assert!((a.k_n - e.k_n).abs() < 1e-10);
            assert!((a.kappa_n - e.kappa_n).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_roots_have_small_residual() {
        let modes = quasi_modes_exact(&thin(50.0), 0, 20).unwrap();
        for q in &modes {
            assert!(q.residual < 1e-10, "{q:?}");
            assert!(q.kappa_n > 0.0);
        }
        for w in modes.windows(2) {
            assert!(w[1].k_n > w[0].k_n);
        }
    }

    #[test]
    fn high_order_mode_matches_approximation() {
        let m = thin(50.0);
        let a = quasi_modes_approx(&m, 15, 15).unwrap()[0];
        let e = quasi_modes_exact(&m, 15, 15).unwrap()[0];
        assert!((a.k_n - e.k_n).abs() < 1e-3 * e.kappa_n);
        assert!((a.kappa_n - e.kappa_n).abs() < 1e-3 * e.kappa_n);
    }

    #[test]
    fn widths_shrink_with_finesse() {
        let mut previous: Option<Vec<QuasiMode>> = None;
        for zeta in [10.0, 20.0, 50.0, 100.0] {
            let modes = quasi_modes_exact(&thin(zeta), 1, 8).unwrap();
            if let Some(prev) = &previous {
                for (p, q) in prev.iter().zip(&modes) {
                    assert!(q.kappa_n < p.kappa_n);
                }
            }
            previous = Some(modes);
        }
    }

    #[test]
    fn interior_amplitude_peaks_at_resonances() {
        let m = thin(50.0);
        let modes = quasi_modes_exact(&m, 2, 4).unwrap();
        for q in modes {
            // Scan well past the linewidth on both sides.
            let half = 40.0 * q.kappa_n;
            let n = 4001;
            let (k_peak, _) = (0..n)
                .map(|j| q.k_n - half + 2.0 * half * j as f64 / (n - 1) as f64)
                .map(|k| (k, interior_coeff(&m, k).unwrap().norm()))
                .fold((0.0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            assert!((k_peak - q.k_n).abs() < 0.5 * q.kappa_n, "{k_peak} vs {}", q.k_n);
        }
    }
}

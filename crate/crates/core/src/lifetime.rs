//! Decay of the k = 0 exciton: short-time rate W, Golden-Rule rate Γ, the
//! perturbative population P_e(t), and the weak/strong classification.
//!
//! Rates are in U_dd/ħ, times in ħ/U_dd, τ = √γ k_B T/U_dd.

use std::f64::consts::PI;

use serde::Serialize;

use crate::homogeneous::{bz_grid, f_1d, f_1d_prime, g_1d, j_1d, j_1d_prime, Crystal, Dim};
use crate::scales::CrystalScales;
use crate::specfun::{composite_rule, zeta3};
use crate::{Error, Result};

/// coth(f/2τ) = 2N(f) + 1, equal to 1 at τ = 0.
pub fn thermal_factor(f: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        return 1.0;
    }
    let x = f / (2.0 * tau);
    if x > 20.0 {
        1.0
    } else if x < 1e-8 {
        1.0 / x
    } else {
        1.0 / x.tanh()
    }
}

/// Bose occupation N = 1/(e^{f/τ} − 1); zero at τ = 0.
pub fn occupation(f: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    1.0 / (f / tau).exp_m1()
}

/// Quadrature nodes on (0, π], graded geometrically toward q = 0 where the
/// integrands carry q² log q terms.
fn half_zone_rule() -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    let mut hi = PI / 8.0;
    for _ in 0..45 {
        let (x, w) = composite_rule(0.5 * hi, hi, 1, 16);
        xs.extend(x);
        ws.extend(w);
        hi *= 0.5;
    }
    let (x, w) = composite_rule(PI / 8.0, PI, 14, 16);
    xs.extend(x);
    ws.extend(w);
    (xs, ws)
}

/// 𝓘_d(τ) split into the vacuum (+1) part and the thermal part.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegralI {
    pub tau: f64,
    pub vacuum: f64,
    pub thermal: f64,
    pub total: f64,
}

/// Grid size per axis for 2D zone averages.
pub const DEFAULT_GRID_2D: usize = 64;

/// 𝓘_d(τ) = Σ_λ ⟨ |g_λ|²/f_λ · (2/(e^{f_λ/τ} − 1) + 1) ⟩_BZ.
///
/// 1D uses Gauss-Legendre on the half zone. 2D averages over a shifted
/// `grid`×`grid` mesh of the primitive cell, which never hits q = 0.
pub fn integral_i(crystal: &Crystal, tau: f64, grid: usize) -> Result<IntegralI> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::domain("tau must be finite and non-negative"));
    }
    let (vacuum, thermal) = match crystal.dim {
        Dim::One => {
            let (xs, ws) = half_zone_rule();
            let mut vac = 0.0;
            let mut th = 0.0;
            for (&q, &w) in xs.iter().zip(&ws) {
                let f = f_1d(q);
                let g = g_1d(q);
                let base = g * g / f;
                vac += w * base;
                th += w * base * (thermal_factor(f, tau) - 1.0);
            }
            (vac / PI, th / PI)
        }
        Dim::Two => {
            let lat = crystal.lattice().expect("2D crystal carries a lattice");
            let n = grid.max(4);
            let (b1, b2) = crate::homogeneous::reciprocal_vectors();
            let parts = crate::par::map_range(n * n, |idx| -> Result<(f64, f64)> {
                let (i, j) = (idx / n, idx % n);
                let (s, t) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
                let q = [s * b1[0] + t * b2[0], s * b1[1] + t * b2[1]];
                let modes = crystal.phonons(q)?;
                let gv = lat.g_vector(q);
                let mut vac = 0.0;
                let mut th = 0.0;
                for m in &modes {
                    let e = m.polarization.expect("2D modes carry polarizations");
                    let g = gv[0] * e[0] + gv[1] * e[1];
                    let base = g * g / m.f;
                    vac += base;
                    th += base * (thermal_factor(m.f, tau) - 1.0);
                }
                Ok((vac, th))
            });
            let mut vac = 0.0;
            let mut th = 0.0;
            for p in parts {
                let (a, b) = p?;
                vac += a;
                th += b;
            }
            let norm = (n * n) as f64;
            (vac / norm, th / norm)
        }
    };
    Ok(IntegralI { tau, vacuum, thermal, total: vacuum + thermal })
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain("gamma must be positive"));
    }
    Ok(())
}

/// W = |ε + κ| γ^{-1/4} √𝓘_d(τ).
pub fn quadratic_rate(crystal: &Crystal, kappa: f64, epsilon: f64, gamma: f64, tau: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let pref = (epsilon + kappa).abs();
    if pref == 0.0 {
        return Ok(0.0);
    }
    let i = integral_i(crystal, tau, DEFAULT_GRID_2D)?;
    Ok(pref * gamma.powf(-0.25) * i.total.sqrt())
}

/// One resonant wavevector of the Golden Rule.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Resonance {
    pub q0: f64,
    /// C(q0) = 2g²/(f |J′ + f′/(√γ|κ|)|).
    pub c: f64,
    /// Phonon emission (κ > 0) or absorption (κ < 0).
    pub emission: bool,
    pub rate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldenRule {
    /// Total Γ = resonant + endpoint.
    pub gamma: f64,
    /// Contributions from roots q0 ∈ (0, π].
    pub resonant: f64,
    /// Contribution of the q → 0 end of the zone, (ε+κ)² √(3ζ(3)/4) τ.
    pub endpoint: f64,
    /// Smallest resonant q0, if any.
    pub q0: Option<f64>,
    pub roots: Vec<Resonance>,
    pub note: Option<String>,
}

/// Fermi Golden-Rule decay rate of the k = 0 exciton.
///
/// In 2D the first-order rate vanishes; the result is zero with a note.
pub fn golden_rule_rate(dim: Dim, kappa: f64, epsilon: f64, gamma: f64, tau: f64) -> Result<GoldenRule> {
    check_gamma(gamma)?;
    if !(tau >= 0.0) {
        return Err(Error::domain("tau must be non-negative"));
    }
    if dim == Dim::Two {
        return Ok(GoldenRule {
            gamma: 0.0,
            resonant: 0.0,
            endpoint: 0.0,
            q0: None,
            roots: Vec::new(),
            note: Some("first-order Golden Rule rate vanishes in 2D".into()),
        });
    }
    let pref = (epsilon + kappa).powi(2);
    let sg = gamma.sqrt();
    let ak = kappa.abs();
    let j0 = j_1d(0.0);
    let h = |q: f64| ak * (j0 - j_1d(q)) - f_1d(q) / sg;
    let mut roots = Vec::new();
    if ak > 0.0 {
        let n = 4000;
        let qs: Vec<f64> = (1..=n).map(|i| PI * i as f64 / n as f64).collect();
        let hs = crate::par::map_slice(&qs, |&q| h(q));
        let mut prev_q = 1e-9;
        let mut prev_h = h(prev_q);
        for (&q, &hq) in qs.iter().zip(&hs) {
            if hq == 0.0 || prev_h.signum() != hq.signum() {
                let (mut a, mut b, mut fa) = (prev_q, q, prev_h);
                for _ in 0..100 {
                    let m = 0.5 * (a + b);
                    let fm = h(m);
                    if fm.signum() == fa.signum() {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                    if b - a < 1e-14 {
                        break;
                    }
                }
                let q0 = 0.5 * (a + b);
                let f = f_1d(q0);
                let g = g_1d(q0);
                let jac = (j_1d_prime(q0) + f_1d_prime(q0) / (sg * ak)).abs();
                let c = 2.0 * g * g / (f * jac);
                let emission = kappa > 0.0;
                let occ = occupation(f, tau) + if emission { 1.0 } else { 0.0 };
                let rate = pref / (ak * sg) * c * occ;
                roots.push(Resonance { q0, c, emission, rate });
            }
            prev_q = q;
            prev_h = hq;
        }
    }
    let resonant: f64 = roots.iter().map(|r| r.rate).sum();
    let endpoint = pref * (0.75 * zeta3()).sqrt() * tau;
    Ok(GoldenRule {
        gamma: resonant + endpoint,
        resonant,
        endpoint,
        q0: roots.first().map(|r| r.q0),
        roots,
        note: None,
    })
}

/// P_e(t) sampled at requested times.
#[derive(Debug, Clone, Serialize)]
pub struct PopulationCurve {
    pub t: Vec<f64>,
    pub p_e: Vec<f64>,
    /// False once P_e drops below 0.9, where second-order theory is suspect.
    pub perturbative: bool,
}

/// 2 sin²(xt/2)/x², the double time integral of cos(xτ).
fn kernel(x: f64, t: f64) -> f64 {
    let y = 0.5 * x * t;
    if y.abs() < 1e-4 {
        0.5 * t * t * (1.0 - y * y / 3.0)
    } else {
        let s = y.sin();
        2.0 * s * s / (x * x)
    }
}

struct ModeTerm {
    weight: f64,
    omega_minus: f64,
    omega_plus: f64,
    occ: f64,
}

/// Second-order P_e(t) from a discrete zone sum with `n_grid` points per
/// axis (q = 0 excluded). 2D sums both phonon branches.
pub fn excited_population(
    crystal: &Crystal,
    times: &[f64],
    kappa: f64,
    epsilon: f64,
    gamma: f64,
    tau: f64,
    n_grid: usize,
) -> Result<PopulationCurve> {
    check_gamma(gamma)?;
    if n_grid < 4 {
        return Err(Error::domain("grid needs at least 4 points"));
    }
    let sg = gamma.sqrt();
    let pref = (epsilon + kappa).powi(2);
    let j0 = crystal.j0();
    let terms: Vec<ModeTerm> = match crystal.dim {
        Dim::One => (1..n_grid)
            .map(|i| {
                let q = 2.0 * PI * i as f64 / n_grid as f64;
                let f = f_1d(q);
                let g = g_1d(q);
                let omega = f / sg;
                let big_omega = kappa * (j0 - j_1d(q));
                ModeTerm {
                    weight: pref * g * g / (sg * n_grid as f64 * f),
                    omega_minus: big_omega - omega,
                    omega_plus: big_omega + omega,
                    occ: occupation(f, tau),
                }
            })
            .collect(),
        Dim::Two => {
            let lat = crystal.lattice().expect("2D crystal carries a lattice");
            let grid = bz_grid(Dim::Two, n_grid);
            let total = grid.len() as f64;
            let per_q = crate::par::map_slice(&grid[1..], |&q| -> Result<Vec<ModeTerm>> {
                let modes = crystal.phonons(q)?;
                let gv = lat.g_vector(q);
                let big_omega = kappa * (j0 - crystal.j(q));
                Ok(modes
                    .iter()
                    .map(|m| {
                        let e = m.polarization.expect("2D modes carry polarizations");
                        let g = gv[0] * e[0] + gv[1] * e[1];
                        let omega = m.f / sg;
                        ModeTerm {
                            weight: pref * g * g / (sg * total * m.f),
                            omega_minus: big_omega - omega,
                            omega_plus: big_omega + omega,
                            occ: occupation(m.f, tau),
                        }
                    })
                    .collect())
            });
            let mut all = Vec::new();
            for p in per_q {
                all.extend(p?);
            }
            all
        }
    };
    let p_e = crate::par::map_slice(times, |&t| {
        let s: f64 = terms
            .iter()
            .map(|m| m.weight * ((m.occ + 1.0) * kernel(m.omega_minus, t) + m.occ * kernel(m.omega_plus, t)))
            .sum();
        1.0 - 2.0 * s
    });
    let perturbative = p_e.iter().all(|&p| p >= 0.9);
    Ok(PopulationCurve { t: times.to_vec(), p_e, perturbative })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Weak,
    Strong,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReportSi {
    /// W [1/s].
    pub w: f64,
    /// Γ [1/s].
    pub gamma: f64,
    /// t_c [s].
    pub t_c: f64,
    /// T_e [s]; null when unbounded.
    pub t_e: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub dim: u8,
    pub kappa: f64,
    pub epsilon: f64,
    pub gamma_param: f64,
    pub tau: f64,
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    pub gamma_resonant: f64,
    pub gamma_endpoint: f64,
    pub q0: Option<f64>,
    /// Exciton band width ΔE [U_dd].
    pub delta_e: f64,
    /// Debye frequency ω_D [U_dd/ħ].
    pub omega_d: f64,
    pub t_c: f64,
    #[serde(rename = "P_c")]
    pub p_c: f64,
    /// (ε+κ)²/(κ²√γ) when ΔE > ħω_D, else (ε+κ)².
    pub p_c_estimate: f64,
    pub threshold: f64,
    pub regime: Regime,
    /// T_e [ħ/U_dd]; null when unbounded.
    #[serde(rename = "T_e")]
    pub t_e: Option<f64>,
    pub note: Option<String>,
    pub si: Option<DecayReportSi>,
}

/// Band width and Debye frequency of the crystal in units of |κ|U_dd and
/// U_dd/(ħ√γ) respectively.
pub fn band_and_debye(crystal: &Crystal) -> Result<(f64, f64)> {
    match crystal.dim {
        Dim::One => Ok((3.5 * zeta3(), f_1d(PI))),
        Dim::Two => Ok((crate::homogeneous::band_width(crystal, 60), crate::homogeneous::max_phonon_f(crystal, 60)?)),
    }
}

/// Computes W, Γ, t_c and P_c = W²t_c², classifies the regime with the given
/// threshold (0.1 by default) and picks T_e = 1/Γ (weak) or 1/W (strong).
pub fn classify_and_lifetime(
    crystal: &Crystal,
    kappa: f64,
    epsilon: f64,
    gamma: f64,
    tau: f64,
    threshold: f64,
) -> Result<DecayReport> {
    check_gamma(gamma)?;
    let w = quadratic_rate(crystal, kappa, epsilon, gamma, tau)?;
    let gr = golden_rule_rate(crystal.dim, kappa, epsilon, gamma, tau)?;
    let (width, f_d) = band_and_debye(crystal)?;
    let delta_e = kappa.abs() * width;
    let omega_d = f_d / gamma.sqrt();
    let t_c = 1.0 / delta_e.max(omega_d);
    let p_c = w * w * t_c * t_c;
    let pref = (epsilon + kappa).powi(2);
    let p_c_estimate = if delta_e > omega_d { pref / (kappa * kappa * gamma.sqrt()) } else { pref };
    let regime = if p_c < threshold { Regime::Weak } else { Regime::Strong };
    let rate = match regime {
        Regime::Weak => gr.gamma,
        Regime::Strong => w,
    };
    let t_e = (rate > 0.0).then(|| 1.0 / rate);
    Ok(DecayReport {
        dim: crystal.dim.as_int(),
        kappa,
        epsilon,
        gamma_param: gamma,
        tau,
        w,
        gamma: gr.gamma,
        gamma_resonant: gr.resonant,
        gamma_endpoint: gr.endpoint,
        q0: gr.q0,
        delta_e,
        omega_d,
        t_c,
        p_c,
        p_c_estimate,
        threshold,
        regime,
        t_e,
        note: gr.note,
        si: None,
    })
}

impl DecayReport {
    /// Adds the SI block for a given physical frame.
    pub fn with_scales(mut self, scales: &CrystalScales) -> Self {
        let r = scales.rate_unit();
        let t = scales.time_unit();
        self.si = Some(DecayReportSi {
            w: self.w * r,
            gamma: self.gamma * r,
            t_c: self.t_c * t,
            t_e: self.t_e.map(|x| x * t),
        });
        self
    }
}

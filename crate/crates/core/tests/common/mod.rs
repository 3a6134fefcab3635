//! Property checks shared by the property suite and the acceptance runner.
//! Each returns `Err` with a description instead of panicking.

#![allow(dead_code)]

use std::f64::consts::PI;

use mdc_core::homogeneous::{j_1d, Crystal, Dim, Lattice};
use mdc_core::lifetime::{golden_rule_rate, quadratic_rate};
use mdc_core::rotor::solve_stark;
use mdc_core::specfun::zeta3;
use mdc_core::trapped::{exciton_modes_trapped, phonon_modes_trapped, ModeKind, TrappedCrystal};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 100;

pub type Check = std::result::Result<(), String>;

/// Runs a strategy/check pair for `CASES` cases with a fixed seed.
pub fn run<S: Strategy>(strategy: S, check: impl Fn(S::Value) -> Check) -> Check {
    run_cases(CASES, strategy, check)
}

pub fn run_cases<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Check) -> Check {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(
        config,
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    runner.run(&strategy, |v| check(v).map_err(TestCaseError::fail)).map_err(|e| e.to_string())
}

/// ⟨μ_z⟩ equals −∂E/∂E_b by central differences.
pub fn hellmann_feynman((e_b, m_n, n): (f64, i32, u32)) -> Check {
    let n = n + m_n as u32;
    let n_max = 20;
    let h = 1e-4;
    let at = |e: f64| solve_stark(e, m_n, n_max).map_err(|e| e.to_string());
    let mid = at(e_b)?;
    let lvl = mid.level(n).ok_or("level missing")?;
    let up = at(e_b + h)?.level(n).ok_or("level missing")?.energy;
    let dn = at(e_b - h)?.level(n).ok_or("level missing")?.energy;
    let fd = -(up - dn) / (2.0 * h);
    let err = (fd - lvl.dipole).abs() / lvl.dipole.abs().max(1e-3);
    if err < 1e-5 {
        Ok(())
    } else {
        Err(format!("E_b={e_b} M={m_n} N={n}: dipole {} vs {fd}", lvl.dipole))
    }
}

pub fn hf_strategy() -> impl Strategy<Value = (f64, i32, u32)> {
    (0.1f64..10.0, 0i32..3, 0u32..4)
}

/// Exciton and phonon mode matrices are orthonormal.
pub fn orthonormal((n, gamma): (usize, f64)) -> Check {
    let c = TrappedCrystal::natural(n, gamma).map_err(|e| e.to_string())?;
    let e = exciton_modes_trapped(&c);
    let l = phonon_modes_trapped(&c, ModeKind::PhononLong, 0.0).map_err(|e| e.to_string())?;
    let z = phonon_modes_trapped(&c, ModeKind::PhononZ, 3.0).map_err(|e| e.to_string())?;
    for b in [&e, &l, &z] {
        let err = b.orthonormality_error();
        if err >= 1e-8 {
            return Err(format!("N={n} gamma={gamma} {:?}: {err}", b.kind));
        }
    }
    Ok(())
}

pub fn orthonormal_strategy() -> impl Strategy<Value = (usize, f64)> {
    (8usize..60, 5.0f64..100.0)
}

/// The zone average of J vanishes (zero on-site term). On an N-point grid
/// the 1D remainder is bounded by the aliased sum 2ζ(3)/N³; the 2D real
/// space sum is exact for grids finer than the cutoff.
pub fn sum_rule((n, shift, cutoff): (usize, f64, f64)) -> Check {
    let mean: f64 = (0..n).map(|i| j_1d(2.0 * PI * (i as f64 + shift) / n as f64)).sum::<f64>() / n as f64;
    let alias = 2.0 * zeta3() / (n as f64).powi(3);
    if mean.abs() > alias + 1e-12 || mean.abs() >= 1e-8 {
        return Err(format!("1D mean {mean} on {n} points"));
    }
    let lat = Lattice::triangular(cutoff);
    let (b1, b2) = mdc_core::homogeneous::reciprocal_vectors();
    let m = 2 * cutoff.ceil() as usize + 2;
    let mut s = 0.0;
    for i in 0..m {
        for j in 0..m {
            let (u, v) = ((i as f64 + shift) / m as f64, (j as f64 + shift) / m as f64);
            s += lat.j_raw([u * b1[0] + v * b2[0], u * b1[1] + v * b2[1]]);
        }
    }
    let mean2 = s / (m * m) as f64;
    if mean2.abs() < 1e-8 {
        Ok(())
    } else {
        Err(format!("2D mean {mean2} (cutoff {cutoff}, grid {m})"))
    }
}

pub fn sum_rule_strategy() -> impl Strategy<Value = (usize, f64, f64)> {
    (1024usize..4096, 0.0f64..1.0, 3.0f64..8.0)
}

/// The exciton-phonon matrix element vanishes as q → 0.
pub fn coupling_vanishes((kappa, epsilon, gamma, theta): (f64, f64, f64, f64)) -> Check {
    let one = Crystal::one_d();
    let two = Crystal::two_d(12.0);
    let err = |e: mdc_core::Error| e.to_string();
    for (crystal, branches) in [(&one, 1usize), (&two, 2)] {
        let dir = match crystal.dim {
            Dim::One => [1.0, 0.0],
            Dim::Two => [theta.cos(), theta.sin()],
        };
        for b in 1..=branches {
            let at = |q: f64| crystal.coupling([q * dir[0], q * dir[1]], [0.0, 0.0], b, kappa, epsilon, gamma);
            let zero = at(0.0).map_err(err)?.m_im;
            let small = at(1e-6).map_err(err)?.m_im.abs();
            let mid = at(1e-2).map_err(err)?.m_im.abs();
            let scale = (kappa + epsilon).abs() * gamma.powf(-0.25);
            if zero != 0.0 || small > 0.05 * mid.max(1e-300) && small > 1e-12 * scale.max(1e-300) {
                return Err(format!("dim {:?} branch {b}: M(0)={zero}, M(1e-6)={small}, M(1e-2)={mid}", crystal.dim));
            }
        }
    }
    Ok(())
}

pub fn coupling_strategy() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-20.0f64..20.0, -5.0f64..5.0, 2.0f64..200.0, 0.0f64..(2.0 * PI))
}

/// W, |M|² and the thermal endpoint rate depend on (ε, κ) only through
/// (ε + κ)² and are unchanged under a global sign flip.
pub fn sign_flip((kappa, epsilon, gamma, tau): (f64, f64, f64, f64)) -> Check {
    let c = Crystal::one_d();
    let err = |e: mdc_core::Error| e.to_string();
    let w = quadratic_rate(&c, kappa, epsilon, gamma, tau).map_err(err)?;
    let wf = quadratic_rate(&c, -kappa, -epsilon, gamma, tau).map_err(err)?;
    let m = c.coupling([0.7, 0.0], [0.0, 0.0], 1, kappa, epsilon, gamma).map_err(err)?.norm_sqr(100);
    let mf = c.coupling([0.7, 0.0], [0.0, 0.0], 1, -kappa, -epsilon, gamma).map_err(err)?.norm_sqr(100);
    let g0 = golden_rule_rate(Dim::One, kappa, epsilon, gamma, tau).map_err(err)?.endpoint;
    let g0f = golden_rule_rate(Dim::One, -kappa, -epsilon, gamma, tau).map_err(err)?.endpoint;
    if w == wf && m == mf && g0 == g0f {
        Ok(())
    } else {
        Err(format!("W {w}/{wf}, |M|² {m}/{mf}, endpoint {g0}/{g0f}"))
    }
}

pub fn sign_flip_strategy() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-20.0f64..20.0, -5.0f64..5.0, 2.0f64..200.0, 0.0f64..20.0)
}

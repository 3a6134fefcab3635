//! Subcommand implementations.

use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{bail, Result};
use serde::Serialize;

use mdc_core::fidelity::{case_study, case_study_cabr, CaseStudyReport};
use mdc_core::homogeneous::{bz_path, g_1d, Crystal, Dim, DEFAULT_CUTOFF};
use mdc_core::lifetime::{classify_and_lifetime, excited_population, DEFAULT_GRID_2D};
use mdc_core::rotor::{
    default_n_max, find_field_point, qubit_pair_params, solve_spin_rotor, stark_scan, CUTOFF_MARGIN,
};
use mdc_core::trapped::{
    exciton_modes_trapped, lindemann, lindemann_homogeneous, phonon_modes_trapped, stability_report, DensityProfile,
    ModeBasis, ModeKind, PhononSpectrum, TrappedCrystal,
};

use crate::config::RunConfig;
use crate::context::{Ctx, PhysArgs};
use crate::output::{Sink, Table, OUT_DIR_ENV};
use crate::{BandArgs, Cli, Command, CouplingArgs, LifetimeArgs, Preset, RotorCmd, TrapCmd};

pub enum Status {
    Ok,
    /// The report was written but a physical condition fails.
    Regime(String),
}

pub fn run(cli: Cli) -> Result<Status> {
    configure_threads(cli.threads)?;
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("mdc-out"));
    let mut sink = Sink::new(dir)?;
    let ctx = |phys: PhysArgs| Ctx::new(cfg.clone(), phys);
    let status = match cli.command {
        Command::Rotor(cmd) => rotor(&ctx(PhysArgs::default()), cmd, &mut sink)?,
        Command::Band(a) => band(&ctx(PhysArgs::default()), &a, &mut sink)?,
        Command::Phonon(a) => phonon(&ctx(PhysArgs::default()), &a, &mut sink)?,
        Command::Coupling(a) => coupling(&ctx(a.phys.clone()), &a, &mut sink)?,
        Command::Lifetime(a) => lifetime(&ctx(a.phys.clone()), &a, &mut sink)?,
        Command::Trap(cmd) => trap(&cfg, cmd, &mut sink)?,
        Command::Stability(a) => stability(&ctx(a.phys), a.n, &mut sink)?,
        Command::Fidelity(a) => fidelity(&ctx(a.phys), &mut sink)?,
        Command::CaseStudy { preset: Preset::Cabr } => {
            let reports = case_study_cabr()?;
            emit(&mut sink, "case_study_cabr.json", "case-study cabr", &reports)?;
            gate_status(&reports)
        }
        Command::Manifest => {
            emit(&mut sink, "manifest.json", "manifest", &crate::manifest::products())?;
            Status::Ok
        }
    };
    for p in sink.written() {
        eprintln!("wrote {}", p.display());
    }
    Ok(status)
}

fn configure_threads(n: Option<usize>) -> Result<()> {
    let Some(n) = n else { return Ok(()) };
    if n == 0 {
        bail!("--threads must be positive");
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    #[cfg(not(feature = "parallel"))]
    eprintln!("note: built without the parallel feature, --threads has no effect");
    Ok(())
}

/// Writes a JSON report and echoes it on stdout.
fn emit<T: Serialize>(sink: &mut Sink, name: &str, command: &str, value: &T) -> Result<()> {
    let text = sink.json(name, command, value)?;
    print!("{text}");
    Ok(())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn rotor(ctx: &Ctx, cmd: RotorCmd, sink: &mut Sink) -> Result<Status> {
    match cmd {
        RotorCmd::Scan(a) => {
            if a.steps == 0 || !(a.to >= a.from) {
                bail!("scan needs --steps >= 1 and --to >= --from");
            }
            let n_max = a.n_max.or(ctx.n_max()).unwrap_or_else(|| default_n_max(a.n_show));
            let rows = stark_scan(&linspace(a.from, a.to, a.steps), a.m_max, a.n_show, n_max)?;
            let mut t = Table::new(&["E_b", "label", "N", "M", "energy", "dipole"]);
            for r in rows {
                t.push(vec![
                    r.e_b.into(),
                    r.label.to_string().into(),
                    r.label.n.into(),
                    r.label.m.into(),
                    r.energy.into(),
                    r.dipole.into(),
                ]);
            }
            sink.csv("rotor_scan.csv", &t)?;
        }
        RotorCmd::Pair(a) => {
            let (g, e, e_b) = ctx.states();
            let p =
                qubit_pair_params(a.g.unwrap_or(g), a.e.unwrap_or(e), a.e_b.unwrap_or(e_b), a.n_max.or(ctx.n_max()))?;
            emit(sink, "rotor_pair.json", "rotor pair", &p)?;
        }
        RotorCmd::Find(a) => {
            let (g, e, _) = ctx.states();
            let p = find_field_point(
                a.g.unwrap_or(g),
                a.e.unwrap_or(e),
                a.kind.into(),
                a.bracket,
                a.n_max.or(ctx.n_max()),
            )?;
            emit(sink, "rotor_find.json", "rotor find", &p)?;
        }
        RotorCmd::Spin(a) => {
            let n_max = a.n_max.or(ctx.n_max()).unwrap_or_else(|| default_n_max(2).max(2 + CUTOFF_MARGIN));
            let sol = solve_spin_rotor(&ctx.molecule()?, a.e_b, n_max)?;
            let mut t = Table::new(&["M_J2", "N", "M_N", "M_S2", "energy", "dipole"]);
            for b in &sol.blocks {
                for l in &b.levels {
                    t.push(vec![
                        b.m_j2.into(),
                        l.n.into(),
                        l.m_n.into(),
                        l.m_s2.into(),
                        l.energy.into(),
                        l.dipole.into(),
                    ]);
                }
            }
            sink.csv("rotor_spin.csv", &t)?;
            #[derive(Serialize)]
            struct Summary {
                e_b: f64,
                gamma_sr_over_b: f64,
                n_max: u32,
                theta_x: f64,
                kappa: f64,
                mu_g: f64,
                mu_e: f64,
            }
            let s = Summary {
                e_b: sol.e_b,
                gamma_sr_over_b: sol.gamma_sr_over_b,
                n_max: sol.n_max,
                theta_x: sol.theta_x,
                kappa: sol.kappa,
                mu_g: sol.mu_g,
                mu_e: sol.mu_e,
            };
            emit(sink, "rotor_spin.json", "rotor spin", &s)?;
        }
    }
    Ok(Status::Ok)
}

/// Sample points (path length, wavevector): [0, π] in 1D, Γ-K-M-Γ in 2D.
fn zone_path(dim: Dim, points: Option<usize>) -> Result<Vec<(f64, [f64; 2])>> {
    match dim {
        Dim::One => {
            let n = points.unwrap_or(512);
            if n < 2 {
                bail!("--points must be at least 2");
            }
            Ok(linspace(0.0, PI, n).into_iter().map(|k| (k, [k, 0.0])).collect())
        }
        Dim::Two => {
            let n = points.unwrap_or(60);
            if n < 1 {
                bail!("--points must be positive");
            }
            Ok(bz_path(n))
        }
    }
}

fn crystal_for(ctx: &Ctx, dim: Option<u8>, cutoff: Option<f64>) -> Result<Crystal> {
    let dim = Dim::from_int(ctx.dimension(dim))?;
    let cutoff = cutoff.or(ctx.cfg.numerics.cutoff).unwrap_or(DEFAULT_CUTOFF);
    Ok(Crystal::new(dim, cutoff)?)
}

fn dim_suffix(c: &Crystal) -> &'static str {
    match c.dim {
        Dim::One => "1d",
        Dim::Two => "2d",
    }
}

fn band(ctx: &Ctx, a: &BandArgs, sink: &mut Sink) -> Result<Status> {
    let crystal = crystal_for(ctx, a.dim, a.cutoff)?;
    let kappa = a.kappa.unwrap_or(1.0);
    let epsilon = a.epsilon.unwrap_or(0.0);
    let points = a.points.or(ctx.cfg.numerics.points);
    let mut t = Table::new(&["kx", "ky", "s", "J", "E"]);
    for (s, k) in zone_path(crystal.dim, points)? {
        let b = crystal.exciton_band(k, kappa, epsilon);
        t.push(vec![k[0].into(), k[1].into(), s.into(), b.j.into(), b.e.into()]);
    }
    sink.csv(&format!("band_{}.csv", dim_suffix(&crystal)), &t)?;
    Ok(Status::Ok)
}

/// Phonon frequency and coupling-function projection g·e for every branch.
fn branches(crystal: &Crystal, q: [f64; 2]) -> Result<Vec<(usize, f64, f64)>> {
    let modes = crystal.phonons(q)?;
    Ok(modes
        .iter()
        .map(|m| {
            let g = match (crystal.lattice(), m.polarization) {
                (Some(l), Some(p)) => {
                    let v = l.g_vector(q);
                    v[0] * p[0] + v[1] * p[1]
                }
                _ => g_1d(q[0]),
            };
            (m.branch, m.f, g)
        })
        .collect())
}

fn phonon(ctx: &Ctx, a: &BandArgs, sink: &mut Sink) -> Result<Status> {
    let crystal = crystal_for(ctx, a.dim, a.cutoff)?;
    let points = a.points.or(ctx.cfg.numerics.points);
    let mut t = Table::new(&["qx", "qy", "s", "branch", "f", "g", "J"]);
    for (s, q) in zone_path(crystal.dim, points)? {
        let j = crystal.j(q);
        for (branch, f, g) in branches(&crystal, q)? {
            t.push(vec![q[0].into(), q[1].into(), s.into(), branch.into(), f.into(), g.into(), j.into()]);
        }
    }
    sink.csv(&format!("phonon_{}.csv", dim_suffix(&crystal)), &t)?;
    Ok(Status::Ok)
}

fn coupling(ctx: &Ctx, a: &CouplingArgs, sink: &mut Sink) -> Result<Status> {
    let crystal = crystal_for(ctx, a.dim, a.cutoff)?;
    let (kappa, epsilon, gamma) = (ctx.kappa()?, ctx.epsilon()?, ctx.gamma()?);
    let points = a.points.or(ctx.cfg.numerics.points);
    let mut t = Table::new(&["qx", "qy", "s", "branch", "f", "g_q", "m_im"]);
    for (s, q) in zone_path(crystal.dim, points)? {
        for (branch, f, _) in branches(&crystal, q)? {
            let c = crystal.coupling(q, [0.0, 0.0], branch, kappa, epsilon, gamma)?;
            t.push(vec![q[0].into(), q[1].into(), s.into(), branch.into(), f.into(), c.g_q.into(), c.m_im.into()]);
        }
    }
    sink.csv(&format!("coupling_{}.csv", dim_suffix(&crystal)), &t)?;
    Ok(Status::Ok)
}

fn lifetime(ctx: &Ctx, a: &LifetimeArgs, sink: &mut Sink) -> Result<Status> {
    let crystal = crystal_for(ctx, a.dim, a.cutoff)?;
    let (kappa, epsilon, gamma, tau) = (ctx.kappa()?, ctx.epsilon()?, ctx.gamma()?, ctx.tau()?);
    let threshold = a.threshold.or(ctx.cfg.numerics.threshold).unwrap_or(0.1);
    let mut report = classify_and_lifetime(&crystal, kappa, epsilon, gamma, tau, threshold)?;
    if let Some(s) = ctx.si_scales(crystal.dim.as_int()) {
        report = report.with_scales(&s);
    }
    if !a.times.is_empty() {
        let grid = a.grid.or(ctx.cfg.numerics.grid).unwrap_or(match crystal.dim {
            Dim::One => 4096,
            Dim::Two => DEFAULT_GRID_2D,
        });
        let curve = excited_population(&crystal, &a.times, kappa, epsilon, gamma, tau, grid)?;
        let mut t = Table::new(&["t", "P_e"]);
        for (ti, p) in curve.t.iter().zip(&curve.p_e) {
            t.push(vec![(*ti).into(), (*p).into()]);
        }
        sink.csv("population.csv", &t)?;
        if !curve.perturbative {
            eprintln!("note: P_e fell below 0.9, second-order result is outside its range of validity");
        }
    }
    emit(sink, "lifetime.json", "lifetime", &report)?;
    Ok(Status::Ok)
}

fn trap(cfg: &RunConfig, cmd: TrapCmd, sink: &mut Sink) -> Result<Status> {
    match cmd {
        TrapCmd::Solve(a) => trap_solve(a.n, a.stiffness, &a.sweep, sink),
        TrapCmd::Spectra(a) => {
            let ctx = Ctx::new(cfg.clone(), a.phys);
            trap_spectra(&ctx, a.n, sink)
        }
        TrapCmd::Lindemann(a) => {
            let ctx = Ctx::new(cfg.clone(), a.phys);
            trap_lindemann(&ctx, a.n, &a.taus, a.tau_max, a.points, sink)
        }
    }
}

/// Equilibrium of `n` molecules in a trap of the given stiffness, with
/// positions in units of (C3/mν²)^{1/5} scaled by stiffness^{-1/5}.
///
/// Solved in the frame where the center spacing is one, where forces are of
/// order one for every N, then rescaled using x ∝ k^{-1/5}.
struct Scaled {
    positions: Vec<f64>,
    profile: DensityProfile,
    residual: f64,
    iterations: usize,
    max_deviation: f64,
}

fn solve_scaled(n: usize, stiffness: f64) -> Result<Scaled> {
    let c = TrappedCrystal::natural(n, 1.0)?;
    let scale = (c.stiffness() / stiffness).powf(0.2);
    Ok(Scaled {
        positions: c.positions.iter().map(|x| x * scale).collect(),
        profile: DensityProfile::new(n, stiffness)?,
        residual: c.residual,
        iterations: c.iterations,
        max_deviation: c.profile_deviation().into_iter().fold(0.0, f64::max),
    })
}

/// Numerical (extent, center density) of a sorted configuration.
fn measured(x: &[f64]) -> (f64, f64) {
    let n = x.len();
    let mid = n / 2;
    let n0 = if 2 * mid == n { 1.0 / (x[mid] - x[mid - 1]) } else { 2.0 / (x[mid + 1] - x[mid - 1]) };
    (x[n - 1] - x[0], n0)
}

fn trap_solve(n: usize, stiffness: f64, sweep: &[usize], sink: &mut Sink) -> Result<Status> {
    if !(stiffness > 0.0 && stiffness.is_finite()) {
        bail!("--stiffness must be positive");
    }
    let c = solve_scaled(n, stiffness)?;
    let mut t = Table::new(&["bond", "x_left", "x_right", "x_mid", "n_numeric", "n_analytic"]);
    for (i, w) in c.positions.windows(2).enumerate() {
        let mid = 0.5 * (w[0] + w[1]);
        t.push(vec![
            (i + 1).into(),
            w[0].into(),
            w[1].into(),
            mid.into(),
            (1.0 / (w[1] - w[0])).into(),
            c.profile.density(mid).into(),
        ]);
    }
    sink.csv("density_profile.csv", &t)?;
    if !sweep.is_empty() {
        let mut s = Table::new(&["N", "extent_numeric", "L_analytic", "n0_numeric", "n0_analytic"]);
        for &m in sweep {
            let cm = solve_scaled(m, stiffness)?;
            let (extent, n0) = measured(&cm.positions);
            s.push(vec![m.into(), extent.into(), cm.profile.length.into(), n0.into(), cm.profile.n0.into()]);
        }
        sink.csv("density_scaling.csv", &s)?;
    }
    #[derive(Serialize)]
    struct Summary {
        n: usize,
        stiffness: f64,
        length: f64,
        n0: f64,
        extent_numeric: f64,
        n0_numeric: f64,
        /// Max force in the unit-spacing frame.
        residual: f64,
        iterations: usize,
        max_profile_deviation: f64,
    }
    let (extent, n0) = measured(&c.positions);
    let summary = Summary {
        n,
        stiffness,
        length: c.profile.length,
        n0: c.profile.n0,
        extent_numeric: extent,
        n0_numeric: n0,
        residual: c.residual,
        iterations: c.iterations,
        max_profile_deviation: c.max_deviation,
    };
    emit(sink, "trap_solve.json", "trap solve", &summary)?;
    Ok(Status::Ok)
}

fn trap_spectra(ctx: &Ctx, n: usize, sink: &mut Sink) -> Result<Status> {
    let gamma = ctx.gamma_or(30.0)?;
    let nu_perp = ctx.nu_perp_or(1.2)?;
    let c = TrappedCrystal::natural(n, gamma)?;
    let exc = exciton_modes_trapped(&c);
    let mut t = Table::new(&["index", "E", "E_long_wavelength", "E_short_wavelength"]);
    for i in 0..exc.len() {
        t.push(vec![
            (i + 1).into(),
            exc.eigenvalues[i].into(),
            exc.overlay.long_wavelength[i].into(),
            exc.overlay.short_wavelength[i].into(),
        ]);
    }
    sink.csv("exciton_spectrum.csv", &t)?;

    let kinds = [("long", ModeKind::PhononLong), ("y", ModeKind::PhononY), ("z", ModeKind::PhononZ)];
    let mut bases: Vec<(&str, ModeBasis)> = Vec::new();
    for (name, kind) in kinds {
        bases.push((name, phonon_modes_trapped(&c, kind, nu_perp)?));
    }
    let mut p =
        Table::new(&["branch", "index", "omega", "omega_over_nu", "omega_long_wavelength", "omega_short_wavelength"]);
    for (name, b) in &bases {
        for i in 0..b.len() {
            p.push(vec![
                (*name).into(),
                (i + 1).into(),
                b.eigenvalues[i].into(),
                (b.eigenvalues[i] / c.nu_tilde).into(),
                b.overlay.long_wavelength[i].into(),
                b.overlay.short_wavelength[i].into(),
            ]);
        }
    }
    sink.csv("phonon_spectrum.csv", &p)?;

    #[derive(Serialize)]
    struct Branch<'a> {
        branch: &'a str,
        unstable: bool,
        omega_max: f64,
        sw_constant_fit: Option<f64>,
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        n: usize,
        gamma: f64,
        nu_tilde: f64,
        nu_perp_tilde: f64,
        exciton_top: f64,
        exciton_bottom: f64,
        exciton_sum: f64,
        phonons: Vec<Branch<'a>>,
    }
    let summary = Summary {
        n,
        gamma,
        nu_tilde: c.nu_tilde,
        nu_perp_tilde: nu_perp,
        exciton_top: exc.eigenvalues.iter().copied().fold(f64::MIN, f64::max),
        exciton_bottom: exc.eigenvalues.iter().copied().fold(f64::MAX, f64::min),
        exciton_sum: exc.eigenvalues.iter().sum(),
        phonons: bases
            .iter()
            .map(|(name, b)| Branch {
                branch: name,
                unstable: b.unstable,
                omega_max: b.eigenvalues.iter().copied().fold(f64::MIN, f64::max),
                sw_constant_fit: b.overlay.sw_constant_fit,
            })
            .collect(),
    };
    emit(sink, "trap_spectra.json", "trap spectra", &summary)?;
    if let Some((name, _)) = bases.iter().find(|(_, b)| b.unstable) {
        return Ok(Status::Regime(format!("{name} branch unstable: the linear chain is not the ground state")));
    }
    Ok(Status::Ok)
}

fn trap_lindemann(ctx: &Ctx, n: usize, taus: &[f64], tau_max: f64, points: usize, sink: &mut Sink) -> Result<Status> {
    if taus.iter().any(|t| !(*t >= 0.0)) || !(tau_max >= 0.0) {
        bail!("temperatures must be non-negative");
    }
    let gamma = ctx.gamma_or(30.0)?;
    let c = TrappedCrystal::natural(n, gamma)?;
    let long = phonon_modes_trapped(&c, ModeKind::PhononLong, 0.0)?;
    let mut t = Table::new(&["tau", "xi", "F_exact", "F_sound_wave", "Gamma_L"]);
    for &tau in taus {
        let exact = lindemann(&c, &long, tau, PhononSpectrum::Exact)?;
        let sw = lindemann(&c, &long, tau, PhononSpectrum::SoundWave)?;
        for i in 0..exact.xi.len() {
            t.push(vec![tau.into(), exact.xi[i].into(), exact.f[i].into(), sw.f[i].into(), exact.gamma_l[i].into()]);
        }
    }
    sink.csv("lindemann_profile.csv", &t)?;
    let mut h = Table::new(&["tau", "F_h"]);
    for tau in linspace(0.0, tau_max, points) {
        h.push(vec![tau.into(), lindemann_homogeneous(tau).into()]);
    }
    sink.csv("lindemann_homogeneous.csv", &h)?;
    Ok(Status::Ok)
}

fn stability(ctx: &Ctx, n: Option<usize>, sink: &mut Sink) -> Result<Status> {
    let (gamma, tau, nu_perp) = (ctx.gamma()?, ctx.tau()?, ctx.nu_perp()?);
    let profile = match n {
        Some(n) => {
            let c = TrappedCrystal::natural(n, gamma)?;
            let long = phonon_modes_trapped(&c, ModeKind::PhononLong, 0.0)?;
            Some(lindemann(&c, &long, tau, PhononSpectrum::Exact)?)
        }
        None => None,
    };
    let r = stability_report(gamma, tau, nu_perp, profile.as_ref())?;
    emit(sink, "stability.json", "stability", &r)?;
    let mut failed = Vec::new();
    for (ok, what) in [
        (r.zigzag_ok, "zig-zag"),
        (r.inequality_ok, "tunneling inequality"),
        (r.temperature_ok, "temperature"),
        (r.lindemann_ok, "Lindemann"),
    ] {
        if !ok {
            failed.push(what);
        }
    }
    Ok(if failed.is_empty() { Status::Ok } else { Status::Regime(format!("failed checks: {}", failed.join(", "))) })
}

fn gate_status(reports: &[CaseStudyReport]) -> Status {
    let bad: Vec<String> = reports
        .iter()
        .filter_map(|r| {
            if r.f_star < 0.0 {
                Some(format!("{}: F* < 0", r.name))
            } else if !r.detuning_valid {
                Some(format!("{}: optimal detuning below 10 W", r.name))
            } else {
                None
            }
        })
        .collect();
    if bad.is_empty() {
        Status::Ok
    } else {
        Status::Regime(bad.join("; "))
    }
}

fn fidelity(ctx: &Ctx, sink: &mut Sink) -> Result<Status> {
    let report = case_study("fidelity", ctx.case_study_inputs()?)?;
    emit(sink, "fidelity.json", "fidelity", &report)?;
    Ok(gate_status(std::slice::from_ref(&report)))
}

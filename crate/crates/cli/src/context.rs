//! Resolves run parameters from flags, then the config file, then defaults.

use std::cell::OnceCell;
use std::f64::consts::PI;

use anyhow::{anyhow, bail, Result};
use clap::Args;

use mdc_core::fidelity::{CaseStudyInputs, ModeShape};
use mdc_core::rotor::{qubit_pair_params, QubitPairParams, StateLabel};
use mdc_core::scales::{c3_si, derive_scales, CrystalScales, MoleculeParams};
use mdc_core::specfun::lambda_trap;
use mdc_core::trapped::center_density_si;

use crate::config::{ModeName, RunConfig};

/// Parses "N,M" into a state label.
pub fn parse_label(s: &str) -> std::result::Result<StateLabel, String> {
    let (n, m) = s.split_once(',').ok_or_else(|| format!("expected N,M but got {s:?}"))?;
    let n: u32 = n.trim().parse().map_err(|e| format!("bad N in {s:?}: {e}"))?;
    let m: i32 = m.trim().parse().map_err(|e| format!("bad M in {s:?}: {e}"))?;
    StateLabel::new(n, m).map_err(|e| e.to_string())
}

/// Flags shared by commands that need crystal parameters. Dimensionless
/// values win over the physical ones they would otherwise be derived from.
#[derive(Debug, Clone, Default, Args)]
pub struct PhysArgs {
    /// Exchange parameter κ.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Dipole-difference parameter ε.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// Interaction strength γ.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Dimensionless temperature τ = √γ k_BT/U_dd.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, conflicts_with_all = ["tau", "temperature_k"])]
    pub temperature_uk: Option<f64>,
    #[arg(long, conflicts_with = "tau")]
    pub temperature_k: Option<f64>,
    /// Transverse confinement ħν⊥/U_dd.
    #[arg(long)]
    pub nu_perp: Option<f64>,
    #[arg(long, conflicts_with = "nu_perp")]
    pub nu_perp_khz: Option<f64>,
    /// Lattice spacing [nm].
    #[arg(long)]
    pub a0_nm: Option<f64>,
    /// Induced dipole μ_g [D].
    #[arg(long, allow_hyphen_values = true)]
    pub mu_g: Option<f64>,
    /// Ground state N,M.
    #[arg(long, value_parser = parse_label)]
    pub g: Option<StateLabel>,
    /// Excited state N,M.
    #[arg(long, value_parser = parse_label)]
    pub e: Option<StateLabel>,
    /// Bias field [B/μ0].
    #[arg(long = "Eb")]
    pub e_b: Option<f64>,
}

pub struct Ctx {
    pub cfg: RunConfig,
    pub phys: PhysArgs,
    pair: OnceCell<QubitPairParams>,
}

impl Ctx {
    pub fn new(cfg: RunConfig, phys: PhysArgs) -> Self {
        Ctx { cfg, phys, pair: OnceCell::new() }
    }

    pub fn molecule(&self) -> Result<MoleculeParams> {
        let m = &self.cfg.molecule;
        let d = MoleculeParams::cabr();
        Ok(MoleculeParams::new(
            m.mu0_debye.unwrap_or(d.mu0),
            m.b_ghz.map_or(d.b, |v| v * 1e9),
            m.mass_amu.unwrap_or(d.mass),
            m.gamma_sr_mhz.map_or(d.gamma_sr, |v| v * 1e6),
        )?)
    }

    pub fn n_max(&self) -> Option<u32> {
        self.cfg.numerics.n_max
    }

    pub fn states(&self) -> (StateLabel, StateLabel, f64) {
        let s = &self.cfg.states;
        let lbl = |flag: Option<StateLabel>, cfg: Option<(u32, i32)>, n| {
            flag.unwrap_or_else(|| cfg.map_or(StateLabel { n, m: 0 }, |(n, m)| StateLabel { n, m }))
        };
        (lbl(self.phys.g, s.g, 1), lbl(self.phys.e, s.e, 2), self.phys.e_b.or(s.e_b).unwrap_or(3.05))
    }

    pub fn pair(&self) -> Result<&QubitPairParams> {
        if let Some(p) = self.pair.get() {
            return Ok(p);
        }
        let (g, e, e_b) = self.states();
        for l in [g, e] {
            StateLabel::new(l.n, l.m)?;
        }
        let p = qubit_pair_params(g, e, e_b, self.n_max())?;
        Ok(self.pair.get_or_init(|| p))
    }

    pub fn kappa(&self) -> Result<f64> {
        match self.phys.kappa.or(self.cfg.crystal.kappa) {
            Some(k) => Ok(k),
            None => Ok(self.pair()?.kappa),
        }
    }

    pub fn epsilon(&self) -> Result<f64> {
        match self.phys.epsilon.or(self.cfg.crystal.epsilon) {
            Some(e) => Ok(e),
            None => Ok(self.pair()?.epsilon),
        }
    }

    /// |μ_g| [D].
    pub fn mu_g_debye(&self) -> Result<f64> {
        match self.phys.mu_g.or(self.cfg.crystal.mu_g_debye) {
            Some(m) => Ok(m.abs()),
            None => Ok((self.pair()?.mu_g * self.molecule()?.mu0).abs()),
        }
    }

    pub fn dimension(&self, flag: Option<u8>) -> u8 {
        flag.or(self.cfg.crystal.dimension).unwrap_or(1)
    }

    /// Lattice spacing [m], either given or a0 = 1/n(0) of a trap holding
    /// N molecules at ν.
    pub fn a0(&self) -> Result<f64> {
        if let Some(a) = self.phys.a0_nm.or(self.cfg.crystal.a0_nm) {
            return Ok(a * 1e-9);
        }
        let c = &self.cfg.crystal;
        match (c.n, c.nu_khz) {
            (Some(n), Some(nu)) => {
                let mol = self.molecule()?;
                let n0 = center_density_si(n, mol.mass_kg(), 2.0 * PI * nu * 1e3, c3_si(self.mu_g_debye()?));
                Ok(1.0 / n0)
            }
            _ => bail!("lattice spacing unknown: set crystal.a0_nm or crystal.N with crystal.nu_kHz"),
        }
    }

    /// Temperature [K]; zero when unset.
    pub fn temperature(&self) -> f64 {
        let p = &self.phys;
        p.temperature_k
            .or(p.temperature_uk.map(|t| t * 1e-6))
            .or(self.cfg.crystal.temperature_uk.map(|t| t * 1e-6))
            .unwrap_or(0.0)
    }

    pub fn scales(&self, dim: u8) -> Result<CrystalScales> {
        Ok(derive_scales(&self.molecule()?, self.mu_g_debye()?, self.a0()?, self.temperature(), dim)?)
    }

    pub fn gamma(&self) -> Result<f64> {
        match self.phys.gamma {
            Some(g) => Ok(g),
            None => self.scales(1).map(|s| s.gamma).map_err(|e| anyhow!("gamma unknown: pass --gamma ({e})")),
        }
    }

    /// True when the config or flags say where the crystal spacing comes from.
    fn has_spacing(&self) -> bool {
        let c = &self.cfg.crystal;
        self.phys.a0_nm.or(c.a0_nm).is_some() || (c.n.is_some() && c.nu_khz.is_some())
    }

    /// γ, falling back to `default` when no physical crystal is configured.
    pub fn gamma_or(&self, default: f64) -> Result<f64> {
        if self.phys.gamma.is_none() && !self.has_spacing() {
            return Ok(default);
        }
        self.gamma()
    }

    /// ħν⊥/U_dd, falling back to `default` when none is configured.
    pub fn nu_perp_or(&self, default: f64) -> Result<f64> {
        if self.phys.nu_perp.is_none() && self.phys.nu_perp_khz.or(self.cfg.crystal.nu_perp_khz).is_none() {
            return Ok(default);
        }
        self.nu_perp()
    }

    pub fn tau(&self) -> Result<f64> {
        if let Some(t) = self.phys.tau {
            return Ok(t);
        }
        let t = self.temperature();
        if t == 0.0 {
            return Ok(0.0);
        }
        match self.phys.gamma {
            // Keep τ consistent with an explicit γ.
            Some(g) => {
                let s = self.scales(1)?;
                Ok(g.sqrt() * mdc_core::scales::consts::KB * t / s.u_dd)
            }
            None => Ok(self.scales(1)?.tau),
        }
    }

    pub fn nu_perp(&self) -> Result<f64> {
        if let Some(v) = self.phys.nu_perp {
            return Ok(v);
        }
        match self.phys.nu_perp_khz.or(self.cfg.crystal.nu_perp_khz) {
            Some(khz) => Ok(self.scales(1)?.nu_tilde_of(khz * 1e3)),
            None => bail!("transverse confinement unknown: pass --nu-perp or set crystal.nu_perp_kHz"),
        }
    }

    /// The physical frame, when no dimensionless override makes it
    /// inconsistent with the parameters in use.
    pub fn si_scales(&self, dim: u8) -> Option<CrystalScales> {
        if self.phys.gamma.is_some() || self.phys.tau.is_some() {
            return None;
        }
        self.scales(dim).ok()
    }

    pub fn n_crystal(&self) -> usize {
        self.cfg.numerics.n_crystal.unwrap_or(400)
    }

    /// Inputs of the full scales → rotor → crystal → gate chain.
    pub fn case_study_inputs(&self) -> Result<CaseStudyInputs> {
        let (g, e, e_b) = self.states();
        let cav = &self.cfg.cavity;
        let a0 = self.a0()?;
        let n_crystal = self.n_crystal();
        let length_over_lambda = match cav.lambda_c_mm {
            // With a0 = 1/n(0) the crystal spans L = ΛN a0.
            Some(mm) => lambda_trap() * n_crystal as f64 * a0 / (mm * 1e-3),
            None => 0.01,
        };
        let mode = match cav.mode.unwrap_or(ModeName::Cosine) {
            ModeName::Cosine => ModeShape::Cosine,
            ModeName::Flat => ModeShape::Flat,
        };
        let probe = derive_scales(&self.molecule()?, self.mu_g_debye()?, a0, 0.0, 1)?;
        let tau = match self.phys.tau {
            Some(t) => t,
            None => probe.tau_of(self.temperature()),
        };
        Ok(CaseStudyInputs {
            molecule: self.molecule()?,
            e_b,
            g_state: g,
            e_state: e,
            mu_g_debye: self.mu_g_debye()?,
            kappa: self.kappa()?,
            a0,
            tau,
            n_eff: cav.n_eff.unwrap_or(1e4),
            d: cav.d_um.unwrap_or(0.5) * 1e-6,
            gamma_c_hz: cav.gamma_c_khz.unwrap_or(10.0) * 1e3,
            n_crystal,
            length_over_lambda,
            g_n_hz_override: cav.g_n_mhz.map(|v| v * 1e6),
            mode,
        })
    }
}

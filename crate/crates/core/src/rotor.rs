//! Rigid rotor in a DC field: Stark levels, induced and transition dipoles,
//! pair parameters (ε, κ), sweet and magic field points, and the spin-rotation
//! extension for ²Σ molecules.
//!
//! Energies are in units of B, fields in B/μ0, dipoles in μ0.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::sym_eigen;
use crate::scales::{consts, MoleculeParams};
use crate::{Error, Result};

/// Levels closer than this to the basis cutoff are solved but not returned.
pub const CUTOFF_MARGIN: u32 = 4;
const CONVERGENCE_TOL: f64 = 1e-8;

/// Rotational label (N, M_N) of the field-free state a level connects to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateLabel {
    pub n: u32,
    pub m: i32,
}

impl StateLabel {
    pub fn new(n: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > n {
            return Err(Error::domain(format!("|M| = {} exceeds N = {n}", m.abs())));
        }
        Ok(StateLabel { n, m })
    }
}

impl std::fmt::Display for StateLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StarkLevel {
    pub label: StateLabel,
    /// Energy [B].
    pub energy: f64,
    /// Amplitudes on |N, M_N⟩ for N = |M_N| ..= N_max.
    pub vector: Vec<f64>,
    /// Induced dipole ⟨μ_z⟩ [μ0].
    pub dipole: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StarkSolution {
    pub e_b: f64,
    pub m_n: i32,
    pub n_max: u32,
    /// Converged levels, ascending in energy.
    pub levels: Vec<StarkLevel>,
}

impl StarkSolution {
    pub fn level(&self, n: u32) -> Option<&StarkLevel> {
        self.levels.iter().find(|l| l.label.n == n)
    }
}

/// ⟨N+1, M| cos θ |N, M⟩.
pub fn cos_element(n: u32, m: i32) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (((n + 1.0).powi(2) - m * m) / ((2.0 * n + 1.0) * (2.0 * n + 3.0))).sqrt()
}

/// ⟨N', M+1| sin θ e^{iφ} |N, M⟩ for N' = N ± 1 (Condon-Shortley phases).
pub fn raise_element(n_to: u32, n: u32, m: i32) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    if n_to == n + 1 {
        -((nf + mf + 1.0) * (nf + mf + 2.0) / ((2.0 * nf + 1.0) * (2.0 * nf + 3.0))).sqrt()
    } else if n_to + 1 == n {
        let num = (nf - mf) * (nf - mf - 1.0);
        if num <= 0.0 {
            0.0
        } else {
            (num / ((2.0 * nf - 1.0) * (2.0 * nf + 1.0))).sqrt()
        }
    } else {
        0.0
    }
}

fn block_size(m: i32, n_max: u32) -> usize {
    (n_max - m.unsigned_abs() + 1) as usize
}

fn cos_matrix(m: i32, n_max: u32) -> DMatrix<f64> {
    let n0 = m.unsigned_abs();
    let dim = block_size(m, n_max);
    let mut c = DMatrix::zeros(dim, dim);
    for a in 0..dim.saturating_sub(1) {
        let v = cos_element(n0 + a as u32, m);
        c[(a, a + 1)] = v;
        c[(a + 1, a)] = v;
    }
    c
}

/// Matrix of sin θ e^{iφ} from the M block into the M+1 block.
fn raise_matrix(m: i32, n_max: u32) -> DMatrix<f64> {
    let from0 = m.unsigned_abs();
    let to0 = (m + 1).unsigned_abs();
    let mut s = DMatrix::zeros(block_size(m + 1, n_max), block_size(m, n_max));
    for (a, n) in (from0..=n_max).enumerate() {
        for (b, np) in (to0..=n_max).enumerate() {
            let v = raise_element(np, n, m);
            if v != 0.0 {
                s[(b, a)] = v;
            }
        }
    }
    s
}

fn quad_form(a: &[f64], m: &DMatrix<f64>, b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            s += ai * m[(i, j)] * bj;
        }
    }
    s
}

fn solve_block(e_b: f64, m_n: i32, n_max: u32) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let n0 = m_n.unsigned_abs();
    let c = cos_matrix(m_n, n_max);
    let mut h = -e_b * &c;
    for a in 0..c.nrows() {
        let n = (n0 + a as u32) as f64;
        h[(a, a)] += n * (n + 1.0);
    }
    let eig = sym_eigen(h);
    (eig.values, eig.vectors, c)
}

/// Stark levels of fixed M_N in a basis truncated at N_max. Returns levels
/// with N ≤ N_max − 4 after checking they move by < 1e-8 B when the basis
/// grows by two.
pub fn solve_stark(e_b: f64, m_n: i32, n_max: u32) -> Result<StarkSolution> {
    if !e_b.is_finite() {
        return Err(Error::domain("field must be finite"));
    }
    let n0 = m_n.unsigned_abs();
    if n_max < n0 + CUTOFF_MARGIN {
        return Err(Error::domain(format!("N_max = {n_max} too small for |M_N| = {n0}")));
    }
    let keep = (n_max - n0 - CUTOFF_MARGIN + 1) as usize;
    let (vals, vecs, c) = solve_block(e_b, m_n, n_max);
    let (vals2, _, _) = solve_block(e_b, m_n, n_max + 2);
    let worst = (0..keep).map(|i| (vals[i] - vals2[i]).abs()).fold(0.0, f64::max);
    if worst > CONVERGENCE_TOL {
        return Err(Error::Convergence {
            what: "rotor basis",
            detail: format!("E_b = {e_b}, M_N = {m_n}, N_max = {n_max}: retained energies shift by {worst:.3e} B"),
        });
    }
    let levels = (0..keep)
        .map(|i| {
            let v: Vec<f64> = vecs.column(i).iter().copied().collect();
            let dipole = quad_form(&v, &c, &v);
            StarkLevel { label: StateLabel { n: n0 + i as u32, m: m_n }, energy: vals[i], vector: v, dipole }
        })
        .collect();
    Ok(StarkSolution { e_b, m_n, n_max, levels })
}

/// Default truncation for a set of target rotational quantum numbers.
pub fn default_n_max(n_target: u32) -> u32 {
    10.max(n_target + 6)
}

#[derive(Debug, Clone, Serialize)]
pub struct QubitPairParams {
    pub g_label: StateLabel,
    pub e_label: StateLabel,
    pub e_b: f64,
    pub mu_g: f64,
    pub mu_e: f64,
    pub epsilon: f64,
    /// Resonant exchange element η|⟨e|μ|g⟩|² [μ0²].
    pub d_r: f64,
    pub kappa: f64,
    pub eta: f64,
    /// (E_e − E_g) [B/ħ].
    pub omega_eg: f64,
    /// |⟨e|μ_x|g⟩| [μ0].
    pub theta_x: f64,
    /// |⟨e|μ|g⟩| [μ0].
    pub transition_dipole: f64,
    /// Set when one state has M_N = 0 and the other |M_N| = 1, so the
    /// exchange can leak into the degenerate −M_N partner unless that
    /// degeneracy is lifted externally.
    pub degeneracy_warning: bool,
}

fn pair_from_levels(g: &StarkLevel, e: &StarkLevel, e_b: f64, n_max: u32) -> QubitPairParams {
    let dm = e.label.m - g.label.m;
    let (eta, d2, theta_x) = match dm {
        0 => {
            let c = cos_matrix(g.label.m, n_max);
            let t = quad_form(&e.vector, &c, &g.vector);
            (1.0, t * t, 0.0)
        }
        1 => {
            let s = raise_matrix(g.label.m, n_max);
            let t = quad_form(&e.vector, &s, &g.vector);
            (-0.5, 0.5 * t * t, 0.5 * t.abs())
        }
        -1 => {
            let s = raise_matrix(e.label.m, n_max);
            let t = quad_form(&g.vector, &s, &e.vector);
            (-0.5, 0.5 * t * t, 0.5 * t.abs())
        }
        _ => (0.0, 0.0, 0.0),
    };
    let d_r = eta * d2;
    let mu_g = g.dipole;
    let mu_e = e.dipole;
    QubitPairParams {
        g_label: g.label,
        e_label: e.label,
        e_b,
        mu_g,
        mu_e,
        epsilon: (mu_e - mu_g) / mu_g,
        d_r,
        kappa: d_r / (mu_g * mu_g),
        eta,
        omega_eg: e.energy - g.energy,
        theta_x,
        transition_dipole: d2.sqrt(),
        degeneracy_warning: dm.abs() == 1 && (g.label.m == 0 || e.label.m == 0),
    }
}

/// Pair parameters for |g⟩, |e⟩ at field E_b. `n_max = None` picks
/// [`default_n_max`].
pub fn qubit_pair_params(g: StateLabel, e: StateLabel, e_b: f64, n_max: Option<u32>) -> Result<QubitPairParams> {
    let n_max = n_max.unwrap_or_else(|| default_n_max(g.n.max(e.n)));
    let sg = solve_stark(e_b, g.m, n_max)?;
    let se = if e.m == g.m { sg.clone() } else { solve_stark(e_b, e.m, n_max)? };
    let lg = sg.level(g.n).ok_or_else(|| Error::domain(format!("state {g} outside converged basis")))?;
    let le = se.level(e.n).ok_or_else(|| Error::domain(format!("state {e} outside converged basis")))?;
    Ok(pair_from_levels(lg, le, e_b, n_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldPointKind {
    /// ε = 0.
    Sweet,
    /// ε + κ = 0.
    Magic,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldPoint {
    pub kind: FieldPointKind,
    pub e_b: f64,
    pub params: QubitPairParams,
    pub iterations: usize,
}

/// μ_g² ε (sweet) or μ_g²(ε + κ) (magic): same zeros, no pole where μ_g = 0.
fn field_target(p: &QubitPairParams, kind: FieldPointKind) -> f64 {
    match kind {
        FieldPointKind::Sweet => p.mu_g * (p.mu_e - p.mu_g),
        FieldPointKind::Magic => p.mu_g * (p.mu_e - p.mu_g) + p.d_r,
    }
}

/// Bracketed root search for a sweet or magic field on [lo, hi].
pub fn find_field_point(
    g: StateLabel,
    e: StateLabel,
    kind: FieldPointKind,
    bracket: (f64, f64),
    n_max: Option<u32>,
) -> Result<FieldPoint> {
    let (mut a, mut b) = bracket;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::domain(format!("bad bracket [{a}, {b}]")));
    }
    let eval = |x: f64| -> Result<f64> { Ok(field_target(&qubit_pair_params(g, e, x, n_max)?, kind)) };
    let mut fa = eval(a)?;
    let fb = eval(b)?;
    if fa == 0.0 {
        b = a;
    } else if fb == 0.0 {
        a = b;
    } else if fa.signum() == fb.signum() {
        return Err(Error::NotFound(format!(
            "{kind:?} point for {g} -> {e}: no sign change on [{}, {}]",
            bracket.0, bracket.1
        )));
    }
    let mut iterations = 0;
    while b - a > 1e-12 && iterations < 200 {
        let mid = 0.5 * (a + b);
        let fm = eval(mid)?;
        iterations += 1;
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let e_b = 0.5 * (a + b);
    let params = qubit_pair_params(g, e, e_b, n_max)?;
    Ok(FieldPoint { kind, e_b, params, iterations })
}

/// One level of the rotor with spin-rotation coupling, labeled by its
/// dominant |N, M_N, M_S⟩ component. `m_s2` is 2 M_S.
#[derive(Debug, Clone, Serialize)]
pub struct SpinLevel {
    pub n: u32,
    pub m_n: i32,
    pub m_s2: i32,
    pub energy: f64,
    pub vector: Vec<f64>,
    pub dipole: f64,
}

/// Spectrum of one M_J block (`m_j2` = 2 M_J).
#[derive(Debug, Clone, Serialize)]
pub struct SpinBlock {
    pub m_j2: i32,
    pub basis: Vec<(u32, i32, i32)>,
    pub levels: Vec<SpinLevel>,
}

impl SpinBlock {
    /// Level whose eigenvector has the largest weight on |n, m_n, m_s⟩.
    pub fn find(&self, n: u32, m_n: i32, m_s2: i32) -> Option<&SpinLevel> {
        let idx = self.basis.iter().position(|&b| b == (n, m_n, m_s2))?;
        self.levels.iter().max_by(|a, b| a.vector[idx].abs().total_cmp(&b.vector[idx].abs()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpinRotorSolution {
    pub e_b: f64,
    pub gamma_sr_over_b: f64,
    pub n_max: u32,
    pub blocks: Vec<SpinBlock>,
    /// |⟨e|μ_x|g⟩| for g = |1,0,−½⟩, e = |2,0,+½⟩.
    pub theta_x: f64,
    /// Exchange parameter of that spin-changing pair (η = −½).
    pub kappa: f64,
    pub mu_g: f64,
    pub mu_e: f64,
}

fn spin_basis(m_j2: i32, n_max: u32) -> Vec<(u32, i32, i32)> {
    let mut b = Vec::new();
    for n in 0..=n_max {
        for m_s2 in [-1, 1] {
            let m_n2 = m_j2 - m_s2;
            if m_n2 % 2 != 0 {
                continue;
            }
            let m_n = m_n2 / 2;
            if m_n.unsigned_abs() <= n {
                b.push((n, m_n, m_s2));
            }
        }
    }
    b
}

fn spin_cos_matrix(basis: &[(u32, i32, i32)]) -> DMatrix<f64> {
    let dim = basis.len();
    let mut c = DMatrix::zeros(dim, dim);
    for (i, &(n, m, s)) in basis.iter().enumerate() {
        if let Some(j) = basis.iter().position(|&b| b == (n + 1, m, s)) {
            let v = cos_element(n, m);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    c
}

fn solve_spin_block(r: f64, e_b: f64, m_j2: i32, n_max: u32) -> (SpinBlock, DMatrix<f64>) {
    let basis = spin_basis(m_j2, n_max);
    let dim = basis.len();
    let c = spin_cos_matrix(&basis);
    let mut h = -e_b * &c;
    for (i, &(n, m, s2)) in basis.iter().enumerate() {
        let nf = n as f64;
        h[(i, i)] += nf * (nf + 1.0) + r * m as f64 * 0.5 * s2 as f64;
        // ½ r (N₊S₋ + N₋S₊): |n, m, +½⟩ ↔ |n, m+1, −½⟩.
        if s2 == 1 {
            if let Some(j) = basis.iter().position(|&b| b == (n, m + 1, -1)) {
                let mf = m as f64;
                let v = 0.5 * r * (nf * (nf + 1.0) - mf * (mf + 1.0)).sqrt();
                h[(i, j)] += v;
                h[(j, i)] += v;
            }
        }
    }
    let eig = sym_eigen(h);
    let levels = (0..dim)
        .map(|k| {
            let v: Vec<f64> = eig.vectors.column(k).iter().copied().collect();
            let dom = (0..dim).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
            let (n, m_n, m_s2) = basis[dom];
            SpinLevel { n, m_n, m_s2, energy: eig.values[k], dipole: quad_form(&v, &c, &v), vector: v }
        })
        .collect();
    (SpinBlock { m_j2, basis, levels }, c)
}

/// Spin-rotor levels for M_J = −5/2 ..= 5/2 plus the spin-changing pair
/// |1,0⟩|−½⟩ → |2,0⟩|+½⟩.
pub fn solve_spin_rotor(mol: &MoleculeParams, e_b: f64, n_max: u32) -> Result<SpinRotorSolution> {
    mol.validate()?;
    if n_max < 2 + CUTOFF_MARGIN {
        return Err(Error::domain("N_max too small for the N = 2 target state"));
    }
    let r = mol.spin_rotation_ratio();
    // Convergence check on the M_J = ±½ blocks.
    for m_j2 in [-1, 1] {
        let (a, _) = solve_spin_block(r, e_b, m_j2, n_max);
        let (b, _) = solve_spin_block(r, e_b, m_j2, n_max + 2);
        let keep = a.levels.iter().filter(|l| l.n + CUTOFF_MARGIN <= n_max).count();
        let worst = (0..keep).map(|i| (a.levels[i].energy - b.levels[i].energy).abs()).fold(0.0, f64::max);
        if worst > CONVERGENCE_TOL {
            return Err(Error::Convergence {
                what: "spin-rotor basis",
                detail: format!("E_b = {e_b}, N_max = {n_max}: shift {worst:.3e} B"),
            });
        }
    }
    let mut blocks = Vec::new();
    for m_j2 in [-5, -3, -1, 1, 3, 5] {
        let (mut blk, _) = solve_spin_block(r, e_b, m_j2, n_max);
        blk.levels.retain(|l| l.n + CUTOFF_MARGIN <= n_max);
        blocks.push(blk);
    }
    let (lower, _) = solve_spin_block(r, e_b, -1, n_max);
    let (upper, _) = solve_spin_block(r, e_b, 1, n_max);
    let g = lower.find(1, 0, -1).ok_or_else(|| Error::NotFound("state |1,0,-1/2>".into()))?;
    let e = upper.find(2, 0, 1).ok_or_else(|| Error::NotFound("state |2,0,+1/2>".into()))?;
    // μ₊ = sin θ e^{iφ} keeps M_S and raises M_N.
    let mut t = 0.0;
    for (a, &(n, m, s)) in lower.basis.iter().enumerate() {
        for (b, &(np, mp, sp)) in upper.basis.iter().enumerate() {
            if sp == s && mp == m + 1 {
                t += e.vector[b] * raise_element(np, n, m) * g.vector[a];
            }
        }
    }
    let theta_x = 0.5 * t.abs();
    let mu_g = g.dipole;
    let kappa = -0.5 * 0.5 * t * t / (mu_g * mu_g);
    Ok(SpinRotorSolution { e_b, gamma_sr_over_b: r, n_max, blocks, theta_x, kappa, mu_g, mu_e: e.dipole })
}

/// Order-of-magnitude rate [Hz] of spin flips through virtual rotational
/// excitation: μ0⁴/(16π²ε0²a0⁶) · γ_sr²/B³, divided by h.
pub fn spin_flip_rate_estimate(mol: &MoleculeParams, a0: f64) -> Result<f64> {
    mol.validate()?;
    if !(a0.is_finite() && a0 > 0.0) {
        return Err(Error::domain("a0 must be positive"));
    }
    let mu = mol.mu0_si();
    let u0 = mu * mu / (4.0 * std::f64::consts::PI * consts::EPS0 * a0.powi(3));
    let gsr = mol.gamma_sr * consts::H;
    let b = mol.b_joule();
    Ok(u0 * u0 * gsr * gsr / b.powi(3) / consts::H)
}

/// Field scan: one row per (E_b, level) with label, energy and dipole.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub e_b: f64,
    pub label: StateLabel,
    pub energy: f64,
    pub dipole: f64,
}

/// Solves each field of `fields` for every |M_N| ≤ `m_max` and keeps levels
/// with N ≤ `n_show`.
pub fn stark_scan(fields: &[f64], m_max: u32, n_show: u32, n_max: u32) -> Result<Vec<ScanRow>> {
    let per_field = crate::par::map_slice(fields, |&e_b| -> Result<Vec<ScanRow>> {
        let mut rows = Vec::new();
        for m in 0..=m_max as i32 {
            let sol = solve_stark(e_b, m, n_max)?;
            for l in sol.levels.iter().filter(|l| l.label.n <= n_show) {
                rows.push(ScanRow { e_b, label: l.label, energy: l.energy, dipole: l.dipole });
            }
        }
        rows.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        Ok(rows)
    });
    let mut out = Vec::new();
    for r in per_field {
        out.extend(r?);
    }
    Ok(out)
}

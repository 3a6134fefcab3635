//! Infinite homogeneous crystals: the 1D chain (closed forms in
//! polylogarithms) and the 2D triangular lattice (cutoff lattice sums).
//!
//! Wavevectors are in units of 1/a0; f is the phonon frequency in units of
//! U_dd/(ħ√γ); J and g are dimensionless lattice functions.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::specfun::{composite_rule, polylog_circle_minus_zeta, zeta3, zeta5};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dim {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Dim {
    pub fn from_int(d: u8) -> Result<Self> {
        match d {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            _ => Err(Error::domain(format!("dimension must be 1 or 2, got {d}"))),
        }
    }

    pub fn as_int(self) -> u8 {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// Default radial cutoff for 2D lattice sums [a0].
pub const DEFAULT_CUTOFF: f64 = 60.0;

/// Constant of the zig-zag threshold obtained from the transverse dispersion:
/// ħν⊥ = √(279ζ(5)/8) U_dd/√γ.
pub fn zigzag_constant() -> f64 {
    (279.0 * zeta5() / 8.0).sqrt()
}

/// The rounded threshold constant used in the literature for the same
/// condition.
pub const ZIGZAG_CONSTANT_PUBLISHED: f64 = 6.08;

fn li(n: u32, q: f64) -> Complex64 {
    polylog_circle_minus_zeta(n, q).expect("orders 2..=5 are supported")
}

/// J(k) = 2 Σ_j cos(kj)/j³ = 2 Re Li₃(e^{ik}).
pub fn j_1d(k: f64) -> f64 {
    2.0 * (zeta3() + li(3, k).re)
}

/// dJ/dk = −2 Im Li₂(e^{ik}).
pub fn j_1d_prime(k: f64) -> f64 {
    -2.0 * li(2, k).im
}

/// f²(q) = 48 Σ sin²(qj/2)/j⁵ = 24 [ζ(5) − Re Li₅(e^{iq})].
pub fn f2_1d(q: f64) -> f64 {
    (-24.0 * li(5, q).re).max(0.0)
}

pub fn f_1d(q: f64) -> f64 {
    f2_1d(q).sqrt()
}

/// df/dq = 12 Im Li₄(e^{iq}) / f; at q = 0 returns the right-hand limit
/// √(12ζ(3)).
pub fn f_1d_prime(q: f64) -> f64 {
    let f = f_1d(q);
    if f == 0.0 {
        return (12.0 * zeta3()).sqrt();
    }
    12.0 * li(4, q).im / f
}

/// g(q) = (6/√2) Σ sin(qj)/j⁴ = (6/√2) Im Li₄(e^{iq}).
pub fn g_1d(q: f64) -> f64 {
    6.0 / SQRT_2 * li(4, q).im
}

/// Sites of a lattice inside a radial cutoff, excluding the origin.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub points: Vec<[f64; 2]>,
    pub radii: Vec<f64>,
    pub cutoff: f64,
    /// Sites per unit area (2D) or length (chain); drives the tail estimate.
    pub density: f64,
    pub dim: Dim,
}

impl Lattice {
    /// Triangular lattice with a1 = (1, 0), a2 = (1/2, √3/2).
    pub fn triangular(cutoff: f64) -> Self {
        let nmax = (cutoff * 1.2).ceil() as i64 + 2;
        let h = 3f64.sqrt() / 2.0;
        let mut points = Vec::new();
        let mut radii = Vec::new();
        for j in -nmax..=nmax {
            for i in -nmax..=nmax {
                let x = i as f64 + 0.5 * j as f64;
                let y = h * j as f64;
                let r = x.hypot(y);
                if r > 0.0 && r <= cutoff {
                    points.push([x, y]);
                    radii.push(r);
                }
            }
        }
        Lattice { points, radii, cutoff, density: 2.0 / 3f64.sqrt(), dim: Dim::Two }
    }

    /// Chain of unit spacing along x, |j| ≤ jmax.
    pub fn chain(jmax: usize) -> Self {
        let mut points = Vec::with_capacity(2 * jmax);
        let mut radii = Vec::with_capacity(2 * jmax);
        for j in 1..=jmax as i64 {
            for s in [-1, 1] {
                points.push([(s * j) as f64, 0.0]);
                radii.push(j as f64);
            }
        }
        Lattice { points, radii, cutoff: jmax as f64, density: 1.0, dim: Dim::One }
    }

    /// Σ_{0<|r|≤R} cos(k·r)/|r|³ with no tail correction.
    pub fn j_raw(&self, k: [f64; 2]) -> f64 {
        self.points.iter().zip(&self.radii).map(|(p, r)| (k[0] * p[0] + k[1] * p[1]).cos() / (r * r * r)).sum()
    }

    /// Continuum estimate of the sites beyond the cutoff.
    pub fn j_tail(&self, k: [f64; 2]) -> f64 {
        let r = self.cutoff;
        match self.dim {
            Dim::One => {
                let kk = k[0].abs();
                if kk == 0.0 {
                    1.0 / (r * r)
                } else {
                    2.0 * cos_tail_1d(kk, r)
                }
            }
            Dim::Two => {
                let kk = k[0].hypot(k[1]);
                2.0 * PI * self.density * bessel_tail(kk, r)
            }
        }
    }

    /// Lattice sum plus tail estimate.
    pub fn j(&self, k: [f64; 2]) -> f64 {
        self.j_raw(k) + self.j_tail(k)
    }

    /// Dynamical matrix D(q) = 3 Σ [5 r̂r̂ᵀ − 1](1 − cos q·r)/r⁵, whose
    /// eigenvalues are f_λ².
    pub fn dynamical_matrix(&self, q: [f64; 2]) -> [[f64; 2]; 2] {
        let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
        for (p, &r) in self.points.iter().zip(&self.radii) {
            let h = 0.5 * (q[0] * p[0] + q[1] * p[1]);
            let w = 6.0 * h.sin().powi(2) / r.powi(5);
            let r2 = r * r;
            xx += w * (5.0 * p[0] * p[0] / r2 - 1.0);
            yy += w * (5.0 * p[1] * p[1] / r2 - 1.0);
            xy += w * 5.0 * p[0] * p[1] / r2;
        }
        [[xx, xy], [xy, yy]]
    }

    /// Vector part of g: (3/√2) Σ r sin(q·r)/r⁵. Project on a polarization
    /// to get g_λ.
    pub fn g_vector(&self, q: [f64; 2]) -> [f64; 2] {
        let mut g = [0.0, 0.0];
        for (p, &r) in self.points.iter().zip(&self.radii) {
            let s = (q[0] * p[0] + q[1] * p[1]).sin() / r.powi(5);
            g[0] += p[0] * s;
            g[1] += p[1] * s;
        }
        [3.0 / SQRT_2 * g[0], 3.0 / SQRT_2 * g[1]]
    }
}

/// ∫_R^∞ J0(k r)/r² dr.
fn bessel_tail(k: f64, r: f64) -> f64 {
    if k == 0.0 {
        return 1.0 / r;
    }
    // k ∫_{kR}^∞ J0(x)/x² dx, graded panels up to x = kR + 400, then the
    // remainder is below 1e-5/(kR)² relative to the leading 1/(kR).
    let a = k * r;
    let end = a + 400.0;
    let panels = ((end - a) / 2.0).ceil() as usize;
    let (xs, ws) = composite_rule(a, end, panels, 8);
    let s: f64 = xs.iter().zip(&ws).map(|(&x, &w)| w * libm::j0(x) / (x * x)).sum();
    k * s
}

/// Σ_{j>R} cos(kj)/j³ approximated by ∫_R^∞ cos(kx)/x³ dx.
fn cos_tail_1d(k: f64, r: f64) -> f64 {
    let end = r + 400.0 / k.max(1e-3);
    let panels = ((end - r) * k.max(0.05) / 2.0).ceil() as usize + 8;
    let (xs, ws) = composite_rule(r, end, panels, 8);
    xs.iter().zip(&ws).map(|(&x, &w)| w * (k * x).cos() / x.powi(3)).sum()
}

/// Reciprocal primitive vectors of the triangular lattice.
pub fn reciprocal_vectors() -> ([f64; 2], [f64; 2]) {
    let s3 = 3f64.sqrt();
    ([2.0 * PI, -2.0 * PI / s3], [0.0, 4.0 * PI / s3])
}

/// High-symmetry points Γ, K, M of the hexagonal zone.
pub fn symmetry_points() -> [(&'static str, [f64; 2]); 3] {
    let (b1, b2) = reciprocal_vectors();
    let k = [(b1[0] + 2.0 * b2[0]) / 3.0, (b1[1] + 2.0 * b2[1]) / 3.0];
    let m = [b2[0] / 2.0, b2[1] / 2.0];
    [("G", [0.0, 0.0]), ("K", k), ("M", m)]
}

/// Maps k into the first zone. Returns the folded vector and whether a
/// shift was applied.
pub fn fold_to_bz(dim: Dim, k: [f64; 2]) -> ([f64; 2], bool) {
    match dim {
        Dim::One => {
            let f = crate::specfun::fold_phase(k[0]);
            ([f, 0.0], (f - k[0]).abs() > 1e-12)
        }
        Dim::Two => {
            let (b1, b2) = reciprocal_vectors();
            let mut best = k;
            let mut best_n = k[0].hypot(k[1]);
            // Fractional coordinates locate the cell; test neighbours.
            let det = b1[0] * b2[1] - b1[1] * b2[0];
            let c1 = ((k[0] * b2[1] - k[1] * b2[0]) / det).round() as i64;
            let c2 = ((b1[0] * k[1] - b1[1] * k[0]) / det).round() as i64;
            for m in c1 - 2..=c1 + 2 {
                for n in c2 - 2..=c2 + 2 {
                    let g = [m as f64 * b1[0] + n as f64 * b2[0], m as f64 * b1[1] + n as f64 * b2[1]];
                    let c = [k[0] - g[0], k[1] - g[1]];
                    let nrm = c[0].hypot(c[1]);
                    if nrm < best_n - 1e-12 {
                        best = c;
                        best_n = nrm;
                    }
                }
            }
            let moved = (best[0] - k[0]).abs() + (best[1] - k[1]).abs() > 1e-12;
            (best, moved)
        }
    }
}

/// Uniform Γ-containing grid over the reciprocal primitive cell, n×n points
/// in 2D and n points over [−π, π) in 1D.
pub fn bz_grid(dim: Dim, n: usize) -> Vec<[f64; 2]> {
    match dim {
        Dim::One => (0..n).map(|i| [-PI + 2.0 * PI * i as f64 / n as f64, 0.0]).collect(),
        Dim::Two => {
            let (b1, b2) = reciprocal_vectors();
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let (s, t) = (i as f64 / n as f64, j as f64 / n as f64);
                    out.push([s * b1[0] + t * b2[0], s * b1[1] + t * b2[1]]);
                }
            }
            out
        }
    }
}

/// Exciton band sample; `e` is measured from ħω_eg in units of U_dd.
#[derive(Debug, Clone, Serialize)]
pub struct BandSample {
    pub k: [f64; 2],
    pub j: f64,
    pub e: f64,
    /// k was outside the first zone and has been folded back.
    pub folded: bool,
}

/// Evaluates lattice functions for one dimension; 2D sums are built once.
#[derive(Debug, Clone)]
pub struct Crystal {
    pub dim: Dim,
    lattice: Option<Lattice>,
}

impl Crystal {
    pub fn new(dim: Dim, cutoff: f64) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff >= 5.0) {
            return Err(Error::domain("cutoff must be at least 5 a0"));
        }
        let lattice = match dim {
            Dim::One => None,
            Dim::Two => Some(Lattice::triangular(cutoff)),
        };
        Ok(Crystal { dim, lattice })
    }

    pub fn one_d() -> Self {
        Crystal { dim: Dim::One, lattice: None }
    }

    pub fn two_d(cutoff: f64) -> Self {
        Crystal { dim: Dim::Two, lattice: Some(Lattice::triangular(cutoff)) }
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    pub fn j(&self, k: [f64; 2]) -> f64 {
        match &self.lattice {
            None => j_1d(k[0]),
            Some(l) => l.j(k),
        }
    }

    pub fn j0(&self) -> f64 {
        self.j([0.0, 0.0])
    }

    /// E(k) − ħω_eg = εJ(0) + κJ(k).
    pub fn exciton_band(&self, k: [f64; 2], kappa: f64, epsilon: f64) -> BandSample {
        let (kf, folded) = fold_to_bz(self.dim, k);
        let j = self.j(kf);
        BandSample { k: kf, j, e: epsilon * self.j0() + kappa * j, folded }
    }

    /// Phonon branches at q, ascending in frequency.
    pub fn phonons(&self, q: [f64; 2]) -> Result<Vec<PhononMode>> {
        match &self.lattice {
            None => Ok(vec![PhononMode { q, branch: 1, f: f_1d(q[0]), polarization: None }]),
            Some(l) => {
                let d = l.dynamical_matrix(q);
                let (vals, vecs) = eig2(d);
                let mut out = Vec::with_capacity(2);
                for b in 0..2 {
                    if vals[b] < -1e-10 {
                        return Err(Error::Instability(format!("negative f² = {} at q = {q:?}", vals[b])));
                    }
                    out.push(PhononMode { q, branch: b + 1, f: vals[b].max(0.0).sqrt(), polarization: Some(vecs[b]) });
                }
                Ok(out)
            }
        }
    }

    /// g_λ evaluated at wavevector p with the polarization of branch λ at q.
    fn g_projected(&self, p: [f64; 2], pol: Option<[f64; 2]>) -> f64 {
        match (&self.lattice, pol) {
            (Some(l), Some(e)) => {
                let g = l.g_vector(p);
                g[0] * e[0] + g[1] * e[1]
            }
            _ => g_1d(p[0]),
        }
    }

    /// Coupling element M_λ(q, k) for exciton k and phonon (q, λ).
    pub fn coupling(
        &self,
        q: [f64; 2],
        k: [f64; 2],
        branch: usize,
        kappa: f64,
        epsilon: f64,
        gamma: f64,
    ) -> Result<CouplingElement> {
        if !(gamma > 0.0) {
            return Err(Error::domain("gamma must be positive"));
        }
        let modes = self.phonons(q)?;
        let mode = modes
            .get(branch.wrapping_sub(1))
            .ok_or_else(|| Error::domain(format!("branch {branch} does not exist in {:?}", self.dim)))?;
        let kq = [k[0] + q[0], k[1] + q[1]];
        let g_q = self.g_projected(q, mode.polarization);
        if q == [0.0, 0.0] || mode.f == 0.0 {
            return Ok(CouplingElement { q, k, branch, g_q: 0.0, m_im: 0.0 });
        }
        let bracket =
            epsilon * g_q + kappa * (self.g_projected(kq, mode.polarization) - self.g_projected(k, mode.polarization));
        let m_im = gamma.powf(-0.25) * bracket / mode.f.sqrt();
        Ok(CouplingElement { q, k, branch, g_q, m_im })
    }
}

/// Eigen-decomposition of a symmetric 2×2 matrix; ascending values,
/// vectors signed so the largest component is positive.
fn eig2(m: [[f64; 2]; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let (a, b, d) = (m[0][0], m[0][1], m[1][1]);
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let vals = [mean - rad, mean + rad];
    let mut vecs = [[0.0; 2]; 2];
    for (i, &l) in vals.iter().enumerate() {
        let v = if b.abs() > 1e-14 * (a.abs() + d.abs() + 1e-300) {
            [b, l - a]
        } else if (i == 0) == (a <= d) {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        };
        let n = v[0].hypot(v[1]);
        let mut v = [v[0] / n, v[1] / n];
        let big = if v[0].abs() >= v[1].abs() { v[0] } else { v[1] };
        if big < 0.0 {
            v = [-v[0], -v[1]];
        }
        vecs[i] = v;
    }
    (vals, vecs)
}

#[derive(Debug, Clone, Serialize)]
pub struct PhononMode {
    pub q: [f64; 2],
    /// 1-based, ascending in frequency.
    pub branch: usize,
    /// ħω = U_dd f/√γ.
    pub f: f64,
    pub polarization: Option<[f64; 2]>,
}

/// Exciton-phonon coupling. The element is purely imaginary:
/// M = i · m_im · U_dd / √N, with γ^{-1/4} already included in `m_im`.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingElement {
    pub q: [f64; 2],
    pub k: [f64; 2],
    pub branch: usize,
    pub g_q: f64,
    pub m_im: f64,
}

impl CouplingElement {
    /// |M|² for a crystal of `n` sites.
    pub fn norm_sqr(&self, n: usize) -> f64 {
        self.m_im * self.m_im / n as f64
    }
}

/// Squared transverse frequencies (ω⊥)² in units (U_dd/ħ)² for the y and z
/// branches; negative values signal the zig-zag instability.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TransverseModes {
    pub q: f64,
    pub omega2_y: f64,
    pub omega2_z: f64,
}

impl TransverseModes {
    pub fn omega_y(&self) -> Option<f64> {
        (self.omega2_y >= 0.0).then(|| self.omega2_y.sqrt())
    }

    pub fn omega_z(&self) -> Option<f64> {
        (self.omega2_z >= 0.0).then(|| self.omega2_z.sqrt())
    }

    pub fn stable(&self) -> bool {
        self.omega2_y >= 0.0 && self.omega2_z >= 0.0
    }
}

/// ω⊥²_{y,z}(q) = ν⊥² − α f²(q)/(4γ), α_y = 1, α_z = 3, with ν⊥ = ħν⊥/U_dd.
pub fn transverse_spectrum_hom(q: f64, nu_perp: f64, gamma: f64) -> Result<TransverseModes> {
    if !(nu_perp >= 0.0 && gamma > 0.0) {
        return Err(Error::domain("need nu_perp >= 0 and gamma > 0"));
    }
    let f2 = f2_1d(q);
    let base = nu_perp * nu_perp;
    Ok(TransverseModes { q, omega2_y: base - f2 / (4.0 * gamma), omega2_z: base - 3.0 * f2 / (4.0 * gamma) })
}

/// Largest 2D phonon frequency over an n×n grid of the primitive cell.
pub fn max_phonon_f(crystal: &Crystal, n: usize) -> Result<f64> {
    let grid = bz_grid(crystal.dim, n);
    let vals = crate::par::map_slice(&grid, |q| crystal.phonons(*q).map(|m| m.iter().map(|x| x.f).fold(0.0, f64::max)));
    let mut best = 0.0f64;
    for v in vals {
        best = best.max(v?);
    }
    Ok(best)
}

/// Band width max J − min J over a grid (plus the symmetry points in 2D).
pub fn band_width(crystal: &Crystal, n: usize) -> f64 {
    let mut grid = bz_grid(crystal.dim, n);
    if crystal.dim == Dim::Two {
        grid.extend(symmetry_points().iter().map(|p| p.1));
    } else {
        grid.push([PI, 0.0]);
    }
    let js = crate::par::map_slice(&grid, |k| crystal.j(*k));
    let max = js.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = js.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// Points along Γ → K → M → Γ with their cumulative path length.
pub fn bz_path(points_per_segment: usize) -> Vec<(f64, [f64; 2])> {
    let sp = symmetry_points();
    let corners = [sp[0].1, sp[1].1, sp[2].1, sp[0].1];
    let mut out = Vec::new();
    let mut s = 0.0;
    for w in corners.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        for i in 0..points_per_segment {
            let t = i as f64 / points_per_segment as f64;
            out.push((s + t * len, [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]));
        }
        s += len;
    }
    out.push((s, corners[3]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_d_constants() {
        assert_relative_eq!(j_1d(0.0), 2.0 * zeta3(), epsilon = 1e-14);
        assert_relative_eq!(j_1d(PI), -1.5 * zeta3(), epsilon = 1e-12);
        assert!((f_1d(PI) - 6.9439).abs() < 1e-3);
        assert_relative_eq!(f_1d(PI), (93.0 * zeta5() / 2.0).sqrt(), epsilon = 1e-12);
        let q = 1e-4;
        assert!((f_1d(q) / q - (12.0 * zeta3()).sqrt()).abs() < 1e-3);
        assert_relative_eq!(j_1d(0.0) - j_1d(PI), 3.5 * zeta3(), epsilon = 1e-12);
    }

    #[test]
    fn one_d_matches_real_space_sums() {
        let chain = Lattice::chain(100_000);
        for &q in &[0.3, 1.234, 2.9, -0.8] {
            let direct_j: f64 = (1..=100_000).map(|j| 2.0 * (q * j as f64).cos() / (j as f64).powi(3)).sum();
            assert!((j_1d(q) - direct_j).abs() < 1e-8);
            let d = chain.dynamical_matrix([q, 0.0]);
            assert_relative_eq!(d[0][0], f2_1d(q), epsilon = 1e-10);
            let g = chain.g_vector([q, 0.0]);
            assert_relative_eq!(g[0], g_1d(q), epsilon = 1e-10);
        }
    }

    #[test]
    fn derivatives() {
        let h = 1e-6;
        for &q in &[0.2, 1.0, 2.5] {
            assert_relative_eq!((j_1d(q + h) - j_1d(q - h)) / (2.0 * h), j_1d_prime(q), epsilon = 1e-6);
            assert_relative_eq!((f_1d(q + h) - f_1d(q - h)) / (2.0 * h), f_1d_prime(q), epsilon = 1e-6);
        }
    }

    #[test]
    fn two_d_j0() {
        let c = Crystal::two_d(60.0);
        let j0 = c.j0();
        assert!((j0 - 11.034).abs() < 0.01, "{j0}");
        let c2 = Crystal::two_d(90.0);
        assert!((c2.j0() - j0).abs() < 1e-4);
    }

    #[test]
    fn two_d_phonons() {
        let c = Crystal::two_d(40.0);
        let sp = symmetry_points();
        let m = c.phonons(sp[2].1).unwrap();
        assert!((m[1].f - 8.22).abs() < 0.02, "{}", m[1].f);
        let k = c.phonons(sp[1].1).unwrap();
        assert!((k[0].f - k[1].f).abs() < 1e-6);
        let p = m[0].polarization.unwrap();
        let r = m[1].polarization.unwrap();
        assert!((p[0] * r[0] + p[1] * r[1]).abs() < 1e-12);
    }

    #[test]
    fn coupling_limits() {
        let c = Crystal::one_d();
        let z = c.coupling([0.0, 0.0], [0.7, 0.0], 1, 2.0, 0.5, 10.0).unwrap();
        assert_eq!(z.m_im, 0.0);
        let magic = c.coupling([0.9, 0.0], [0.0, 0.0], 1, 1.5, -1.5, 10.0).unwrap();
        assert!(magic.m_im.abs() < 1e-14);
        // √q scaling at small q.
        let a = c.coupling([1e-4, 0.0], [0.0, 0.0], 1, 1.0, 0.3, 10.0).unwrap().m_im;
        let b = c.coupling([4e-4, 0.0], [0.0, 0.0], 1, 1.0, 0.3, 10.0).unwrap().m_im;
        assert!((b / a - 2.0).abs() < 0.01);
    }

    #[test]
    fn folding() {
        let (k, moved) = fold_to_bz(Dim::One, [PI + 0.5, 0.0]);
        assert!(moved && (k[0] + PI - 0.5).abs() < 1e-12);
        let (b1, _) = reciprocal_vectors();
        let (k, moved) = fold_to_bz(Dim::Two, [b1[0] + 0.1, b1[1]]);
        assert!(moved && (k[0] - 0.1).abs() < 1e-12 && k[1].abs() < 1e-12);
    }

    #[test]
    fn transverse() {
        let t = transverse_spectrum_hom(0.0, 2.0, 10.0).unwrap();
        assert_eq!(t.omega_y(), Some(2.0));
        let crit = zigzag_constant();
        assert!((crit - 6.01).abs() < 0.01);
        let g: f64 = 9.0;
        let stable = transverse_spectrum_hom(PI, 1.001 * crit / g.sqrt(), g).unwrap();
        let unstable = transverse_spectrum_hom(PI, 0.999 * crit / g.sqrt(), g).unwrap();
        assert!(stable.stable() && !unstable.stable());
    }
}

//! Riemann zeta values, polylogarithms on the unit circle, oscillator mode
//! functions and a Gauss-Legendre rule.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, Result};

/// Riemann zeta at an integer argument `n >= 2`.
///
/// Uses the Cohen-Villegas-Zagier acceleration of the alternating eta series,
/// which gives full double precision with 40 terms.
pub fn zeta(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::UnsupportedOrder(n));
    }
    Ok(zeta_unchecked(n))
}

fn zeta_unchecked(n: u32) -> f64 {
    const TERMS: usize = 40;
    let s = n as f64;
    // d_k = n Σ_{i≤k} (n+i-1)! 4^i / ((n-i)! (2i)!), built term by term.
    let nn = TERMS as f64;
    let mut term = 1.0;
    let mut d = Vec::with_capacity(TERMS + 1);
    let mut acc = term;
    d.push(acc);
    for i in 0..TERMS {
        let fi = i as f64;
        term *= 4.0 * (nn + fi) * (nn - fi) / ((2.0 * fi + 1.0) * (2.0 * fi + 2.0));
        acc += term;
        d.push(acc);
    }
    let dn = d[TERMS];
    let mut eta = 0.0;
    for k in (0..TERMS).rev() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        eta += sign * (dn - d[k]) / ((k + 1) as f64).powf(s);
    }
    eta /= dn;
    eta / (1.0 - 2f64.powf(1.0 - s))
}

/// ζ(3).
pub fn zeta3() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| zeta_unchecked(3))
}

/// ζ(5).
pub fn zeta5() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| zeta_unchecked(5))
}

/// Γ(x) for positive real x.
pub fn gamma_fn(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Λ = 5Γ(5/6)/(Γ(1/3)√π), the length constant of a harmonically trapped
/// dipolar chain: L = Λ N a0.
pub fn lambda_trap() -> f64 {
    5.0 * gamma_fn(5.0 / 6.0) / (gamma_fn(1.0 / 3.0) * PI.sqrt())
}

/// Li_n(e^{iq}) for real q, split into real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolylogValue {
    pub n: u32,
    pub q: f64,
    pub re: f64,
    pub im: f64,
}

const SERIES_TERMS: usize = 60;

/// ζ(1-2j)/... coefficients are built from ζ(2j); cache them.
fn even_zetas() -> &'static [f64] {
    static V: OnceLock<Vec<f64>> = OnceLock::new();
    V.get_or_init(|| (1..=SERIES_TERMS).map(|j| zeta_unchecked(2 * j as u32)).collect())
}

/// Reduces q to [-π, π].
pub fn fold_phase(q: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let r = q - two_pi * (q / two_pi).round();
    if r > PI {
        r - two_pi
    } else if r < -PI {
        r + two_pi
    } else {
        r
    }
}

/// Li_n(e^{iq}) - ζ(n) for n >= 2.
///
/// Expansion around q = 0, convergent for |q| < 2π:
/// Σ_{k≥1, k≠n-1} ζ(n-k)(iq)^k/k! + (iq)^{n-1}/(n-1)! [H_{n-1} - ln(-iq)].
/// Dropping the k = 0 term avoids cancellation in 2ζ(n) - 2 Re Li_n.
pub fn polylog_circle_minus_zeta(n: u32, q: f64) -> Result<Complex64> {
    if n < 2 {
        return Err(Error::UnsupportedOrder(n));
    }
    let q = fold_phase(q);
    if q == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n = n as usize;
    let iq = Complex64::new(0.0, q);
    let mut sum = Complex64::new(0.0, 0.0);

    // k = 1 ..= n-2: positive-argument zeta values.
    let mut pow = Complex64::new(1.0, 0.0); // (iq)^k / k!
    for k in 1..=n.saturating_sub(2) {
        pow = pow * iq / k as f64;
        sum += pow * zeta_unchecked((n - k) as u32);
    }
    // k = n-1: logarithmic term.
    let mut pow_log = Complex64::new(1.0, 0.0);
    for k in 1..n {
        pow_log = pow_log * iq / k as f64;
    }
    let harmonic: f64 = (1..n).map(|i| 1.0 / i as f64).sum();
    let log_miq = Complex64::new(q.abs().ln(), -0.5 * PI * q.signum());
    sum += pow_log * (Complex64::new(harmonic, 0.0) - log_miq);
    // k = n: ζ(0) = -1/2.
    let pow_n = pow_log * iq / n as f64;
    sum += pow_n * -0.5;
    // k = n-1+2j, j >= 1: ζ(1-2j) = (-1)^j 2 (2j-1)! ζ(2j) / (2π)^{2j}.
    let zetas = even_zetas();
    let x = q / (2.0 * PI);
    let mut x2j = 1.0;
    for j in 1..=SERIES_TERMS {
        x2j *= x * x;
        // (iq)^{n-1+2j}/(n-1+2j)! × ζ(1-2j)
        //   = (iq)^{n-1} (-1)^j q^{2j} × (-1)^j 2 (2j-1)! ζ(2j) / ((2π)^{2j} (n-1+2j)!)
        //   = (iq)^{n-1} × 2 x^{2j} ζ(2j) / Π_{i=2j}^{2j+n-1} i
        let mut denom = 1.0;
        for i in 2 * j..2 * j + n {
            denom *= i as f64;
        }
        // pow_log carries 1/(n-1)!, undo it.
        let fact_nm1: f64 = (1..n).map(|i| i as f64).product();
        let term = pow_log * fact_nm1 * (2.0 * x2j * zetas[j - 1] / denom);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    Ok(sum)
}

/// Li_n(e^{iq}) for n >= 2 and real q (folded into [-π, π]).
pub fn polylog_circle(n: u32, q: f64) -> Result<PolylogValue> {
    let d = polylog_circle_minus_zeta(n, q)?;
    Ok(PolylogValue { n, q: fold_phase(q), re: zeta_unchecked(n) + d.re, im: d.im })
}

/// Hermite function of index `n - 1` evaluated at `x/sigma`, scaled so that
/// ∫ Φ_n(x)² dx = 1. Same shape as H_{n-1}(x/σ) e^{-x²/2σ²}; the stable
/// three-term recurrence on normalized iterates avoids overflow for large n.
pub fn oscillator_mode(n: usize, x: f64, sigma: f64) -> f64 {
    assert!(n >= 1, "mode index starts at 1");
    assert!(sigma > 0.0, "sigma must be positive");
    let y = x / sigma;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * y * y).exp();
    if cur == 0.0 {
        // Far tail where the Gaussian underflows; the polynomial factor
        // cannot rescue it for the indices in use.
        return 0.0;
    }
    for k in 0..n - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * y * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur / sigma.sqrt()
}

/// Samples `oscillator_mode` on `xs`, normalized so that Σ Φ² = 1.
pub fn oscillator_mode_on_grid(n: usize, xs: &[f64], sigma: f64) -> Vec<f64> {
    let mut v: Vec<f64> = xs.iter().map(|&x| oscillator_mode(n, x, sigma)).collect();
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|a| *a /= norm);
    }
    v
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                let jf = j as f64;
                p0 = ((2.0 * jf + 1.0) * z * p1 - jf * p2) / (jf + 1.0);
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule on [a, b] split into `panels` equal pieces,
/// returned as (abscissae, weights).
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * order);
    let mut ws = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for k in 0..order {
            xs.push(lo + 0.5 * h * (x[k] + 1.0));
            ws.push(0.5 * h * w[k]);
        }
    }
    (xs, ws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fourier(n: u32, q: f64, jmax: usize) -> Complex64 {
        (1..=jmax).map(|j| Complex64::from_polar(1.0 / (j as f64).powi(n as i32), q * j as f64)).sum()
    }

    #[test]
    fn zeta_values() {
        assert_relative_eq!(zeta3(), 1.202_056_903_159_594_3, epsilon = 1e-14);
        assert_relative_eq!(zeta5(), 1.036_927_755_143_37, epsilon = 1e-14);
        assert_relative_eq!(zeta(2).unwrap(), PI * PI / 6.0, epsilon = 1e-14);
        assert_relative_eq!(zeta(4).unwrap(), PI.powi(4) / 90.0, epsilon = 1e-14);
        assert!(zeta(1).is_err());
    }

    #[test]
    fn zeta_against_euler_maclaurin() {
        for n in [3u32, 5] {
            let s = n as f64;
            let j = 1000usize;
            let head: f64 = (1..j).map(|k| (k as f64).powf(-s)).sum();
            let jf = j as f64;
            let tail = jf.powf(1.0 - s) / (s - 1.0) + 0.5 * jf.powf(-s) + s / 12.0 * jf.powf(-s - 1.0)
                - s * (s + 1.0) * (s + 2.0) / 720.0 * jf.powf(-s - 3.0);
            assert_relative_eq!(zeta(n).unwrap(), head + tail, epsilon = 1e-13);
        }
    }

    #[test]
    fn polylog_special_points() {
        let v = polylog_circle(3, 0.0).unwrap();
        assert_eq!((v.re, v.im), (zeta3(), 0.0));
        let v = polylog_circle(3, PI).unwrap();
        assert_relative_eq!(v.re, -0.75 * zeta3(), epsilon = 1e-13);
        assert!(v.im.abs() < 1e-13);
        // Li_2(e^{iq}) real part is the Clausen-type quadratic π²/6 - q(2π-q)/4.
        for q in [0.3, 1.0, 2.5] {
            let v = polylog_circle(2, q).unwrap();
            assert_relative_eq!(v.re, PI * PI / 6.0 - q * (2.0 * PI - q) / 4.0, epsilon = 1e-13);
        }
        // Li_4 real part is a Bernoulli polynomial.
        for q in [0.2, 1.7, 3.0] {
            let v = polylog_circle(4, q).unwrap();
            let b4 = |x: f64| x.powi(4) - 2.0 * x.powi(3) + x * x - 1.0 / 30.0;
            let expect = -(2.0 * PI).powi(4) / 48.0 * b4(q / (2.0 * PI));
            assert_relative_eq!(v.re, expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn polylog_matches_fourier_series() {
        for n in [3u32, 4, 5] {
            for &q in &[-3.1, -1.0, 0.05, 0.7, 2.2, PI] {
                let a = polylog_circle(n, q).unwrap();
                let b = fourier(n, q, 200_000);
                let tail = (200_000f64).powi(1 - n as i32) / (n as f64 - 1.0);
                assert!((a.re - b.re).abs() < tail + 1e-12, "n={n} q={q}");
                assert!((a.im - b.im).abs() < tail + 1e-12, "n={n} q={q}");
            }
        }
    }

    #[test]
    fn polylog_parity_and_folding() {
        for &q in &[0.1, 1.3, 2.9] {
            let a = polylog_circle(5, q).unwrap();
            let b = polylog_circle(5, -q).unwrap();
            assert_relative_eq!(a.re, b.re, epsilon = 1e-14);
            assert_relative_eq!(a.im, -b.im, epsilon = 1e-14);
            let c = polylog_circle(5, q + 2.0 * PI).unwrap();
            assert_relative_eq!(a.re, c.re, epsilon = 1e-12);
        }
    }

    #[test]
    fn derivative_ladder() {
        // d/dq Re Li_4(e^{iq}) = -Im Li_3(e^{iq})
        let h = 1e-5;
        for &q in &[0.4, 1.1, 2.6] {
            let d = (polylog_circle(4, q + h).unwrap().re - polylog_circle(4, q - h).unwrap().re) / (2.0 * h);
            assert_relative_eq!(d, -polylog_circle(3, q).unwrap().im, epsilon = 1e-8);
        }
    }

    #[test]
    fn lambda_value() {
        assert!((lambda_trap() - 1.19).abs() < 0.005);
    }

    #[test]
    fn oscillator_modes() {
        let sigma = 1.3;
        assert!(oscillator_mode(1, 0.0, sigma) > oscillator_mode(1, 0.2, sigma));
        assert!(oscillator_mode(2, 0.0, sigma).abs() < 1e-15);
        let (xs, ws) = composite_rule(-20.0, 20.0, 80, 20);
        for m in 1..6 {
            for n in 1..6 {
                let s: f64 = xs
                    .iter()
                    .zip(&ws)
                    .map(|(&x, &w)| w * oscillator_mode(m, x, sigma) * oscillator_mode(n, x, sigma))
                    .sum();
                let expect = if m == n { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-8, "m={m} n={n} s={s}");
            }
        }
        // Large index stays finite.
        assert!(oscillator_mode(900, 3.0, 10.0).is_finite());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert_relative_eq!(s, 2.0 / 19.0, epsilon = 1e-14);
    }
}

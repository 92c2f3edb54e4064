//! Student-t and studentized-range distributions.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, LN_2};
use std::sync::{LazyLock, Mutex};

use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use super::StatsError;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Student-t CDF with `df` degrees of freedom, via the regularized incomplete beta function.
pub fn t_cdf(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = 0.5 * beta_reg(df / 2.0, 0.5, df / (df + t * t));
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Upper tail `P(T > t)`, computed without cancellation for large `t`.
pub fn t_sf(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    if t.is_infinite() {
        return if t > 0.0 { 0.0 } else { 1.0 };
    }
    let tail = 0.5 * beta_reg(df / 2.0, 0.5, df / (df + t * t));
    if t > 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

const GL_NODES: usize = 64;

/// 64-point Gauss–Legendre nodes and weights on [−1, 1].
static GAUSS_LEGENDRE: LazyLock<(Vec<f64>, Vec<f64>)> = LazyLock::new(|| gauss_legendre(GL_NODES));

pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(z) and its derivative
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite 64-point Gauss–Legendre over `[a, b]` split into `panels`.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = &*GAUSS_LEGENDRE;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + h / 2.0;
        let half = h / 2.0;
        total += x
            .iter()
            .zip(w)
            .map(|(xi, wi)| wi * f(mid + half * xi))
            .sum::<f64>()
            * half;
    }
    total
}

/// CDF of the range of `k` independent standard normals.
fn normal_range_cdf(w: f64, k: usize) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let km1 = (k - 1) as i32;
    let v = integrate(
        |z| {
            let d = normal_cdf(z) - normal_cdf(z - w);
            normal_pdf(z) * d.max(0.0).powi(km1)
        },
        -9.0,
        9.0 + w,
        6,
    );
    (k as f64 * v).min(1.0)
}

/// CDF of the studentized range `q` for `k` groups and `df` error degrees of freedom.
///
/// Outer integral over `s = χ_ν/√ν`, whose density is
/// `ν^{ν/2} s^{ν−1} e^{−νs²/2} / (Γ(ν/2) 2^{ν/2−1})`; inner integral over the
/// normal range distribution.
pub fn studentized_range_cdf(q: f64, k: usize, df: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    let nu = df;
    let ln_c = 0.5 * nu * nu.ln() - ln_gamma(nu / 2.0) - (nu / 2.0 - 1.0) * LN_2;
    let spread = 12.0 * (2.0 * nu).sqrt();
    let lo = ((nu - spread).max(0.0) / nu).sqrt();
    let hi = ((nu + spread + 60.0) / nu).sqrt();
    integrate(
        |s| {
            if s <= 0.0 {
                return 0.0;
            }
            let ln_f = ln_c + (nu - 1.0) * s.ln() - nu * s * s / 2.0;
            ln_f.exp() * normal_range_cdf(q * s, k)
        },
        lo,
        hi,
        16,
    )
    .min(1.0)
}

type QuantileKey = (u64, usize, u64);
static QUANTILE_CACHE: LazyLock<Mutex<HashMap<QuantileKey, f64>>> = LazyLock::new(Default::default);

/// Upper `alpha` critical value of the studentized range, found by bisection
/// on `[0, 100]` until the CDF is within 1e−6 of `1 − alpha`.
pub fn studentized_range_quantile(alpha: f64, k: usize, df: u64) -> Result<f64, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::Invalid(format!("alpha {alpha} outside (0, 1)")));
    }
    if k < 2 || df < 1 {
        return Err(StatsError::Invalid(format!(
            "need k ≥ 2 and df ≥ 1, got k={k}, df={df}"
        )));
    }
    let key = (alpha.to_bits(), k, df);
    if let Some(&q) = QUANTILE_CACHE.lock().expect("cache lock").get(&key) {
        return Ok(q);
    }
    let target = 1.0 - alpha;
    let cdf = |q: f64| studentized_range_cdf(q, k, df as f64);
    let (mut lo, mut hi) = (0.0, 100.0);
    if cdf(hi) < target {
        return Err(StatsError::NoConvergence(format!(
            "q_crit(alpha={alpha}, k={k}, df={df}) exceeds 100"
        )));
    }
    let mut q = 0.5 * (lo + hi);
    for _ in 0..200 {
        q = 0.5 * (lo + hi);
        let f = cdf(q);
        if (f - target).abs() < 1e-6 {
            break;
        }
        if f < target {
            lo = q;
        } else {
            hi = q;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    QUANTILE_CACHE.lock().expect("cache lock").insert(key, q);
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(64);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.4).abs() < 1e-13);
    }

    #[test]
    fn t_cdf_closed_forms() {
        assert_eq!(t_cdf(0.0, 7.0), 0.5);
        for t in [-3.0, -0.5, 0.3, 1.0, 10.0] {
            let cauchy = 0.5 + f64::atan(t) / std::f64::consts::PI;
            assert!((t_cdf(t, 1.0) - cauchy).abs() < 1e-8, "{t}");
            assert!((t_cdf(t, 5.0) + t_sf(t, 5.0) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn range_of_two_normals() {
        // range of 2 iid N(0,1) is |N(0, 2)|
        let w = 1.3;
        let exact = 2.0 * normal_cdf(w / 2f64.sqrt()) - 1.0;
        assert!((normal_range_cdf(w, 2) - exact).abs() < 1e-10);
    }

    #[test]
    fn quantile_reference_values() {
        let q = studentized_range_quantile(0.05, 2, 1_000_000).unwrap();
        assert!((q - 2.772).abs() < 0.01, "{q}");
        let q = studentized_range_quantile(0.05, 3, 12).unwrap();
        assert!((q - 3.773).abs() < 0.02, "{q}");
        let q4 = studentized_range_quantile(0.05, 4, 12).unwrap();
        assert!(q4 > q);
        assert!(studentized_range_quantile(1.5, 3, 12).is_err());
        assert!(studentized_range_quantile(0.05, 1, 12).is_err());
    }
}

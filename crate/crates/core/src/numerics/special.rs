//! sinc, Bessel functions of the first kind of real order, binomials.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const BESSEL_MAX_ORDER: f64 = 50.0;
pub const BESSEL_MAX_ARG: f64 = 1e4;

/// Normalised sinc, `sin(πx)/(πx)` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    let px = PI * x;
    if x.abs() < 1e-4 {
        let p2 = px * px;
        1.0 - p2 / 6.0 + p2 * p2 / 120.0
    } else {
        px.sin() / px
    }
}

fn check_bessel_range(order: f64, x: f64) -> Result<()> {
    let order_ok = order.is_finite() && (0.0..=BESSEL_MAX_ORDER).contains(&order);
    let x_ok = x.is_finite() && x > 0.0 && x <= BESSEL_MAX_ARG;
    if order_ok && x_ok {
        Ok(())
    } else {
        Err(Error::BesselRange { order, x })
    }
}

/// Bessel function of the first kind `J_order(x)` for `0 <= order <= 50`,
/// `0 < x <= 1e4`.
///
/// Three regimes: the ascending series while its terms decrease from the
/// start (`x² <= 4(order+1)` or `x <= 4`), Hankel's large-argument expansion
/// once `x > 20 + order²/2`, and Miller's backward recurrence normalised by
/// the Neumann series `(x/2)^ν₀ = Σ (ν₀+2k) Γ(ν₀+k)/k! · J_{ν₀+2k}(x)` in
/// between.
pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    check_bessel_range(order, x)?;
    Ok(if use_series(order, x) {
        bessel_series(order, x)
    } else if x > hankel_threshold(order) {
        bessel_hankel(order, x)
    } else {
        bessel_miller(order, x)
    })
}

/// `J_order(x) / x^order`, finite at `x = 0` where it equals
/// `1 / (2^order Γ(order+1))`.
pub fn bessel_j_scaled(order: f64, x: f64) -> Result<f64> {
    if x == 0.0 && (0.0..=BESSEL_MAX_ORDER).contains(&order) {
        return Ok((-(order * 2f64.ln()) - ln_gamma(order + 1.0)).exp());
    }
    check_bessel_range(order, x)?;
    if use_series(order, x) {
        Ok(series_sum(order, x, (-(order * 2f64.ln()) - ln_gamma(order + 1.0)).exp()))
    } else {
        Ok(bessel_j(order, x)? / x.powf(order))
    }
}

fn use_series(order: f64, x: f64) -> bool {
    x <= 4.0 || x * x <= 4.0 * (order + 1.0)
}

fn hankel_threshold(order: f64) -> f64 {
    20.0 + 0.5 * order * order
}

fn bessel_series(order: f64, x: f64) -> f64 {
    let lead = (order * (0.5 * x).ln() - ln_gamma(order + 1.0)).exp();
    series_sum(order, x, lead)
}

/// Σ_k (-1)^k (x/2)^{2k} / (k! (ν+1)_k), scaled by `lead`.
fn series_sum(order: f64, x: f64, lead: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (kf + order));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Hankel's expansion alone; valid for `x > 20 + order²/2` without an upper
/// limit on `x`.
pub(crate) fn bessel_hankel(order: f64, x: f64) -> f64 {
    let mu = 4.0 * order * order;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev_abs = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        let abs = term.abs();
        if abs > prev_abs {
            // asymptotic series: stop at the smallest term
            break;
        }
        prev_abs = abs;
        // a_k/x^k alternates between Q (k odd) and P (k even) with sign (-1)^floor(k/2)
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if abs < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * order + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn bessel_miller(order: f64, x: f64) -> f64 {
    let n = order.floor() as usize;
    let nu0 = order - n as f64;
    let top = (n as f64).max(x);
    let start = (top + 30.0 + (60.0 * top).sqrt()).ceil() as usize;

    // f_{start+1} = 0, f_start = tiny; recurse downwards
    const RESCALE: f64 = 1e250;
    let mut f_next = 0.0;
    let mut f_cur = 1e-30;
    let mut at_n = 0.0;
    let mut norm = 0.0;
    // weight(k/2) = (ν₀+k) Γ(ν₀+k/2) / (k/2)! for even k > 0; Γ(ν₀+1) for k = 0.
    // Γ(ν₀+j)/j! is built upwards, so precompute it for every even index.
    let half = start / 2 + 1;
    let mut ratio = vec![0.0; half + 1];
    if half >= 1 {
        ratio[1] = statrs::function::gamma::gamma(nu0 + 1.0);
        for j in 2..=half {
            ratio[j] = ratio[j - 1] * (nu0 + j as f64 - 1.0) / j as f64;
        }
    }
    let weight = |k: usize| -> f64 {
        if k == 0 {
            statrs::function::gamma::gamma(nu0 + 1.0)
        } else {
            (nu0 + k as f64) * ratio[k / 2]
        }
    };
    for k in (0..=start).rev() {
        if k == n {
            at_n = f_cur;
        }
        if k % 2 == 0 {
            norm += weight(k) * f_cur;
        }
        if k == 0 {
            break;
        }
        let f_prev = 2.0 * (nu0 + k as f64) / x * f_cur - f_next;
        f_next = f_cur;
        f_cur = f_prev;
        if f_cur.abs() > RESCALE {
            f_cur /= RESCALE;
            f_next /= RESCALE;
            norm /= RESCALE;
            at_n /= RESCALE;
        }
    }
    (0.5 * x).powf(nu0) * at_n / norm
}

/// Exact binomial coefficient `C(m, j)` for `m <= 60`; zero when `j > m`.
pub fn binomial(m: u32, j: u32) -> u64 {
    if j > m {
        return 0;
    }
    let j = j.min(m - j) as u128;
    let mut acc: u128 = 1;
    for i in 0..j {
        acc = acc * (m as u128 - i) / (i + 1);
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_order(x: f64) -> f64 {
        (2.0 / (PI * x)).sqrt() * x.sin()
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(1.0).abs() < 1e-15);
        assert!((sinc(0.5) - 2.0 / PI).abs() < 1e-15);
        // continuity across the series switch
        let a = sinc(0.99999e-4);
        let b = sinc(1.00001e-4);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn bessel_half_order_closed_form() {
        assert!(bessel_j(0.5, PI).unwrap().abs() < 1e-14);
        assert!((bessel_j(0.5, PI / 2.0).unwrap() - 2.0 / PI).abs() < 1e-14);
        assert!((bessel_j(0.0, 1e-8).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bessel_reference_values() {
        // reference values from an independent implementation (cephes via scipy.special.jv)
        let cases: [(f64, f64, f64); 16] = [
            (0.0, 1.0, 0.7651976865579666),
            (0.0, 4.0, -0.39714980986384746),
            (0.0, 17.5, -0.10311039822868585),
            (1.0, 2.5, 0.4970941024642741),
            (0.5, 0.3, 0.43049351732812513),
            (1.5, 10.0, 0.19798249275589247),
            (2.5, 0.75, 0.02488708105066452),
            (3.7, 25.0, 0.15791392961164694),
            (10.0, 5.0, 0.0014678026473104737),
            (10.0, 30.0, -0.1298768939985887),
            (25.3, 40.0, 0.011696959792352163),
            (50.0, 60.0, -0.1379827314853523),
            (50.0, 2000.0, 0.0038217563362749046),
            (0.25, 9000.0, 0.002245467988211408),
            (7.5, 123.4, -0.03229875477199764),
            (1.5, 0.01, 0.0002659588606619181),
        ];
        for (order, x, expected) in cases {
            let got = bessel_j(order, x).unwrap();
            let rel = (got - expected).abs() / expected.abs();
            assert!(rel < 1e-10, "J_{order}({x}) = {got}, expected {expected}, rel {rel:e}");
        }
    }

    #[test]
    fn bessel_regimes_agree_at_switchovers() {
        // three-term recurrence ties neighbouring orders together in every regime
        for &x in &[3.9, 4.1, 7.0, 19.0, 21.5, 33.0, 150.0] {
            for &order in &[0.3, 1.5, 2.5, 4.0] {
                let lhs = bessel_j(order, x).unwrap() + bessel_j(order + 2.0, x).unwrap();
                let rhs = 2.0 * (order + 1.0) / x * bessel_j(order + 1.0, x).unwrap();
                assert!((lhs - rhs).abs() < 1e-11, "x={x} order={order}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn bessel_range_errors() {
        assert!(matches!(bessel_j(51.0, 1.0), Err(Error::BesselRange { .. })));
        assert!(matches!(bessel_j(1.0, 2e4), Err(Error::BesselRange { .. })));
        assert!(matches!(bessel_j(-0.5, 1.0), Err(Error::BesselRange { .. })));
        assert!(matches!(bessel_j(1.0, 0.0), Err(Error::BesselRange { .. })));
    }

    #[test]
    fn scaled_bessel_limit_at_origin() {
        // J_ν(x)/x^ν → 1/(2^ν Γ(ν+1)); ν = 1.5: 1/(2^1.5 · 3√π/4)
        let expected = 1.0 / (2f64.powf(1.5) * 0.75 * PI.sqrt());
        assert!((bessel_j_scaled(1.5, 0.0).unwrap() - expected).abs() < 1e-15);
        let near = bessel_j_scaled(1.5, 1e-6).unwrap();
        assert!((near - expected).abs() < 1e-12);
        let far = bessel_j_scaled(1.5, 30.0).unwrap();
        assert!((far - bessel_j(1.5, 30.0).unwrap() / 30f64.powf(1.5)).abs() < 1e-16);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(2, 1), 2);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
        // Pascal triangle oracle
        let mut row = vec![1u64];
        for m in 1..=60u32 {
            let mut next = vec![1u64; m as usize + 1];
            for j in 1..m as usize {
                next[j] = row[j - 1] + row[j];
            }
            row = next;
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(binomial(m, j as u32), v);
            }
        }
        assert_eq!(binomial(10, 5), 252);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn sinc_is_even(x in -1e3f64..1e3) {
                prop_assert_eq!(sinc(x), sinc(-x));
            }
        }

        proptest! {
            #[test]
            fn half_order_matches_closed_form(x in 0.1f64..100.0) {
                let got = bessel_j(0.5, x).unwrap();
                let expected = half_order(x);
                // relative accuracy, except right at a zero of sin x
                prop_assert!((got - expected).abs() <= 1e-9 * expected.abs().max(1e-3));
            }
        }
    }
}

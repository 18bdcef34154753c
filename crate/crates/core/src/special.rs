//! Special functions: complex log-Gamma, incomplete Gamma, normal and
//! Kolmogorov distribution tails.

use core::f64::consts::PI;
use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
// Published coefficients, kept verbatim.
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` for `Re z > 0` (Lanczos, g = 7, nine terms).
///
/// The imaginary part is a continuous branch, not necessarily the principal
/// one; only `exp` of differences is meaningful. Arguments with
/// `Re z < 1/2` are shifted up once with `Γ(z) = Γ(z+1)/z`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0, "ln_gamma requires Re z > 0");
    if z.re < 0.5 {
        return ln_gamma(z + 1.0) - z.ln();
    }
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * libm::log(2.0 * PI) + (z + 0.5) * t.ln() - t + series.ln()
}

/// `Γ(z)` for `Re z > 0`.
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `Γ(n + φ) / (Γ(n) Γ(1 + φ))`, the closed form of `Π_{j<n} (1 + φ/j)`.
pub fn gamma_ratio(phi: Complex64, n: u64) -> Complex64 {
    let n = n as f64;
    let nc = Complex64::new(n, 0.0);
    (ln_gamma(nc + phi) - ln_gamma(nc) - ln_gamma(phi + 1.0)).exp()
}

/// Regularized upper incomplete Gamma function `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..10_000 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * libm::exp(-x + a * libm::log(x) - libm::lgamma(a))
}

fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    libm::exp(-x + a * libm::log(x) - libm::lgamma(a)) * h
}

/// Upper tail of a chi-square distribution with `dof` degrees of freedom.
pub fn chi_square_sf(statistic: f64, dof: f64) -> f64 {
    gamma_q(0.5 * dof, 0.5 * statistic)
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// Quantile of the standard normal distribution, by bisection on the tail.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile level must lie in (0, 1)");
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Asymptotic survival function of the one-sample Kolmogorov–Smirnov
/// statistic `D` for sample size `n` (Stephens' small-sample correction).
pub fn kolmogorov_sf(d: f64, n: usize) -> f64 {
    let sn = libm::sqrt(n as f64);
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = libm::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if term < 1e-18 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_values() {
        assert!((gamma(c(5.0, 0.0)).re - 24.0).abs() < 1e-12);
        assert!((gamma(c(0.5, 0.0)).re - libm::sqrt(PI)).abs() < 1e-13);
        assert!((gamma(c(0.1, 0.0)).re - 9.513_507_698_668_732).abs() < 1e-11);
        for x in [0.3, 1.7, 12.5, 171.0] {
            let lg = ln_gamma(c(x, 0.0));
            assert!((lg.re - libm::lgamma(x)).abs() < 1e-10 * libm::lgamma(x).abs().max(1.0));
            assert!(lg.im.abs() < 1e-14);
        }
    }

    #[test]
    fn modulus_on_the_line_one_plus_iy() {
        // |Γ(1+iy)|² = πy / sinh(πy)
        for y in [0.3, 1.0, 2.5] {
            let g = gamma(c(1.0, y));
            let expected = PI * y / libm::sinh(PI * y);
            assert!((g.norm_sqr() - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn recurrence() {
        for z in [c(0.2, 0.9), c(1.5, -0.3), c(3.0, 2.0), c(0.05, 0.0)] {
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
        }
    }

    #[test]
    fn incomplete_gamma() {
        // Q(1, x) = e^{-x}
        for x in [0.1, 1.0, 5.0, 30.0] {
            assert!((gamma_q(1.0, x) - libm::exp(-x)).abs() < 1e-14);
        }
        // chi-square with 2 dof: sf = e^{-x/2}
        assert!((chi_square_sf(4.0, 2.0) - libm::exp(-2.0)).abs() < 1e-14);
        // chi-square 10 dof at 18.307 is the 95% quantile
        assert!((chi_square_sf(18.307_038, 10.0) - 0.05).abs() < 1e-6);
    }

    #[test]
    fn normal_quantiles() {
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-12);
        assert!((normal_quantile(1.0 - 0.5e-3) - 3.290_526_731_491_89).abs() < 1e-9);
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn kolmogorov_tail() {
        // classical asymptotic critical value: λ = 1.3581 at 5%
        let n = 1_000_000;
        let d = 1.358_1 / libm::sqrt(n as f64);
        assert!((kolmogorov_sf(d, n) - 0.05).abs() < 1e-3);
    }
}

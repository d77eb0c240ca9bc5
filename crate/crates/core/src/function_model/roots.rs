//! Float root isolation used by the polynomial and oscillating pieces.

use std::f64::consts::PI;

pub(crate) fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub(crate) fn derivative(coefficients: &[f64]) -> Vec<f64> {
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

fn trimmed(coefficients: &[f64]) -> &[f64] {
    let mut len = coefficients.len();
    while len > 0 && coefficients[len - 1] == 0.0 {
        len -= 1;
    }
    &coefficients[..len]
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Roots of a polynomial strictly inside `(lo, hi)`, sorted.
///
/// Recurses on the derivative: between consecutive critical points the
/// polynomial is monotone, so each such cell holds at most one root.
pub(crate) fn polynomial_roots(coefficients: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trimmed(coefficients);
    match c.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let r = -c[0] / c[1];
            return if r > lo && r < hi {
                vec![r]
            } else {
                Vec::new()
            };
        }
        _ => {}
    }
    let mut knots = vec![lo];
    knots.extend(polynomial_roots(&derivative(c), lo, hi));
    knots.push(hi);

    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (l, r) = (w[0], w[1]);
        let (fl, fr) = (horner(c, l), horner(c, r));
        if fl == 0.0 && l > lo {
            roots.push(l);
        } else if fl != 0.0 && fr != 0.0 && (fl < 0.0) != (fr < 0.0) {
            roots.push(bisect(|x| horner(c, x), l, r));
        }
    }
    roots.dedup();
    roots
}

/// Sign changes of `g` on `[t_lo, t_hi]`, sampled at spacing `PI / 16`
/// and refined by bisection. Pairs of roots closer than the sampling step
/// can be missed.
pub(crate) fn sampled_sign_changes<G: Fn(f64) -> f64>(g: G, t_lo: f64, t_hi: f64) -> Vec<f64> {
    let step = PI / 16.0;
    let n = ((t_hi - t_lo) / step).ceil().max(1.0) as usize;
    let mut roots = Vec::new();
    let mut prev_t = t_lo;
    let mut prev_g = g(t_lo);
    for i in 1..=n {
        let t = if i == n {
            t_hi
        } else {
            t_lo + (t_hi - t_lo) * i as f64 / n as f64
        };
        let gt = g(t);
        if gt == 0.0 && i < n {
            roots.push(t);
        } else if prev_g != 0.0 && gt != 0.0 && (prev_g < 0.0) != (gt < 0.0) {
            roots.push(bisect(&g, prev_t, t));
        }
        prev_t = t;
        prev_g = gt;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_roots() {
        // (x - 0.5)(x + 0.25)(x - 0.9)
        let c = [0.1125, 0.1, -1.15, 1.0];
        let r = polynomial_roots(&c, -1.0, 1.0);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-0.25, 0.5, 0.9]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn double_root_is_reported_once() {
        // 3x^2 touches zero at 0
        let r = polynomial_roots(&[0.0, 0.0, 3.0], -1.0, 1.0);
        assert_eq!(r, vec![0.0]);
    }

    #[test]
    fn sign_changes_of_cosine() {
        let r = sampled_sign_changes(f64::cos, 0.0, 10.0);
        assert_eq!(r.len(), 3);
        assert!((r[0] - PI / 2.0).abs() < 1e-12);
    }
}

//! Bessel functions of the first kind (orders 0 and 1) and the mapping from
//! transform bins to angular frequencies.
//!
//! Both Bessel functions use the ascending power series for |x| below 1,
//! Miller's backward recurrence up to [`ASYMPTOTIC_LIMIT`] and Hankel's
//! asymptotic expansion above it. The recurrence is normalized with
//! J₀ + 2ΣJ₂ₖ = 1 and stays within a few ulp, so finite differences of the
//! results are clean; the asymptotic series is truncated at its smallest term,
//! which is below `1e-20` past the crossover.

use std::f64::consts::PI;

use crate::error::{CrtError, Result};

const SERIES_LIMIT: f64 = 1.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// J₀(x). Errors on non-finite input.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(CrtError::Domain(format!("J0 of non-finite argument {x}")));
    }
    Ok(j0(x))
}

/// J₁(x). Errors on non-finite input.
pub fn bessel_j1(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(CrtError::Domain(format!("J1 of non-finite argument {x}")));
    }
    Ok(j1(x))
}

/// Unchecked J₀ for hot loops over finite arguments.
#[inline]
pub(crate) fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_LIMIT {
        // sum (-1)^k (x^2/4)^k / (k!)^2
        let q = 0.25 * ax * ax;
        let mut term: f64 = 1.0;
        let mut sum: f64 = 1.0;
        let mut k = 1.0;
        while term.abs() > 1e-17 {
            term *= -q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum
    } else if ax < ASYMPTOTIC_LIMIT {
        miller(ax).0
    } else {
        hankel(0.0, ax)
    }
}

/// Unchecked J₁.
#[inline]
pub(crate) fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT {
        // (x/2) sum (-1)^k (x^2/4)^k / (k! (k+1)!)
        let q = 0.25 * ax * ax;
        let mut term: f64 = 1.0;
        let mut sum: f64 = 1.0;
        let mut k = 1.0;
        while term.abs() > 1e-17 {
            term *= -q / (k * (k + 1.0));
            sum += term;
            k += 1.0;
        }
        0.5 * ax * sum
    } else if ax < ASYMPTOTIC_LIMIT {
        miller(ax).1
    } else {
        hankel(1.0, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// (J₀(x), J₁(x)) for x > 0 by downward recurrence from a fixed even start
/// order. A fixed start keeps the result a smooth function of x.
fn miller(x: f64) -> (f64, f64) {
    const START: usize = 80;
    let mut above = 0.0;
    let mut cur = 1e-30;
    let mut norm = 0.0;
    for k in (1..=START).rev() {
        // J_{k-1} = (2k/x) J_k - J_{k+1}
        let below = 2.0 * k as f64 / x * cur - above;
        above = cur;
        cur = below;
        if k > 1 && (k - 1) % 2 == 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            above *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
        }
    }
    let norm = norm + cur;
    (cur / norm, above / norm)
}

/// Hankel's expansion J_ν(x) ≈ √(2/πx)(P cos χ − Q sin χ), χ = x − (ν/2 + 1/4)π,
/// summed until the terms stop decreasing.
fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut k = 1;
    loop {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * eight_x);
        if next.abs() >= term.abs() || next.abs() < 1e-18 {
            break;
        }
        term = next;
        // a_k enters Q for odd k and P for even k with alternating signs
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        k += 1;
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Angular frequencies of the DFT bins of an `n`-point sequence with sample
/// spacing `spacing`, in natural bin order.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyAxis {
    n_samples: usize,
    spacing: f64,
    frequencies: Vec<f64>,
}

impl FrequencyAxis {
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn frequency(&self, bin: usize) -> f64 {
        self.frequencies[bin]
    }

    /// Bin holding the negated frequency (the Nyquist bin maps to itself).
    pub fn mirror_bin(&self, bin: usize) -> usize {
        (self.n_samples - bin) % self.n_samples
    }

    /// Largest representable angular frequency, π / spacing.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing
    }
}

/// Builds the axis with signed bins k̃ ∈ (−n/2, n/2]: frequency 2πk̃/(n·spacing).
pub fn frequency_axis(n: usize, spacing: f64) -> Result<FrequencyAxis> {
    if n < 2 {
        return Err(CrtError::InvalidInput(format!("frequency axis needs n >= 2, got {n}")));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(CrtError::InvalidInput(format!(
            "frequency axis needs positive spacing, got {spacing}"
        )));
    }
    let scale = 2.0 * PI / (n as f64 * spacing);
    let frequencies = (0..n)
        .map(|k| {
            let signed = if 2 * k <= n { k as f64 } else { k as f64 - n as f64 };
            signed * scale
        })
        .collect();
    Ok(FrequencyAxis {
        n_samples: n,
        spacing,
        frequencies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_values() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        assert!((bessel_j0(1.0).unwrap() - 0.765197687).abs() < 1e-9);
        assert!((bessel_j1(1.0).unwrap() - 0.440050586).abs() < 1e-9);
        assert!(bessel_j0(2.404826).unwrap().abs() <= 1e-6);
        let x = 1e-8;
        let ratio = bessel_j1(x).unwrap() / x;
        assert!((ratio - 0.5).abs() <= 1e-6);
    }

    #[test]
    fn parity() {
        for &x in &[0.3, 2.0, 9.7, 14.0, 15.5, 80.0, 199.0] {
            assert_eq!(j0(-x), j0(x));
            assert_eq!(j1(-x), -j1(x));
        }
    }

    #[test]
    fn continuous_across_crossover() {
        for limit in [SERIES_LIMIT, ASYMPTOTIC_LIMIT] {
            let d = 1e-9;
            let (a0, a1) = (j0(limit), j1(limit));
            // first-order Taylor step across the branch point
            let j0_step = j0(limit - d) - (a0 + d * a1);
            let j1_step = j1(limit - d) - (a1 - d * (a0 - a1 / limit));
            assert!(j0_step.abs() < 1e-14, "{j0_step:e}");
            assert!(j1_step.abs() < 1e-14, "{j1_step:e}");
        }
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(bessel_j0(f64::NAN), Err(CrtError::Domain(_))));
        assert!(matches!(bessel_j1(f64::INFINITY), Err(CrtError::Domain(_))));
    }

    #[test]
    fn frequency_axis_cases() {
        let a = frequency_axis(4, 1.0).unwrap();
        let expect = [0.0, PI / 2.0, PI, -PI / 2.0];
        for (f, e) in a.frequencies().iter().zip(expect) {
            assert!((f - e).abs() < 1e-15);
        }
        let b = frequency_axis(2, 0.5).unwrap();
        assert_eq!(b.frequencies().len(), 2);
        assert_eq!(b.frequency(0), 0.0);
        assert!((b.frequency(1) - 2.0 * PI).abs() < 1e-15);
        let c = frequency_axis(8, 0.25).unwrap();
        assert!((c.frequency(1) - PI).abs() < 1e-15);
        assert_eq!(c.mirror_bin(3), 5);
        assert_eq!(c.mirror_bin(4), 4);
        assert_eq!(c.mirror_bin(0), 0);
        assert!(frequency_axis(1, 1.0).is_err());
        assert!(frequency_axis(4, 0.0).is_err());
    }
}

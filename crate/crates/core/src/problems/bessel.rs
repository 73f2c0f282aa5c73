//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! Power series for `x <= 2`; Steed's continued fraction (with Temme's
//! normalization sum) above. Both reach close to full double precision.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;
const SWITCH: f64 = 2.0;

/// `K_0(x)`.
pub fn k0(x: f64) -> f64 {
    k01(x).0
}

/// `K_1(x)`.
pub fn k1(x: f64) -> f64 {
    k01(x).1
}

/// `K_nu(x)` for `nu` in `{0, 1}`.
pub fn bessel_k(order: u32, x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::OutOfRange(format!("bessel_k needs x > 0, got {x}")));
    }
    match order {
        0 => Ok(k0(x)),
        1 => Ok(k1(x)),
        _ => Err(Error::OutOfRange(format!("bessel_k order {order} not in {{0, 1}}"))),
    }
}

/// `(K_0(x), K_1(x))`; NaN for `x <= 0`.
pub fn k01(x: f64) -> (f64, f64) {
    if x.is_nan() || x <= 0.0 {
        return (f64::NAN, f64::NAN);
    }
    if x <= SWITCH {
        series(x)
    } else {
        continued_fraction(x)
    }
}

fn series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let ln = (0.5 * x).ln();
    // term_k = y^k / (k!)^2, harmonic H_k
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 0.0;
    let mut k0_sum = 0.0;
    // I1 = (x/2) sum y^k / (k! (k+1)!), K1 sum uses psi(k+1) + psi(k+2)
    let mut i1 = 0.0;
    let mut k1_sum = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            term *= y / (kf * kf);
            harmonic += 1.0 / kf;
        }
        let t1 = term / (kf + 1.0);
        i0 += term;
        k0_sum += harmonic * term;
        i1 += t1;
        let psi_sum = 2.0 * (harmonic - EULER_GAMMA) + 1.0 / (kf + 1.0);
        k1_sum += psi_sum * t1;
        if term < 1e-18 * i0 {
            break;
        }
    }
    let k0 = -(ln + EULER_GAMMA) * i0 + k0_sum;
    let k1 = 1.0 / x + ln * (0.5 * x * i1) - 0.25 * x * k1_sum;
    (k0, k1)
}

fn continued_fraction(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((k0(1.0) - 0.421_024_438_240_708_33).abs() < 1e-15);
        assert!((k1(1.0) - 0.601_907_230_197_234_57).abs() < 1e-15);
    }

    #[test]
    fn continuous_at_switch() {
        let (a0, a1) = series(SWITCH);
        let (b0, b1) = continued_fraction(SWITCH);
        assert!((a0 - b0).abs() < 1e-15 * a0);
        assert!((a1 - b1).abs() < 1e-15 * a1);
    }

    #[test]
    fn large_argument_asymptotics() {
        let x = 50.0;
        let scaled = k0(x) * x.exp() * (2.0 * x / std::f64::consts::PI).sqrt();
        // Hankel expansion 1 - 1/(8x) + 9/(128x^2) - 225/(3072x^3) + ...
        let series = 1.0 - 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x) - 225.0 / (3072.0 * x * x * x);
        assert!((scaled - series).abs() < 1e-6);
        assert!((scaled - 1.0).abs() < 1.0 / (8.0 * x));
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(bessel_k(0, 0.0).is_err());
        assert!(bessel_k(1, -1.0).is_err());
        assert!(bessel_k(2, 1.0).is_err());
        assert!(k0(0.0).is_nan());
    }
}

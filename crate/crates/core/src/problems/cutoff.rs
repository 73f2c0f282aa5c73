//! `C^3` transition from 0 at `r = 0.1` to 1 at `r = 0.9`.

pub const INNER: f64 = 0.1;
pub const OUTER: f64 = 0.9;
const WIDTH: f64 = OUTER - INNER;

/// `[chi, chi', chi'', chi''']` at radius `r`.
pub fn cutoff(r: f64) -> [f64; 4] {
    if r <= INNER {
        return [0.0; 4];
    }
    if r >= OUTER {
        return [1.0, 0.0, 0.0, 0.0];
    }
    let [v, d1, d2, d3] = transition((r - INNER) / WIDTH);
    [v, d1 / WIDTH, d2 / (WIDTH * WIDTH), d3 / (WIDTH * WIDTH * WIDTH)]
}

/// The degree-7 smoothstep `35t^4 - 84t^5 + 70t^6 - 20t^7` and its first
/// three derivatives in `t`, without clamping.
pub fn transition(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        t3 * t * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t))),
        t3 * (140.0 + t * (-420.0 + t * (420.0 - 140.0 * t))),
        t2 * (420.0 + t * (-1680.0 + t * (2100.0 - 840.0 * t))),
        t * (840.0 + t * (-5040.0 + t * (8400.0 - 4200.0 * t))),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_values() {
        assert_eq!(cutoff(0.05)[0], 0.0);
        assert_eq!(cutoff(1.2)[0], 1.0);
        assert!((cutoff(0.5)[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for r in [0.15, 0.3, 0.62, 0.85] {
            let c = cutoff(r);
            for k in 0..3 {
                let fd = (cutoff(r + h)[k] - cutoff(r - h)[k]) / (2.0 * h);
                assert!((fd - c[k + 1]).abs() < 1e-6 * (1.0 + c[k + 1].abs()), "r {r} k {k}");
            }
        }
    }
}

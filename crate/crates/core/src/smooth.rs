//! The single smooth-step primitive shared by the cutoff `ρ` and the
//! Littlewood–Paley generator `χ`.

/// `e^{-1/u}` for `u > 0`, zero otherwise. C^∞ and flat to all orders at 0.
#[inline]
pub fn flat_exp(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Smooth monotone transition from 0 (for `t <= a`) to 1 (for `t >= b`).
///
/// Built as `g(t-a) / (g(t-a) + g(b-t))` with `g = flat_exp`; the two
/// terms never vanish together when `a < b`.
#[inline]
pub fn smooth_step(t: f64, a: f64, b: f64) -> f64 {
    if t <= a {
        return 0.0;
    }
    if t >= b {
        return 1.0;
    }
    let up = flat_exp(t - a);
    let down = flat_exp(b - t);
    up / (up + down)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_midpoint() {
        assert_eq!(smooth_step(1.0, 1.0, 2.0), 0.0);
        assert_eq!(smooth_step(2.0, 1.0, 2.0), 1.0);
        assert_eq!(smooth_step(1.5, 1.0, 2.0), 0.5);
        assert_eq!(flat_exp(0.0), 0.0);
        assert_eq!(flat_exp(-3.0), 0.0);
    }

    #[test]
    fn monotone() {
        let mut prev = 0.0;
        for i in 0..=1000 {
            let t = 0.9 + 1.2 * i as f64 / 1000.0;
            let v = smooth_step(t, 1.0, 2.0);
            assert!(v >= prev);
            prev = v;
        }
    }
}

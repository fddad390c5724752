//! One-dimensional minimization used for the inner `t` and `p` searches.

use crate::Real;

/// Result of a scalar minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub x: T,
    pub value: T,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `xtol` (absolute) or after
/// `max_iter` reductions. The returned point is the best one evaluated.
pub fn golden_section<T, F>(mut f: F, lo: T, hi: T, xtol: T, max_iter: usize) -> Minimum<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc <= fd {
        Minimum { x: c, value: fc }
    } else {
        Minimum { x: d, value: fd }
    };
    for _ in 0..max_iter {
        if (b - a).abs() <= xtol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            if fc < best.value {
                best = Minimum { x: c, value: fc };
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            if fd < best.value {
                best = Minimum { x: d, value: fd };
            }
        }
    }
    best
}

/// Minimizes `f` on `[lo, hi]` (`0 < lo < hi`) by scanning a logarithmic grid
/// of `grid` points and refining the best cell with golden-section search in
/// `ln x`. The endpoints are always part of the grid.
pub fn log_grid_minimize<T, F>(mut f: F, lo: T, hi: T, grid: usize) -> Minimum<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let grid = grid.max(3);
    let (ulo, uhi) = (lo.ln(), hi.ln());
    let step = (uhi - ulo) / T::from_index((grid - 1) as u64);
    let point = |i: usize| {
        if i == grid - 1 {
            hi
        } else if i == 0 {
            lo
        } else {
            (ulo + step * T::from_index(i as u64)).exp()
        }
    };
    let mut best_i = 0;
    let mut best = Minimum {
        x: lo,
        value: T::infinity(),
    };
    for i in 0..grid {
        let x = point(i);
        let v = f(x);
        if v < best.value {
            best = Minimum { x, value: v };
            best_i = i;
        }
    }
    let a = point(best_i.saturating_sub(1)).ln();
    let b = point((best_i + 1).min(grid - 1)).ln();
    let refined = golden_section(|u: T| f(u.exp().max(lo).min(hi)), a, b, T::lit(1e-12), 200);
    if refined.value < best.value {
        Minimum {
            x: refined.x.exp().max(lo).min(hi),
            value: refined.value,
        }
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_parabola() {
        let m = golden_section(|x: f64| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-12, 200);
        assert!((m.x - 0.3).abs() < 1e-6);
        assert!((m.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_grid_finds_interior_minimum_over_decades() {
        let target = 3.7e-5f64;
        let m = log_grid_minimize(|x: f64| (x.ln() - target.ln()).powi(2), 1e-9, 0.5, 64);
        assert!((m.x / target - 1.0).abs() < 1e-5);
    }

    #[test]
    fn log_grid_respects_endpoint_minimum() {
        let m = log_grid_minimize(|x: f64| -x, 1e-9, 0.5, 64);
        assert_eq!(m.x, 0.5);
    }
}

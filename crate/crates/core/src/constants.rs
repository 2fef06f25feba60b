//! The weight constants a(h), b(h), A(h, theta), the optimal h(theta), and
//! the derived corollary quantities B(k), c0.

use crate::error::{Error, Result};
use rayon::prelude::*;

/// Evaluated constants at a given (h, theta).
#[derive(Clone, Copy, Debug)]
pub struct ConstantsAt {
    pub h: f64,
    pub theta: f64,
    pub a_val: f64,
    pub b_val: f64,
    pub big_a_val: f64,
}

/// a(h): 1 on (0, 1/sqrt2]; the logarithmic branch on (1/sqrt2, 1).
pub fn a_of_h(h: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("h must lie in (0,1), got {h}")));
    }
    let h2 = h * h;
    if h2 <= 0.5 {
        Ok(1.0)
    } else {
        let q = 4.0 * h2 - 1.0;
        let front = q * q * (1.0 + h2) / (8.0 * (4.0 * h2 + 1.0) * (1.0 - h2));
        let inner = 1.0 + 2.0 * (2.0 * h2 - 1.0) * (4.0 * h2 + 1.0) / ((h2 + 1.0) * q * q);
        Ok(1.0 + front * inner.ln())
    }
}

/// b(h) = pi (1 + h^2)^2 / (2 (1 - h^2)).
pub fn b_of_h(h: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("h must lie in (0,1), got {h}")));
    }
    let h2 = h * h;
    Ok(std::f64::consts::PI * (1.0 + h2).powi(2) / (2.0 * (1.0 - h2)))
}

/// A(h, theta) = h / (a(h) |cos theta| + b(h) |sin theta|).
pub fn eval_constants(h: f64, theta: f64) -> Result<ConstantsAt> {
    let a = a_of_h(h)?;
    let b = b_of_h(h)?;
    let big_a = h / (a * theta.cos().abs() + b * theta.sin().abs());
    Ok(ConstantsAt {
        h,
        theta,
        a_val: a,
        b_val: b,
        big_a_val: big_a,
    })
}

/// The maximizer of A(., theta) with its method metadata.
#[derive(Clone, Copy, Debug)]
pub struct OptimalH {
    pub theta: f64,
    pub h_star: f64,
    pub a_star: f64,
    pub grid_size: usize,
    pub tol: f64,
}

const GRID_LO: f64 = 0.35;
const GRID_HI: f64 = 0.8;
const GRID_N: usize = 1001;

/// Maximize A(., theta) over (0, 1): 1001-point coarse grid on [0.35, 0.8]
/// (unimodality is not assumed), then golden-section refinement to `tol`.
/// Grid ties break toward the smaller h.
pub fn optimize_h(theta: f64, tol: f64) -> Result<OptimalH> {
    if tol < 1e-12 {
        return Err(Error::Domain(format!("tol must be >= 1e-12, got {tol}")));
    }
    let f = |h: f64| eval_constants(h, theta).map(|c| c.big_a_val).unwrap_or(0.0);
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    let step = (GRID_HI - GRID_LO) / (GRID_N - 1) as f64;
    for i in 0..GRID_N {
        let h = GRID_LO + step * i as f64;
        let v = f(h);
        if v > best_v + 1e-15 {
            best_v = v;
            best_i = i;
        }
    }
    let mut lo = GRID_LO + step * best_i.saturating_sub(1) as f64;
    let mut hi = (GRID_LO + step * (best_i + 1) as f64).min(GRID_HI);
    // golden-section search for the maximum
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let h_star = 0.5 * (lo + hi);
    Ok(OptimalH {
        theta,
        h_star,
        a_star: f(h_star),
        grid_size: GRID_N,
        tol,
    })
}

/// Sweep of optimal h over an n-point uniform theta grid on [0, pi/2],
/// with the largest upward violation of h(theta) monotone non-increase.
pub struct ThetaSweep {
    pub points: Vec<OptimalH>,
    pub max_monotonicity_violation: f64,
}

pub fn theta_sweep(n: usize, tol: f64) -> Result<ThetaSweep> {
    if n < 2 {
        return Err(Error::Domain(format!("sweep needs n >= 2, got {n}")));
    }
    let points: Vec<OptimalH> = (0..n)
        .into_par_iter()
        .map(|i| {
            let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (n - 1) as f64;
            optimize_h(theta, tol)
        })
        .collect::<Result<_>>()?;
    let mut viol = 0.0f64;
    for w in points.windows(2) {
        viol = viol.max(w[1].h_star - w[0].h_star);
    }
    Ok(ThetaSweep {
        points,
        max_monotonicity_violation: viol,
    })
}

/// c0 = (4/3) A(h, pi/2) = 2/(3 pi).
pub fn c0() -> f64 {
    2.0 / (3.0 * std::f64::consts::PI)
}

/// (B(k), c0) with B(k) = k^2 (1 + k/(c0 - k)) + 4k/c0, for 0 <= k < c0.
pub fn corollary_values(k: f64) -> Result<(f64, f64)> {
    let c = c0();
    if !(0.0..c).contains(&k) {
        return Err(Error::Domain(format!(
            "k must lie in [0, c0 = {c}), got {k}"
        )));
    }
    let b = k * k * (1.0 + k / (c - k)) + 4.0 * k / c;
    Ok((b, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoted_values_at_half() {
        let c = eval_constants(0.5, 0.0).unwrap();
        assert_eq!(c.a_val, 1.0);
        assert!((c.big_a_val - 0.5).abs() < 1e-15);
        let c = eval_constants(0.5, std::f64::consts::FRAC_PI_2).unwrap();
        let expect = 12.0 / (25.0 * std::f64::consts::PI);
        assert!((c.big_a_val - expect).abs() < 1e-12, "{}", c.big_a_val);
        // b(1/2) = 25 pi / 24
        assert!((c.b_val - 25.0 * std::f64::consts::PI / 24.0).abs() < 1e-12);
    }

    #[test]
    fn a_continuous_at_branch_point() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let lo = a_of_h(h - 1e-9).unwrap();
        let hi = a_of_h(h + 1e-9).unwrap();
        assert!((lo - hi).abs() < 1e-6, "branch jump {lo} vs {hi}");
        assert_eq!(lo, 1.0);
    }

    #[test]
    fn quoted_identity_at_half_for_random_theta() {
        for i in 0..100 {
            let theta = -4.0 + 8.0 * crate::rng::uniform(3, 0, i);
            let c = eval_constants(0.5, theta).unwrap();
            let quoted =
                12.0 / (24.0 * theta.cos().abs() + 25.0 * std::f64::consts::PI * theta.sin().abs());
            assert!((c.big_a_val - quoted).abs() < 1e-12);
        }
    }

    #[test]
    fn optimizer_reproduces_quoted_extremals() {
        let opt = optimize_h(0.0, 1e-10).unwrap();
        assert!((opt.h_star - 0.72894).abs() < 1e-4, "h* = {}", opt.h_star);
        assert!((opt.a_star - 0.70738).abs() < 1e-4, "A* = {}", opt.a_star);

        let opt = optimize_h(std::f64::consts::FRAC_PI_2, 1e-10).unwrap();
        let h_closed = std::f64::consts::SQRT_2 - 1.0;
        assert!((opt.h_star - h_closed).abs() < 1e-8, "h* = {}", opt.h_star);
        let a_closed = 1.0 / (2.0 * std::f64::consts::PI);
        assert!((opt.a_star - a_closed).abs() < 1e-10, "A* = {}", opt.a_star);
        // closed-form root of h^4 - 6h^2 + 1 = 0
        let r = h_closed.powi(4) - 6.0 * h_closed.powi(2) + 1.0;
        assert!(r.abs() < 1e-12);

        let neg = optimize_h(-std::f64::consts::FRAC_PI_2, 1e-10).unwrap();
        assert_eq!(neg.h_star, opt.h_star);
        assert_eq!(neg.a_star, opt.a_star);
    }

    #[test]
    fn sweep_bounds_and_monotonicity() {
        let sweep = theta_sweep(101, 1e-9).unwrap();
        for p in &sweep.points {
            assert!(p.h_star > 0.4142 - 1e-3 && p.h_star < 0.7290 + 1e-3);
            assert!(p.a_star > 1.0 / 9.0 && p.a_star < 1.0);
        }
        assert!(sweep.max_monotonicity_violation < 1e-5);
        let two = theta_sweep(2, 1e-9).unwrap();
        assert!(two.points[0].h_star > two.points[1].h_star);
    }

    #[test]
    fn chain_of_inequalities() {
        for i in 0..200 {
            let h = 0.01 + 0.98 * crate::rng::uniform(11, 0, i);
            let theta = -4.0 + 8.0 * crate::rng::uniform(11, 1, i);
            let c = eval_constants(h, theta).unwrap();
            let mid = h / (theta.cos().abs() + theta.sin().abs());
            assert!(c.big_a_val <= mid + 1e-12);
            assert!(mid <= h + 1e-12);
            assert!(h < 1.0);
        }
    }

    #[test]
    fn optimal_beats_half() {
        for i in 0..25 {
            let theta = std::f64::consts::FRAC_PI_2 * i as f64 / 24.0;
            let opt = optimize_h(theta, 1e-9).unwrap();
            let at_half = eval_constants(0.5, theta).unwrap().big_a_val;
            assert!(opt.a_star >= at_half - 1e-12);
        }
    }

    #[test]
    fn corollary_values_and_pole() {
        let (b0, c) = corollary_values(0.0).unwrap();
        assert_eq!(b0, 0.0);
        assert!((c - 0.2122065907891938).abs() < 1e-7);
        // hand evaluation at k = 0.1: B = 0.01 (1 + 0.1/(c0-0.1)) + 0.4/c0
        let (b, _) = corollary_values(0.1).unwrap();
        let hand = 0.01 * (1.0 + 0.1 / (c - 0.1)) + 0.4 / c;
        assert!((b - hand).abs() < 1e-14);
        assert!(corollary_values(c).is_err());
        assert!(corollary_values(c + 0.1).is_err());
        assert!(corollary_values(-0.1).is_err());
    }

    #[test]
    fn domain_errors() {
        assert!(eval_constants(0.0, 0.0).is_err());
        assert!(eval_constants(1.0, 0.0).is_err());
        assert!(eval_constants(1.5, 0.0).is_err());
    }
}

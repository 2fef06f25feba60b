//! Quadrature and summation utilities shared by the integrating modules.

use once_cell::sync::Lazy;

/// Nodes and weights of 16-point Gauss-Legendre on [-1, 1], computed at first
/// use by Newton iteration on P_16 (no tabulated literals to get wrong).
pub static GL16: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_legendre(16));

/// Gauss-Legendre nodes/weights on [-1, 1] for order n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_and_deriv(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One Gauss-Legendre 16 pass over [a, b].
pub fn gl16<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = &*GL16;
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Adaptive Simpson to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, fa, m, fm, left, lm, flm, tol * 0.5, depth - 1)
                + rec(f, m, fm, b, fb, right, rm, frm, tol * 0.5, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Pairwise sum with a deterministic reduction tree; used wherever parallel
/// work is gathered so results do not depend on scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Composite trapezoid of `f` over [a, b] with `n` panels, evaluated in
/// index-chunked parallel with a deterministic reduction.
pub fn trapezoid_parallel<F: Fn(f64) -> f64 + Sync>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    use rayon::prelude::*;
    let h = (b - a) / n as f64;
    const CHUNK: usize = 8192;
    let n_chunks = (n + 1).div_ceil(CHUNK);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n + 1);
            let mut acc = 0.0;
            for i in lo..hi {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                acc += w * f(a + h * i as f64);
            }
            acc
        })
        .collect();
    pairwise_sum(&partials) * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl16_is_exact_on_high_degree_polynomials() {
        let (nodes, weights) = &*GL16;
        assert_eq!(nodes.len(), 16);
        let wsum: f64 = weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        // exact through degree 31
        for &k in &[8u32, 20, 30] {
            let val = gl16(&|x: f64| x.powi(k as i32), -1.0, 1.0);
            let exact = 2.0 / (k as f64 + 1.0);
            assert!((val - exact).abs() < 1e-13, "degree {k}: {val} vs {exact}");
        }
        let val31 = gl16(&|x: f64| x.powi(31), -1.0, 1.0);
        assert!(val31.abs() < 1e-13);
    }

    #[test]
    fn simpson_converges() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-11);
        let v2 = adaptive_simpson(&|x: f64| 1.0 / x, 1.0, 2.0, 1e-12);
        assert!((v2 - std::f64::consts::LN_2).abs() < 1e-11);
    }

    #[test]
    fn trapezoid_matches_serial() {
        let f = |x: f64| (3.1 * x).sin() + 0.2 * x;
        let n = 20000;
        let par = trapezoid_parallel(&f, 0.0, 10.0, n);
        let h = 10.0 / n as f64;
        let mut ser = 0.5 * (f(0.0) + f(10.0));
        for i in 1..n {
            ser += f(h * i as f64);
        }
        ser *= h;
        assert!((par - ser).abs() < 1e-9);
    }
}

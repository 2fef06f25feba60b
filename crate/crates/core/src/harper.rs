//! The multi-range partition of [T, 2T]: the delta ladder, the windowed
//! Dirichlet polynomials G_(i,j), the increment sets A(i,j), the
//! zero-proximity sets B(j), the good set and the exceptional sets by first
//! failure scale, Monte Carlo measures of all of them, and the Dirichlet
//! mean-value bound check.

use crate::approx::{sigma_select, ApproxParams};
use crate::constants;
use crate::error::{Error, Result};
use crate::quad::pairwise_sum;
use crate::rng;
use crate::zeros::ZeroTable;
use num_complex::Complex64;
use rayon::prelude::*;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Derived regime quantities for given (T, k, K, theta), with overrides for
/// exercising multi-range paths that real desk-scale parameters never reach.
#[derive(Clone, Debug)]
pub struct RegimeParams {
    pub t_cap: f64,
    pub k: f64,
    pub kappa: f64,
    pub big_k: f64,
    pub theta: f64,
    pub h: f64,
    pub big_a: f64,
    pub l_val: f64,
    /// delta[0] = 0, delta[i] = (L + 1 - i)^{-8}.
    pub delta: Vec<f64>,
    pub i_index: usize,
    /// Multiplies the A(i,j) increment thresholds (1 = paper scale).
    pub a_threshold_scale: f64,
    pub overridden: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RegimeOverrides {
    pub l_val: Option<f64>,
    pub i_index: Option<usize>,
    pub a_threshold_scale: Option<f64>,
}

/// Build the regime: kappa = k + 3, L = (log T / log log T)^{1/8}, the delta
/// ladder up to ceil(L), and the split index
/// 1 + max{ i >= 0 : delta_i <= e^{-80 A kappa K} }.
pub fn build_regime(
    t_cap: f64,
    k: f64,
    big_k: f64,
    theta: f64,
    overrides: RegimeOverrides,
) -> Result<RegimeParams> {
    if t_cap < 100.0 {
        return Err(Error::Domain(format!("T must be >= 100, got {t_cap}")));
    }
    if k < 0.0 {
        return Err(Error::Domain(format!("k must be >= 0, got {k}")));
    }
    if big_k < 1.0 {
        return Err(Error::Domain(format!("K must be >= 1, got {big_k}")));
    }
    let kappa = k + 3.0;
    let opt = constants::optimize_h(theta, 1e-10)?;
    let overridden =
        overrides.l_val.is_some() || overrides.i_index.is_some() || overrides.a_threshold_scale.is_some();
    let l_val = overrides
        .l_val
        .unwrap_or_else(|| (t_cap.ln() / t_cap.ln().ln()).powf(0.125));
    let top = l_val.ceil() as usize;
    let mut delta = vec![0.0];
    for i in 1..=top {
        delta.push((l_val + 1.0 - i as f64).powi(-8));
    }
    let threshold = (-80.0 * opt.a_star * kappa * big_k).exp();
    let i_index = match overrides.i_index {
        Some(i) => {
            if i < 1 || i >= delta.len() {
                return Err(Error::Index(format!(
                    "override split index {i} outside 1..{}",
                    delta.len()
                )));
            }
            i
        }
        None => {
            1 + delta
                .iter()
                .enumerate()
                .filter(|&(_, &d)| d <= threshold)
                .map(|(i, _)| i)
                .max()
                .unwrap_or(0)
        }
    };
    if i_index >= delta.len() {
        return Err(Error::Index(format!(
            "split index {i_index} exceeds the delta ladder (len {})",
            delta.len()
        )));
    }
    Ok(RegimeParams {
        t_cap,
        k,
        kappa,
        big_k,
        theta,
        h: opt.h_star,
        big_a: opt.a_star,
        l_val,
        delta,
        i_index,
        a_threshold_scale: overrides.a_threshold_scale.unwrap_or(1.0),
        overridden,
    })
}

impl RegimeParams {
    /// X_j = T^{delta_j}.
    pub fn x_at(&self, j: usize) -> Result<f64> {
        let d = *self
            .delta
            .get(j)
            .ok_or_else(|| Error::Index(format!("delta index {j} out of range")))?;
        let x = self.t_cap.powf(d);
        if x < 3.0 {
            return Err(Error::Domain(format!(
                "T^delta_{j} = {x} < 3; window too small for the weight"
            )));
        }
        Ok(x)
    }

    /// Prime window (T^{delta_{i-1}}, T^{delta_i}].
    pub fn window_bounds(&self, i: usize) -> Result<(f64, f64)> {
        if i == 0 || i >= self.delta.len() {
            return Err(Error::Index(format!("window index {i} outside 1..{}", self.delta.len())));
        }
        let lo = self.t_cap.powf(self.delta[i - 1]);
        let hi = self.t_cap.powf(self.delta[i]);
        Ok((lo, hi))
    }

    /// Increment threshold of A(i, j): 1/(20 e^2 kappa (j+1-i)^2 delta_i),
    /// scaled by the synthetic-regime factor.
    pub fn a_threshold(&self, i: usize, j: usize) -> f64 {
        let d = (j + 1 - i) as f64;
        let e2 = std::f64::consts::E * std::f64::consts::E;
        self.a_threshold_scale / (20.0 * e2 * self.kappa * d * d * self.delta[i])
    }

    fn approx_params_at(&self, j: usize) -> Result<ApproxParams> {
        ApproxParams::with_h(self.theta, self.big_k, self.h, self.x_at(j)?)
    }
}

/// phi_j(p) and psi_j(p): the twisted coefficients of the windowed
/// polynomials at scale X_j = T^{delta_j}.
pub fn coeffs_phi_psi(p: u64, j: usize, regime: &RegimeParams) -> Result<(Complex64, Complex64)> {
    let x_j = regime.x_at(j)?;
    let pf = p as f64;
    if pf > x_j {
        return Err(Error::Index(format!("prime {p} beyond window bound {x_j}")));
    }
    if j > regime.i_index {
        return Err(Error::Index(format!(
            "scale index {j} beyond split index {}",
            regime.i_index
        )));
    }
    Ok(phi_psi_unchecked(pf, x_j, regime))
}

pub(crate) fn phi_psi_unchecked(pf: f64, x_j: f64, regime: &RegimeParams) -> (Complex64, Complex64) {
    let ln_x = x_j.ln();
    let lp = pf.ln();
    let e_theta = Complex64::from_polar(1.0, -regime.theta);
    let damp = pf.powf(-regime.big_k / (regime.h * ln_x));
    let w = crate::kernel::weight_w(pf, x_j);
    let phi = w
        * damp
        * (e_theta * (1.0 + regime.big_k * lp / (regime.h * ln_x))
            - (regime.big_k / regime.big_a + 9.0 / regime.h) * lp / ln_x);
    let psi = e_theta * pf.powf(-2.0 * regime.big_k / (regime.h * ln_x));
    (phi, psi)
}

/// a_j(p, t) = Re( phi_j(p) p^{-1/2 - it} + psi_j(p) p^{-1 - 2it} / 2 ).
pub fn a_coeff_at(pf: f64, t: f64, phi: Complex64, psi: Complex64) -> f64 {
    let lp = pf.ln();
    let osc = Complex64::from_polar(1.0, -t * lp);
    (phi * osc / pf.sqrt() + psi * osc * osc / (2.0 * pf)).re
}

/// G_(i,j)(t): sum of a_j(p, t) over the prime window i.
pub fn poly_g(
    t: f64,
    i: usize,
    j: usize,
    regime: &RegimeParams,
    primes: &[u64],
) -> Result<f64> {
    if !(1 <= i && i <= j && j <= regime.i_index) {
        return Err(Error::Index(format!(
            "need 1 <= i <= j <= {}, got ({i}, {j})",
            regime.i_index
        )));
    }
    let (lo, hi) = regime.window_bounds(i)?;
    let x_j = regime.x_at(j)?;
    let mut acc = 0.0;
    for &p in primes {
        let pf = p as f64;
        if pf <= lo {
            continue;
        }
        if pf > hi {
            break;
        }
        let (phi, psi) = phi_psi_unchecked(pf, x_j, regime);
        acc += a_coeff_at(pf, t, phi, psi);
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bucket {
    Good,
    Exceptional(usize),
}

impl std::fmt::Display for Bucket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bucket::Good => write!(f, "T"),
            Bucket::Exceptional(j) => write!(f, "S{j}"),
        }
    }
}

/// Full membership data for one sample point.
#[derive(Clone, Debug)]
pub struct Membership {
    pub t: f64,
    /// (i, j, |G|, in A(i,j)) for all evaluated pairs i <= j <= split.
    pub in_a: Vec<(usize, usize, f64, bool)>,
    /// in B(j) for j = 1..=split (index 0 unused).
    pub in_b: Vec<bool>,
    pub buckets: Vec<Bucket>,
}

/// Evaluate every A(i, j) and B(j) at t and assign the good/exceptional
/// buckets. Coverage (every t belongs somewhere) holds by construction;
/// disjointness need not.
pub fn classify_t(
    t: f64,
    regime: &RegimeParams,
    table: &ZeroTable,
    primes: &[u64],
) -> Result<Membership> {
    let split = regime.i_index;
    // B(j) first (cheap for on-line tables), then A by ascending i
    let mut in_b = vec![true; split + 1];
    for j in 1..=split {
        let params = regime.approx_params_at(j)?;
        let sv = sigma_select(t, &params, table)?;
        in_b[j] = sv.sigma <= params.sigma_floor() + 1e-12;
    }
    let mut in_a = Vec::new();
    let mut a_holds = vec![vec![true; split + 1]; split + 1];
    for i in 1..=split {
        for j in i..=split {
            let g = poly_g(t, i, j, regime, primes)?;
            let ok = g.abs() <= regime.a_threshold(i, j);
            a_holds[i][j] = ok;
            in_a.push((i, j, g, ok));
        }
    }
    let mut buckets = Vec::new();
    // good set: all A(i, split) and B(split)
    if (1..=split).all(|i| a_holds[i][split]) && in_b[split] {
        buckets.push(Bucket::Good);
    }
    // S(0): some A(1, l) fails or B(1) fails
    if (1..=split).any(|l| !a_holds[1][l]) || !in_b[1] {
        buckets.push(Bucket::Exceptional(0));
    }
    // S(j), 1 <= j <= split-1
    for j in 1..split {
        let prefix = (1..=j).all(|i| a_holds[i][j]) && in_b[j];
        let fail_next = ((j + 1)..=split).any(|l| !a_holds[j + 1][l]) || !in_b[j + 1];
        if prefix && fail_next {
            buckets.push(Bucket::Exceptional(j));
        }
    }
    Ok(Membership {
        t,
        in_a,
        in_b,
        buckets,
    })
}

/// Direct zero-scan form of the B(j) membership: no table zero with
/// beta > 1/2 + K/log X lies within K X^{beta - 1/2}/log X of t. Kept as an
/// independent route for the set-equivalence checks.
pub fn in_b_direct(
    t: f64,
    j: usize,
    regime: &RegimeParams,
    table: &ZeroTable,
) -> Result<bool> {
    let x = regime.x_at(j)?;
    let ln_x = x.ln();
    let thr = 0.5 + regime.big_k / ln_x;
    for e in table.entries() {
        if e.beta > thr {
            let window = regime.big_k * x.powf(e.beta - 0.5) / ln_x;
            for gamma in [e.gamma, -e.gamma] {
                if (t - gamma).abs() <= window {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// One bucket's Monte Carlo measure estimate.
#[derive(Clone, Debug)]
pub struct BucketMeasure {
    pub bucket: Bucket,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Debug)]
pub struct PartitionReport {
    pub measures: Vec<BucketMeasure>,
    pub n_samples: usize,
    pub seed: u64,
    /// Samples landing in no bucket (coverage demands this stay 0).
    pub uncovered: usize,
}

/// Monte Carlo bucket measures over [T, 2T] as fractions, with 95% binomial
/// confidence intervals. Deterministic under a fixed seed independent of
/// parallel scheduling (counter-keyed sampling, indexed reduction).
pub fn measure_partition(
    regime: &RegimeParams,
    table: &ZeroTable,
    primes: &[u64],
    n_samples: usize,
    seed: u64,
) -> Result<PartitionReport> {
    if n_samples < 1000 {
        return Err(Error::Domain(format!(
            "need at least 1000 samples, got {n_samples}"
        )));
    }
    let split = regime.i_index;
    let n_buckets = split + 1; // Good + S(0..split-1)
    let counts: Vec<Result<Vec<usize>>> = (0..n_samples)
        .into_par_iter()
        .chunks(4096)
        .map(|chunk| {
            let mut local = vec![0usize; n_buckets + 1];
            for idx in chunk {
                let u = rng::uniform(seed, 0, idx as u64);
                let t = regime.t_cap * (1.0 + u);
                let m = classify_t(t, regime, table, primes)?;
                if m.buckets.is_empty() {
                    local[n_buckets] += 1;
                }
                for b in &m.buckets {
                    let slot = match b {
                        Bucket::Good => 0,
                        Bucket::Exceptional(j) => 1 + j,
                    };
                    local[slot] += 1;
                }
            }
            Ok(local)
        })
        .collect();
    let mut total = vec![0usize; n_buckets + 1];
    for c in counts {
        let c = c?;
        for (a, b) in total.iter_mut().zip(&c) {
            *a += b;
        }
    }
    let nf = n_samples as f64;
    let to_measure = |bucket: Bucket, count: usize| {
        let p = count as f64 / nf;
        let half = 1.96 * (p * (1.0 - p) / nf).sqrt();
        BucketMeasure {
            bucket,
            estimate: p,
            ci_low: (p - half).max(0.0),
            ci_high: (p + half).min(1.0),
        }
    };
    let mut measures = vec![to_measure(Bucket::Good, total[0])];
    for j in 0..split {
        measures.push(to_measure(Bucket::Exceptional(j), total[1 + j]));
    }
    Ok(PartitionReport {
        measures,
        n_samples,
        seed,
        uncovered: total[n_buckets],
    })
}

/// lhs = integral over [T, 2T] of |sum a(p) p^{-it}|^{2k} dt by fixed-step
/// trapezoid at Nyquist/8 of the top frequency k log X;
/// rhs = T k! (sum |a(p)|^2)^k. Requires X^k <= T.
pub fn mean_value_check(
    a_coeffs: &[(u64, Complex64)],
    k: u32,
    t_cap: f64,
    x: f64,
) -> Result<(f64, f64)> {
    if k < 1 {
        return Err(Error::Domain("k must be >= 1".into()));
    }
    if x.powi(k as i32) > t_cap {
        return Err(Error::Precondition(format!(
            "X^k = {} exceeds T = {t_cap}",
            x.powi(k as i32)
        )));
    }
    let coeffs: Vec<(f64, Complex64)> = a_coeffs
        .iter()
        .filter(|&&(p, _)| (p as f64) <= x)
        .map(|&(p, c)| ((p as f64).ln(), c))
        .collect();
    let step = TWO_PI / (8.0 * k as f64 * x.ln());
    let n = ((t_cap / step).ceil() as usize).max(16);
    let h = t_cap / n as f64;
    const CHUNK: usize = 8192;
    let n_chunks = (n + 1).div_ceil(CHUNK);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n + 1);
            let mut acc = 0.0;
            for idx in lo..hi {
                let t = t_cap + h * idx as f64;
                let mut s = Complex64::new(0.0, 0.0);
                for &(lp, a) in &coeffs {
                    s += a * Complex64::from_polar(1.0, -t * lp);
                }
                let w = if idx == 0 || idx == n { 0.5 } else { 1.0 };
                acc += w * s.norm_sqr().powi(k as i32);
            }
            acc
        })
        .collect();
    let lhs = pairwise_sum(&partials) * h;
    let mass: f64 = coeffs.iter().map(|&(_, c)| c.norm_sqr()).sum();
    let mut kfact = 1.0;
    for v in 2..=k {
        kfact *= v as f64;
    }
    let rhs = t_cap * kfact * mass.powi(k as i32);
    Ok((lhs, rhs))
}

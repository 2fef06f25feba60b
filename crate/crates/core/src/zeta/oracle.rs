//! Independent high-precision zeta oracle.
//!
//! Euler-Maclaurin summation in double-double arithmetic. This path shares no
//! code with the Riemann-Siegel fast path it is used to validate: the theta
//! function here comes from a Stirling log-gamma, the zeta values from direct
//! summation plus Bernoulli corrections.

use crate::dd::{CDd, Dd, PI, TWO_PI};
use crate::error::{Error, Result};
use num_complex::Complex64;
use once_cell::sync::Lazy;

/// B_{2n}/(2n)! for n = 1..=MAX_BERNOULLI, from the Entringer/Seidel triangle
/// (all-positive integer recurrence, so no cancellation on the way up).
const MAX_BERNOULLI: usize = 64;

static BERNOULLI_FACT: Lazy<Vec<Dd>> = Lazy::new(|| {
    // zigzag numbers Z_n = E(n, n) up to n = 2*MAX - 1
    let top = 2 * MAX_BERNOULLI;
    let mut prev: Vec<Dd> = vec![Dd::ONE];
    let mut zigzag: Vec<Dd> = vec![Dd::ONE]; // Z_0 = 1
    for n in 1..top {
        let mut row = vec![Dd::ZERO; n + 1];
        for k in 1..=n {
            row[k] = row[k - 1].add(prev[n - k]);
        }
        zigzag.push(row[n]);
        prev = row;
    }
    // tangent numbers T_m = Z_{2m-1};
    // B_{2m}/(2m)! = (-1)^{m-1} T_m / ((2m-1)! * 2^{2m} * (2^{2m} - 1))
    let mut out = Vec::with_capacity(MAX_BERNOULLI);
    let mut fact = Dd::ONE; // (2m-1)!
    for m in 1..=MAX_BERNOULLI {
        fact = fact.mul_f64((2 * m - 1) as f64);
        if m > 1 {
            fact = fact.mul_f64((2 * m - 2) as f64);
        }
        let four_m = Dd::from_f64(2.0).powi(2 * m as i32);
        let denom = fact.mul(four_m).mul(four_m.sub(Dd::ONE));
        let mut v = zigzag[2 * m - 1].div(denom);
        if m % 2 == 0 {
            v = v.neg();
        }
        out.push(v);
    }
    out
});

/// B_{2m}/(2m)! as f64 (m >= 1).
pub fn bernoulli_over_fact(m: usize) -> f64 {
    BERNOULLI_FACT[m - 1].to_f64()
}

/// Euler-Maclaurin evaluation of zeta(s) with N leading terms and M
/// correction terms. Returns (value, remainder bound).
pub fn zeta_em_dd(s: CDd, n: usize, m: usize) -> (CDd, f64) {
    assert!(m >= 1 && m < MAX_BERNOULLI);
    let nf = n as f64;
    let mut sum = CDd::ZERO;
    for k in 1..=n {
        sum = sum.add(pow_neg_s(k as f64, s));
    }
    let w = pow_neg_s(nf, s); // N^{-s}
    let s_minus_1 = s.sub(CDd::ONE);
    // N^{1-s}/(s-1)
    sum = sum.add(w.mul_dd(Dd::from_f64(nf)).div(s_minus_1));
    // -N^{-s}/2
    sum = sum.sub(w.mul_dd(Dd::from_f64(0.5)));
    // sum_{k=1}^{M} B_{2k}/(2k)! * N^{-s-2k+1} * prod_{j=0}^{2k-2}(s+j);
    // the N^{-2} is folded into the running product so neither factor
    // overflows on its own at large |s|.
    let n_dd = Dd::from_f64(nf);
    let inv_n2 = n_dd.mul(n_dd).recip();
    let mut scaled = w.mul_dd(n_dd.recip()).mul(s); // k = 1: N^{-s-1} s
    let mut corr = CDd::ZERO;
    for k in 1..=m {
        corr = corr.add(scaled.mul_dd(BERNOULLI_FACT[k - 1]));
        let j0 = (2 * k - 1) as f64;
        scaled = scaled
            .mul(s.add(CDd::from_f64(j0, 0.0)))
            .mul(s.add(CDd::from_f64(j0 + 1.0, 0.0)))
            .mul_dd(inv_n2);
    }
    sum = sum.add(corr);
    // remainder: |next term| * |(s + 2M + 1) / (sigma + 2M + 1)|
    let sigma = s.re.to_f64();
    let t = s.im.to_f64();
    let next = BERNOULLI_FACT[m].to_f64().abs() * scaled.abs().to_f64();
    let amp = ((sigma + 2.0 * m as f64 + 1.0).powi(2) + t * t).sqrt()
        / (sigma + 2.0 * m as f64 + 1.0).max(1e-300);
    (sum, next * amp)
}

fn pow_neg_s(k: f64, s: CDd) -> CDd {
    if k == 1.0 {
        return CDd::ONE;
    }
    let lnk = Dd::from_f64(k).ln();
    s.neg().mul_dd(lnk).exp()
}

/// Plan (N, M) so that remainder + rounding < 10^-digits; None if unattainable.
fn plan_em(sigma: f64, t: f64, digits: u32) -> Option<(usize, usize)> {
    let tol = 10f64.powi(-(digits as i32));
    let smod = (sigma * sigma + t * t).sqrt();
    let mut n = 24usize.max((0.6 * t.abs()) as usize);
    while n <= 6_000_000 {
        let nf = n as f64;
        let round = rounding_model(n, sigma, t);
        // magnitude of correction term m: |c_m| N^{1-sigma-2m} prod_{j=0}^{2m-2}|s+j|
        let mut log_poch = smod.max(1e-300).ln(); // m = 1
        let mut prev_log_term = f64::INFINITY;
        for m in 1..MAX_BERNOULLI - 1 {
            // advance pochhammer to term m+1 and compute its magnitude:
            // that is the remainder scale after keeping M = m terms
            let j0 = (2 * m - 1) as f64;
            let next_log_poch = log_poch
                + ((sigma + j0).powi(2) + t * t).sqrt().ln()
                + ((sigma + j0 + 1.0).powi(2) + t * t).sqrt().ln();
            let denom = sigma + 2.0 * m as f64 + 1.0;
            if denom > 0.5 {
                let log_next = BERNOULLI_FACT[m].to_f64().abs().max(1e-300).ln()
                    + next_log_poch
                    + (1.0 - sigma - 2.0 * (m + 1) as f64) * nf.ln();
                let amp = (denom * denom + t * t).sqrt() / denom;
                let bound = log_next.exp() * amp;
                if bound + round < tol {
                    return Some((n, m));
                }
                if log_next > prev_log_term + 2.0 {
                    break; // asymptotic tail diverging; need larger N
                }
                prev_log_term = log_next;
            }
            log_poch = next_log_poch;
        }
        n *= 2;
    }
    None
}

/// Crude but honest absolute rounding model for the DD summation.
fn rounding_model(n: usize, sigma: f64, t: f64) -> f64 {
    let nf = n as f64;
    // sum of |k^-s| = sum k^-sigma
    let mass = if sigma > 1.0 {
        (sigma / (sigma - 1.0)).min(50.0)
    } else if sigma > 0.0 {
        nf.powf(1.0 - sigma) / (1.0 - sigma).max(0.05)
    } else {
        nf.powf(1.0 - sigma)
    };
    // angle-reduction error ~ |t| ln N * 2^-104 per term
    let arg_err = (t.abs() * nf.ln()).max(1.0) * 2.0f64.powi(-104);
    mass * (arg_err + 64.0 * 2.0f64.powi(-106))
}

/// Largest digit request the configured working precision can honor at s.
pub fn attainable_digits(s: Complex64) -> u32 {
    let worst = rounding_model(4_000_000, s.re, s.im) * 4.0;
    (-worst.log10()).floor().clamp(1.0, 30.0) as u32
}

/// zeta(s) to absolute error below 10^-target_digits.
///
/// Independent brute-force path: direct Euler-Maclaurin in double-double.
/// Errors: pole at s = 1; precision error when the request exceeds what the
/// working precision (roughly 30 digits, less at large |Im s|) can certify.
pub fn zeta_oracle(s: Complex64, target_digits: u32) -> Result<Complex64> {
    let (v, _) = zeta_oracle_dd(CDd::from_f64(s.re, s.im), target_digits)?;
    Ok(v.to_c64())
}

/// Double-double variant, also returning the certified error bound.
pub fn zeta_oracle_dd(s: CDd, target_digits: u32) -> Result<(CDd, f64)> {
    let sigma = s.re.to_f64();
    let t = s.im.to_f64();
    if sigma == 1.0 && t == 0.0 {
        return Err(Error::Pole);
    }
    if target_digits > 30 {
        return Err(Error::Precision {
            requested: target_digits,
            attainable: 30,
        });
    }
    if sigma < -30.0 {
        return Err(Error::Domain(format!(
            "oracle supports Re s >= -30, got {sigma}"
        )));
    }
    let attain = attainable_digits(s.to_c64());
    let Some((n, m)) = plan_em(sigma, t, target_digits) else {
        return Err(Error::Precision {
            requested: target_digits,
            attainable: attain,
        });
    };
    let (v, rem) = zeta_em_dd(s, n, m);
    let budget = rem + rounding_model(n, sigma, t);
    if budget > 10f64.powi(-(target_digits as i32)) {
        return Err(Error::Precision {
            requested: target_digits,
            attainable: (-budget.log10()).floor().max(0.0) as u32,
        });
    }
    Ok((v, budget))
}

/// log Gamma for Re z > 0 by the Stirling series, with recurrence shifts
/// log Gamma(z) = log Gamma(z + n) - sum log(z + k) until |z + n| >= 40 so
/// the asymptotic floor stays below 1e-25.
pub fn log_gamma_dd(z: CDd) -> CDd {
    let mut shift = CDd::ZERO;
    let mut z = z;
    while z.abs().to_f64() < 40.0 {
        shift = shift.add(CDd::new(z.abs().ln(), Dd::atan2(z.im, z.re)));
        z = z.add(CDd::ONE);
    }
    stirling_log_gamma(z).sub(shift)
}

fn stirling_log_gamma(z: CDd) -> CDd {
    let half_ln_two_pi = TWO_PI.ln().mul_f64(0.5);
    let lnz = CDd::new(z.abs().ln(), Dd::atan2(z.im, z.re));
    let mut acc = z
        .sub(CDd::from_f64(0.5, 0.0))
        .mul(lnz)
        .sub(z)
        .add(CDd::new(half_ln_two_pi, Dd::ZERO));
    // asymptotic tail: sum B_{2k} / (2k(2k-1) z^{2k-1})
    let z2inv = CDd::ONE.div(z.mul(z));
    let mut zpow = CDd::ONE.div(z); // z^{1-2k} running
    let mut prev = f64::INFINITY;
    for k in 1..=28 {
        let tk = 2 * k;
        // B_{2k} = (B_{2k}/(2k)!) * (2k)!
        let mut fact = Dd::ONE;
        for v in 2..=tk {
            fact = fact.mul_f64(v as f64);
        }
        let b2k = BERNOULLI_FACT[k - 1].mul(fact);
        let coeff = b2k.div(Dd::from_f64(tk as f64 * (tk as f64 - 1.0)));
        let term = zpow.mul_dd(coeff);
        let mag = term.abs().to_f64();
        if mag > prev {
            break; // asymptotic series bottomed out
        }
        acc = acc.add(term);
        prev = mag;
        zpow = zpow.mul(z2inv);
    }
    acc
}

/// theta(t) = arg Gamma(1/4 + i t/2) - (t/2) ln pi, via Stirling (independent
/// of the asymptotic-series fast path).
pub fn theta_oracle_dd(t: f64) -> Dd {
    let z = CDd::new(Dd::from_f64(0.25), Dd::from_f64(t).mul_f64(0.5));
    let lg = log_gamma_dd(z);
    lg.im.sub(Dd::from_f64(t).mul_f64(0.5).mul(PI.ln()))
}

/// Z(t) through the oracle: Re( e^{i theta} zeta(1/2 + i t) ), in DD.
pub fn hardy_z_oracle(t: f64, digits: u32) -> Result<(f64, f64)> {
    let (zeta, err) = zeta_oracle_dd(CDd::new(Dd::from_f64(0.5), Dd::from_f64(t)), digits)?;
    let th = theta_oracle_dd(t);
    let (s, c) = th.sin_cos();
    let rot = CDd::new(c, s);
    let z = rot.mul(zeta);
    // imaginary part must vanish; it is a free internal consistency check
    debug_assert!(z.im.to_f64().abs() < 1e-9 * (1.0 + z.re.to_f64().abs()) + err * 10.0);
    Ok((z.re.to_f64(), err))
}

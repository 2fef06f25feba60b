//! Double-double arithmetic: an unevaluated sum of two `f64` carrying about
//! 31 significant decimal digits.
//!
//! This is the working precision of the slow verification paths (the
//! Euler-Maclaurin zeta oracle, the Stirling log-gamma used in tests, the
//! correction-coefficient series for the Z function). It shares no code with
//! the fast f64 paths it is used to check.
//!
//! The primitives are the classic error-free transforms (two-sum, two-product
//! via FMA); the elementary functions bootstrap their own constants from
//! rational series so nothing here depends on memorized decimal literals.

use once_cell::sync::Lazy;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn from_u64(x: u64) -> Dd {
        // u64 may exceed 2^53; split exactly.
        let hi = (x >> 32) as f64 * 4294967296.0;
        let lo = (x & 0xffff_ffff) as f64;
        Dd::from_f64(hi).add(Dd::from_f64(lo))
    }

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    #[inline]
    pub fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    #[inline]
    pub fn mul(self, rhs: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, rhs: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs);
        let p2 = p2 + self.lo * rhs;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q1));
        let q2 = r.hi / rhs.hi;
        let r = r.sub(rhs.mul_f64(q2));
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add(Dd::from_f64(q3))
    }

    pub fn recip(self) -> Dd {
        Dd::ONE.div(self)
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        debug_assert!(self.hi > 0.0);
        let x = 1.0 / self.hi.sqrt();
        let y = self.hi * x;
        let y_dd = Dd::from_f64(y);
        let resid = self.sub(y_dd.mul(y_dd));
        y_dd.add(Dd::from_f64(resid.hi * x * 0.5))
    }

    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn lt(self, rhs: Dd) -> bool {
        self.hi < rhs.hi || (self.hi == rhs.hi && self.lo < rhs.lo)
    }

    /// exp(x) by argument reduction x = k ln2 + r, |r| <= ln2 / 2, then Taylor.
    pub fn exp(self) -> Dd {
        let x = self;
        if x.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if x.hi < -709.0 {
            return Dd::ZERO;
        }
        let k = (x.hi / LN2.hi).round();
        let r = x.sub(LN2.mul_f64(k));
        // Taylor on |r| <= 0.347: 0.347^26 / 26! ~ 2e-39
        let mut sum = Dd::ONE;
        let mut term = Dd::ONE;
        for n in 1..=26 {
            term = term.mul(r).div(Dd::from_f64(n as f64));
            sum = sum.add(term);
        }
        // scale by 2^k exactly
        let scale = libm_exp2(k);
        Dd {
            hi: sum.hi * scale,
            lo: sum.lo * scale,
        }
    }

    /// Natural log by Newton iteration on exp, seeded from f64.
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0);
        let mut y = Dd::from_f64(self.hi.ln());
        // y <- y + x * exp(-y) - 1, doubling correct digits each pass
        for _ in 0..2 {
            let e = self.mul(y.neg().exp());
            y = y.add(e).sub(Dd::ONE);
        }
        y
    }

    /// Reduce to [-pi, pi) modulo 2*pi. Exact integer multiples keep the
    /// reduction error near |x| * 2^-106.
    fn mod_two_pi(self) -> Dd {
        let n = (self.hi / TWO_PI.hi).round();
        self.sub(TWO_PI.mul_f64(n))
    }

    pub fn sin_cos(self) -> (Dd, Dd) {
        let r = self.mod_two_pi();
        // reduce to |u| <= pi/4 via quadrant k of pi/2
        let k = (r.hi / FRAC_PI_2.hi).round();
        let u = r.sub(FRAC_PI_2.mul_f64(k));
        let (s, c) = sin_cos_taylor(u);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, s.neg()),
            2 => (s.neg(), c.neg()),
            _ => (c.neg(), s),
        }
    }

    pub fn sin(self) -> Dd {
        self.sin_cos().0
    }

    pub fn cos(self) -> Dd {
        self.sin_cos().1
    }

    /// atan2 refined from the f64 seed by one correction step.
    pub fn atan2(y: Dd, x: Dd) -> Dd {
        let th0 = y.hi.atan2(x.hi);
        let th = Dd::from_f64(th0);
        let (s, c) = th.sin_cos();
        // e = (y cos - x sin) / (x cos + y sin); th += atan(e) ~ e for tiny e
        let num = y.mul(c).sub(x.mul(s));
        let den = x.mul(c).add(y.mul(s));
        th.add(num.div(den))
    }
}

fn libm_exp2(k: f64) -> f64 {
    // k is integral and |k| < 1100 here
    f64::powi(2.0, k as i32)
}

fn sin_cos_taylor(u: Dd) -> (Dd, Dd) {
    // |u| <= pi/4; sin to x^31, cos to x^30: (pi/4)^31 / 31! ~ 7e-37
    let x2 = u.mul(u);
    let mut s = Dd::ONE;
    let mut term = Dd::ONE;
    // sin(u)/u = sum (-1)^m x2^m / (2m+1)!
    for m in 1..=15 {
        term = term
            .mul(x2)
            .neg()
            .div(Dd::from_f64((2 * m) as f64 * (2 * m + 1) as f64));
        s = s.add(term);
    }
    let sin = u.mul(s);
    let mut c = Dd::ONE;
    term = Dd::ONE;
    for m in 1..=15 {
        term = term
            .mul(x2)
            .neg()
            .div(Dd::from_f64((2 * m - 1) as f64 * (2 * m) as f64));
        c = c.add(term);
    }
    (sin, c)
}

/// ln 2 = 2 atanh(1/3), summed from rationals.
pub static LN2: Lazy<Dd> = Lazy::new(|| {
    let third = Dd::from_f64(1.0).div(Dd::from_f64(3.0));
    let t2 = third.mul(third);
    let mut term = third;
    let mut sum = Dd::ZERO;
    for k in 0..40 {
        sum = sum.add(term.div(Dd::from_f64((2 * k + 1) as f64)));
        term = term.mul(t2);
    }
    sum.mul_f64(2.0)
});

fn atan_recip(n: u32) -> Dd {
    // atan(1/n) by Taylor, n >= 5
    let x = Dd::from_f64(1.0).div(Dd::from_f64(n as f64));
    let x2 = x.mul(x).neg();
    let mut term = x;
    let mut sum = Dd::ZERO;
    let mut k = 0u32;
    loop {
        sum = sum.add(term.div(Dd::from_f64((2 * k + 1) as f64)));
        term = term.mul(x2);
        k += 1;
        if term.hi.abs() < 1e-36 {
            break;
        }
    }
    sum
}

/// pi from Machin's formula.
pub static PI: Lazy<Dd> = Lazy::new(|| {
    atan_recip(5)
        .mul_f64(16.0)
        .sub(atan_recip(239).mul_f64(4.0))
});

pub static TWO_PI: Lazy<Dd> = Lazy::new(|| PI.mul_f64(2.0));
pub static FRAC_PI_2: Lazy<Dd> = Lazy::new(|| PI.mul_f64(0.5));

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: CDd = CDd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> CDd {
        CDd { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> CDd {
        CDd {
            re: Dd::from_f64(re),
            im: Dd::from_f64(im),
        }
    }

    pub fn add(self, rhs: CDd) -> CDd {
        CDd {
            re: self.re.add(rhs.re),
            im: self.im.add(rhs.im),
        }
    }

    pub fn sub(self, rhs: CDd) -> CDd {
        CDd {
            re: self.re.sub(rhs.re),
            im: self.im.sub(rhs.im),
        }
    }

    pub fn neg(self) -> CDd {
        CDd {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn mul(self, rhs: CDd) -> CDd {
        CDd {
            re: self.re.mul(rhs.re).sub(self.im.mul(rhs.im)),
            im: self.re.mul(rhs.im).add(self.im.mul(rhs.re)),
        }
    }

    pub fn mul_dd(self, rhs: Dd) -> CDd {
        CDd {
            re: self.re.mul(rhs),
            im: self.im.mul(rhs),
        }
    }

    pub fn div(self, rhs: CDd) -> CDd {
        let den = rhs.re.mul(rhs.re).add(rhs.im.mul(rhs.im));
        let num = self.mul(rhs.conj());
        CDd {
            re: num.re.div(den),
            im: num.im.div(den),
        }
    }

    pub fn conj(self) -> CDd {
        CDd {
            re: self.re,
            im: self.im.neg(),
        }
    }

    pub fn abs(self) -> Dd {
        self.re.mul(self.re).add(self.im.mul(self.im)).sqrt()
    }

    pub fn exp(self) -> CDd {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        CDd {
            re: m.mul(c),
            im: m.mul(s),
        }
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_f64_seeds() {
        assert!((PI.hi - std::f64::consts::PI).abs() < 1e-15);
        assert!((LN2.to_f64() - std::f64::consts::LN_2).abs() < 1e-16);
        assert!((TWO_PI.to_f64() - std::f64::consts::TAU).abs() < 1e-15);
    }

    #[test]
    fn arithmetic_identities() {
        let a = Dd::from_f64(1.0).div(Dd::from_f64(3.0));
        let b = a.mul_f64(3.0);
        assert!((b.sub(Dd::ONE)).to_f64().abs() < 1e-31);

        let s = Dd::from_f64(2.0).sqrt();
        let back = s.mul(s).sub(Dd::from_f64(2.0));
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[0.1, 1.0, 2.5, 10.0, 137.0, 1e-3] {
            let d = Dd::from_f64(x);
            let r = d.ln().exp().sub(d);
            assert!(
                r.to_f64().abs() < 1e-28 * x.max(1.0),
                "roundtrip failed at {x}: {}",
                r.to_f64()
            );
        }
        // ln(e) vs exp(1)
        let e = Dd::ONE.exp();
        assert!((e.ln().sub(Dd::ONE)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn sincos_pythagorean_and_values() {
        for &x in &[0.3, 1.0, 2.0, 10.0, 100.0, 12345.678] {
            let (s, c) = Dd::from_f64(x).sin_cos();
            let one = s.mul(s).add(c.mul(c));
            assert!((one.sub(Dd::ONE)).to_f64().abs() < 1e-29);
            assert!((s.to_f64() - x.sin()).abs() < 1e-13);
            assert!((c.to_f64() - x.cos()).abs() < 1e-13);
        }
        // sin(pi/6) = 1/2
        let s = PI.div(Dd::from_f64(6.0)).sin();
        assert!((s.sub(Dd::from_f64(0.5))).to_f64().abs() < 1e-30);
    }

    #[test]
    fn atan2_quadrants() {
        let v = Dd::atan2(Dd::from_f64(1.0), Dd::from_f64(1.0));
        let expect = PI.div(Dd::from_f64(4.0));
        assert!((v.sub(expect)).to_f64().abs() < 1e-30);
        let v2 = Dd::atan2(Dd::from_f64(1.0), Dd::from_f64(-1.0));
        let expect2 = PI.mul_f64(0.75);
        assert!((v2.sub(expect2)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn complex_exp_matches_euler() {
        let z = CDd::from_f64(0.0, 1.0);
        let e = z.mul_dd(*super::PI).exp();
        assert!((e.re.to_f64() + 1.0).abs() < 1e-30);
        assert!(e.im.to_f64().abs() < 1e-30);
    }
}

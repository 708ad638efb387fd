//! Base-2 logarithm of a mantissa in `[1, 2)` carried to about 104 bits in
//! double-double arithmetic, with an arbitrary-precision fallback for wider
//! requests.

use astro_float::{BigFloat, Consts, RoundingMode};

/// Bits delivered by the double-double path.
pub const DOUBLE_DOUBLE_BITS: u32 = 104;

/// `ln 2` split into a leading double and its correction.
const LN2_HI: f64 = std::f64::consts::LN_2;
const LN2_LO: f64 = 2.319_046_813_846_299_6e-17;

#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: err }
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl Dd {
    fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::from_f64(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Dd::from_f64(-q2)));
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2).add(Dd::from_f64(q3))
    }
}

/// `log2(m)` for `m` in `[1, 2)`, rounded to the nearest double.
///
/// Uses `ln m = 2 atanh(s)` with `s = (m - 1) / (m + 1) <= 1/3`; 36 odd terms
/// push the truncation error below `2^-110`.
pub fn log2_mantissa(m: f64) -> f64 {
    debug_assert!((1.0..2.0).contains(&m));
    if m == 1.0 {
        return 0.0;
    }
    let num = Dd::from_f64(m - 1.0);
    let den = two_sum(m, 1.0);
    let s = num.div(den);
    let s2 = s.mul(s);

    let mut acc = Dd::from_f64(0.0);
    for j in (0..36).rev() {
        let inv = Dd::from_f64(1.0).div(Dd::from_f64((2 * j + 1) as f64));
        acc = acc.mul(s2).add(inv);
    }
    let ln = s.mul(acc).mul(Dd::from_f64(2.0));
    let r = ln.div(Dd { hi: LN2_HI, lo: LN2_LO });
    r.hi + r.lo
}

/// `log2(numerator / 2^exponent)` at `bits` of working precision, rounded to
/// the nearest double. Intended for requests wider than the double-double
/// path offers.
pub fn log2_ratio_wide(numerator: u64, exponent: u32, bits: u32) -> f64 {
    let p = bits as usize + 8;
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().expect("astro-float constants cache");
    let ln2 = cc.ln_2(p, rm);
    let x = BigFloat::from_u64(numerator, p);
    let l = x.ln(p, rm, &mut cc).div(&ln2, p, rm);
    let frac = l.sub(&BigFloat::from_u64(exponent as u64, p), p, rm);
    bigfloat_to_f64(&frac)
}

fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    // The decimal rendering carries every bit; parsing rounds correctly.
    x.to_string().parse::<f64>().unwrap_or(f64::NAN)
}

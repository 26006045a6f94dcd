//! Double-double ("compensated") arithmetic used where plain f64 loses to
//! catastrophic cancellation, notably the normal-ordered displacement route
//! whose triangular Taylor factors sum alternating terms with condition
//! numbers around 1e12 at moderate displacements.
//!
//! The representation is the unevaluated sum `hi + lo` with |lo| <= ulp(hi)/2,
//! giving ~31 significant decimal digits. Only the handful of operations the
//! crate needs are implemented.

/// A double-double number `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    // requires |a| >= |b|
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd { hi: p, lo: a.mul_add(b, -p) }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let s = two_sum(self.hi, other.hi);
        let lo = s.lo + self.lo + other.lo;
        quick_two_sum(s.hi, lo)
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let p = two_prod(self.hi, other.hi);
        let lo = p.lo + self.hi * other.lo + self.lo * other.hi;
        quick_two_sum(p.hi, lo)
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Dd::from_f64(q1)));
        let q2 = r.hi / other.hi;
        let r2 = r.sub(other.mul(Dd::from_f64(q2)));
        let q3 = r2.hi / other.hi;
        quick_two_sum(q1, q2).add(Dd::from_f64(q3))
    }

    #[inline]
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        let s1 = self.hi.sqrt();
        let e = self.sub(two_prod(s1, s1));
        let s2 = e.hi / (2.0 * s1);
        quick_two_sum(s1, s2)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Complex double-double: real and imaginary parts as [`Dd`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct DdC {
    pub re: Dd,
    pub im: Dd,
}

impl DdC {
    pub const ZERO: DdC = DdC { re: Dd::ZERO, im: Dd::ZERO };

    #[inline]
    pub fn from_f64(re: f64, im: f64) -> DdC {
        DdC { re: Dd::from_f64(re), im: Dd::from_f64(im) }
    }

    #[inline]
    pub fn add(self, other: DdC) -> DdC {
        DdC { re: self.re.add(other.re), im: self.im.add(other.im) }
    }

    #[inline]
    pub fn mul(self, other: DdC) -> DdC {
        DdC {
            re: self.re.mul(other.re).sub(self.im.mul(other.im)),
            im: self.re.mul(other.im).add(self.im.mul(other.re)),
        }
    }

    #[inline]
    pub fn scale(self, s: Dd) -> DdC {
        DdC { re: self.re.mul(s), im: self.im.mul(s) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_recovers_cancelled_digits() {
        // (1 + 1e-20) - 1 is exactly 1e-20 in dd, zero in f64
        let a = Dd::from_f64(1.0).add(Dd { hi: 1e-20, lo: 0.0 });
        let d = a.sub(Dd::from_f64(1.0));
        assert_eq!(d.to_f64(), 1e-20);
    }

    #[test]
    fn dd_div_and_sqrt() {
        let x = Dd::from_f64(2.0);
        let r = x.sqrt();
        let back = r.mul(r).sub(x);
        assert!(back.to_f64().abs() < 1e-30);
        let q = Dd::from_f64(1.0).div(Dd::from_f64(3.0));
        let resid = q.mul(Dd::from_f64(3.0)).sub(Dd::from_f64(1.0));
        assert!(resid.to_f64().abs() < 1e-30);
    }
}

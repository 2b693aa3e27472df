//! Rational functions `num / den` used for exact symbolic comparison and
//! denominator clearing.

use num_traits::{One, Signed, ToPrimitive};

use super::expr::{make_mul, Expr, Symbol, Q};
use super::poly::{Monomial, Poly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    pub num: Poly,
    pub den: Poly,
}

impl RatFn {
    pub fn from_poly(p: Poly) -> Self {
        RatFn { num: p, den: Poly::one() }
    }

    pub fn zero() -> Self {
        RatFn::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RatFn::from_poly(Poly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Fails on non-integer exponents.
    pub fn from_expr(e: &Expr) -> Option<RatFn> {
        match e {
            Expr::Num(n) => Some(RatFn::from_poly(Poly::constant(n.clone()))),
            Expr::Sym(s) => Some(RatFn::from_poly(Poly::var(s.clone()))),
            Expr::Add(ts) => {
                let mut acc = RatFn::zero();
                for t in ts {
                    acc = acc.add(&RatFn::from_expr(t)?);
                }
                Some(acc)
            }
            Expr::Mul(fs) => {
                let mut acc = RatFn::one();
                for f in fs {
                    acc = acc.mul(&RatFn::from_expr(f)?);
                }
                Some(acc)
            }
            Expr::Pow(b, ex) => {
                let k = ex.as_num()?;
                if !k.is_integer() {
                    return None;
                }
                let k = k.to_integer();
                let base = RatFn::from_expr(b)?;
                let mag = k.abs().to_u32()?;
                let p = RatFn { num: base.num.pow(mag), den: base.den.pow(mag) };
                if k.is_negative() {
                    if p.num.is_zero() {
                        return None;
                    }
                    Some(RatFn { num: p.den, den: p.num }.reduced())
                } else {
                    Some(p)
                }
            }
        }
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        if self.den == o.den {
            return RatFn { num: self.num.add(&o.num), den: self.den.clone() }.reduced();
        }
        RatFn { num: self.num.mul(&o.den).add(&o.num.mul(&self.den)), den: self.den.mul(&o.den) }.reduced()
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        RatFn { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }.reduced()
    }

    pub fn div(&self, o: &RatFn) -> Option<RatFn> {
        if o.num.is_zero() {
            return None;
        }
        Some(RatFn { num: self.num.mul(&o.den), den: self.den.mul(&o.num) }.reduced())
    }

    /// Cheap normalization: strips shared content and divides out the
    /// denominator when it divides the numerator exactly.
    pub fn reduced(self) -> RatFn {
        if self.num.is_zero() {
            return RatFn::zero();
        }
        let (cn, mn, pn) = self.num.content_split();
        let (cd, md, pd) = self.den.content_split();
        let g = mn.gcd(&md);
        let mn = mn.div(&g).unwrap_or_else(Monomial::one);
        let md = md.div(&g).unwrap_or_else(Monomial::one);
        let mut sign = Q::one();
        if let Some((_, c)) = pd.leading() {
            if c.is_negative() {
                sign = -sign;
            }
        }
        let pd = pd.scale(&sign);
        let coeff = cn / cd * sign;
        let (pn, pd) = if pd.is_one() {
            (pn, pd)
        } else if let Some(qt) = pn.div_exact(&pd) {
            (qt, Poly::one())
        } else if pn == pd {
            (Poly::one(), Poly::one())
        } else {
            (pn, pd)
        };
        RatFn { num: pn.mul_term(&coeff, &mn), den: pd.mul_term(&Q::one(), &md) }
    }

    /// Exact equality by cross-multiplication.
    pub fn equals(&self, o: &RatFn) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    pub fn to_expr(&self) -> Expr {
        make_mul(vec![self.num.to_expr(), self.den.to_expr().recip()])
    }

    pub fn subst(&self, s: &Symbol, v: &RatFn) -> RatFn {
        let dn = self.num.degree_in(s);
        let dd = self.den.degree_in(s);
        let d = dn.max(dd);
        // Homogenize against v.den^d so each side stays polynomial.
        let num = homogenized(&self.num, s, v, d);
        let den = homogenized(&self.den, s, v, d);
        RatFn { num, den }.reduced()
    }
}

fn homogenized(p: &Poly, s: &Symbol, v: &RatFn, d: u32) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let k = m.degree_in(s);
        let rest = Monomial::from_pairs(m.vars().iter().filter(|(x, _)| x != s).cloned());
        let piece = v.num.pow(k).mul(&v.den.pow(d - k)).mul_term(c, &rest);
        out = out.add(&piece);
    }
    out
}

/// Structural check that two expressions denote the same rational function.
/// Returns `None` when either side has non-integer exponents.
pub fn rational_equal(a: &Expr, b: &Expr) -> Option<bool> {
    Some(RatFn::from_expr(a)?.equals(&RatFn::from_expr(b)?))
}

//! Sparse multivariate polynomials with rational coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::expr::{make_add, make_mul, Expr, Symbol, Q};

/// A power product; variables sorted, exponents positive.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    vars: Vec<(Symbol, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { vars: Vec::new() }
    }

    pub fn var(s: Symbol, k: u32) -> Self {
        if k == 0 {
            Monomial::one()
        } else {
            Monomial { vars: vec![(s, k)] }
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Symbol, u32)>) -> Self {
        let mut m: BTreeMap<Symbol, u32> = BTreeMap::new();
        for (s, k) in pairs {
            *m.entry(s).or_insert(0) += k;
        }
        Monomial { vars: m.into_iter().filter(|(_, k)| *k > 0).collect() }
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[(Symbol, u32)] {
        &self.vars
    }

    pub fn degree_in(&self, s: &Symbol) -> u32 {
        self.vars.iter().find(|(v, _)| v == s).map(|(_, k)| *k).unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.vars.iter().map(|(_, k)| k).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_pairs(self.vars.iter().cloned().chain(other.vars.iter().cloned()))
    }

    /// `self / other` if every exponent stays non-negative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = BTreeMap::new();
        for (s, k) in &self.vars {
            out.insert(s.clone(), *k as i64);
        }
        for (s, k) in &other.vars {
            let e = out.entry(s.clone()).or_insert(0);
            *e -= *k as i64;
            if *e < 0 {
                return None;
            }
        }
        Some(Monomial { vars: out.into_iter().filter(|(_, k)| *k > 0).map(|(s, k)| (s, k as u32)).collect() })
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let vars = self
            .vars
            .iter()
            .filter_map(|(s, k)| {
                let j = other.degree_in(s);
                let m = (*k).min(j);
                (m > 0).then(|| (s.clone(), m))
            })
            .collect();
        Monomial { vars }
    }

    pub fn to_expr(&self) -> Expr {
        make_mul(
            self.vars
                .iter()
                .map(|(s, k)| {
                    if *k == 1 {
                        Expr::Sym(s.clone())
                    } else {
                        Expr::Pow(Box::new(Expr::Sym(s.clone())), Box::new(Expr::int(*k as i64)))
                    }
                })
                .collect(),
        )
    }

    pub fn eval<F: Fn(&Symbol) -> Option<f64>>(&self, env: &F) -> Option<f64> {
        let mut acc = 1.0;
        for (s, k) in &self.vars {
            acc *= env(s)?.powi(*k as i32);
        }
        Some(acc)
    }
}

/// Lexicographic order; the smallest symbol has the highest priority.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.vars, &other.vars);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        o => return o,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Q) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn term(c: Q, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn var(s: Symbol) -> Self {
        Poly::term(Q::one(), Monomial::var(s, 1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::one()).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn variables(&self) -> BTreeSet<Symbol> {
        self.terms.keys().flat_map(|m| m.vars.iter().map(|(s, _)| s.clone())).collect()
    }

    pub fn degree_in(&self, s: &Symbol) -> u32 {
        self.terms.keys().map(|m| m.degree_in(s)).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_term(&self, c: &Q, mono: &Monomial) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.mul(mono), k * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        out
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            rem = rem.sub(&divisor.mul_term(&qc, &qm));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Splits `self = c * mono * prim` with `c > 0` the gcd of the
    /// coefficients and `mono` the gcd of the monomials.
    pub fn content_split(&self) -> (Q, Monomial, Poly) {
        if self.is_zero() {
            return (Q::one(), Monomial::one(), Poly::zero());
        }
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        let mut mono: Option<Monomial> = None;
        for (m, c) in &self.terms {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
            mono = Some(match mono {
                None => m.clone(),
                Some(g) => g.gcd(m),
            });
        }
        let c = Q::new(num.abs(), den);
        let mono = mono.unwrap_or_default();
        let inv = Q::one() / &c;
        let prim = Poly {
            terms: self.terms.iter().map(|(m, k)| (m.div(&mono).expect("gcd divides"), k * &inv)).collect(),
        };
        (c, mono, prim)
    }

    pub fn eval<F: Fn(&Symbol) -> Option<f64>>(&self, env: &F) -> Option<f64> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            acc += c.to_f64()? * m.eval(env)?;
        }
        Some(acc)
    }

    pub fn subst(&self, s: &Symbol, value: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let k = m.degree_in(s);
            let rest = Monomial { vars: m.vars.iter().filter(|(v, _)| v != s).cloned().collect() };
            let piece = value.pow(k).mul_term(c, &rest);
            out = out.add(&piece);
        }
        out
    }

    pub fn to_expr(&self) -> Expr {
        let mut ts = Vec::new();
        for (m, c) in &self.terms {
            ts.push(make_mul(vec![Expr::Num(c.clone()), m.to_expr()]));
        }
        make_add(ts)
    }

    /// Converts a sum-of-products expression with non-negative integer
    /// exponents into a polynomial.
    pub fn from_expr(e: &Expr) -> Option<Poly> {
        match e {
            Expr::Num(n) => Some(Poly::constant(n.clone())),
            Expr::Sym(s) => Some(Poly::var(s.clone())),
            Expr::Add(ts) => {
                let mut acc = Poly::zero();
                for t in ts {
                    acc = acc.add(&Poly::from_expr(t)?);
                }
                Some(acc)
            }
            Expr::Mul(fs) => {
                let mut acc = Poly::one();
                for f in fs {
                    acc = acc.mul(&Poly::from_expr(f)?);
                }
                Some(acc)
            }
            Expr::Pow(b, ex) => {
                let k = ex.as_num()?;
                if !k.is_integer() || k.is_negative() {
                    return None;
                }
                let k = k.to_integer().to_u32()?;
                Some(Poly::from_expr(b)?.pow(k))
            }
        }
    }

    /// True when every coefficient is positive.
    pub fn all_positive(&self) -> bool {
        !self.terms.is_empty() && self.terms.values().all(|c| c.is_positive())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::expr::q as qi;

    fn v(n: &str) -> Poly {
        Poly::var(Symbol::new(n))
    }

    #[test]
    fn exact_division() {
        let a = v("a").add(&v("b"));
        let c = v("c").add(&Poly::constant(qi(2)));
        let p = a.mul(&c);
        assert_eq!(p.div_exact(&a), Some(c.clone()));
        assert_eq!(p.div_exact(&v("d")), None);
        assert_eq!(p.add(&Poly::one()).div_exact(&a), None);
    }

    #[test]
    fn content_split_pulls_gcds() {
        let p = v("a").mul(&v("b")).scale(&qi(4)).add(&v("a").mul(&v("c")).scale(&qi(6)));
        let (c, m, prim) = p.content_split();
        assert_eq!(c, qi(2));
        assert_eq!(m, Monomial::var(Symbol::new("a"), 1));
        assert_eq!(prim, v("b").scale(&qi(2)).add(&v("c").scale(&qi(3))));
    }

    #[test]
    fn expr_round_trip() {
        let p = v("x").pow(3).add(&v("y").scale(&qi(-2)));
        assert_eq!(Poly::from_expr(&p.to_expr()), Some(p));
    }

    #[test]
    fn monomial_order_is_lex() {
        let x = Symbol::new("x");
        let y = Symbol::new("y");
        assert!(Monomial::var(x.clone(), 1) > Monomial::var(y.clone(), 5));
        assert!(Monomial::var(x, 2) > Monomial::one());
        assert!(Monomial::var(y, 1) > Monomial::one());
    }
}

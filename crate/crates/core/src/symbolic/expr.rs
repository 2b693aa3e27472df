//! Symbolic expression trees over named positive quantities.
//!
//! Every symbol in this crate stands for a strictly positive real (a
//! concentration, a rate constant, a named constant or a free parameter), so
//! rewrites such as `(a*b)^r = a^r * b^r` and `(a^r)^s = a^(r*s)` are applied
//! freely. Sums are never expanded and quotients of sums are never cancelled
//! except through the polynomial-content normalization in [`make_mul`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::Poly;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Interned identifier. Ordering is "natural": `k2 < k10`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (ab, ad) = split_numeric_suffix(a);
    let (bb, bd) = split_numeric_suffix(b);
    match ab.cmp(bb) {
        Ordering::Equal => {}
        o => return o,
    }
    match (ad.is_empty(), bd.is_empty()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => {
            let at = ad.trim_start_matches('0');
            let bt = bd.trim_start_matches('0');
            at.len().cmp(&bt.len()).then_with(|| at.cmp(bt)).then_with(|| ad.cmp(bd))
        }
    }
}

/// Splits at the first digit run that continues to the end, e.g. `k12p` keeps
/// `k12p` whole while `x28` splits into `("x", "28")`.
fn split_numeric_suffix(s: &str) -> (&str, &str) {
    let idx = s
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_digit())
        .last()
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    s.split_at(idx)
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Expr {
    Num(Q),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(Symbol),
    #[error("division by zero")]
    ZeroDenominator,
    #[error("non-finite value")]
    NonFinite,
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Num(q(n))
    }

    pub fn rational(r: Q) -> Expr {
        Expr::Num(r)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(Symbol::new(name))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(n) if n.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(n) if n.is_one())
    }

    pub fn as_num(&self) -> Option<&Q> {
        match self {
            Expr::Num(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&Symbol> {
        match self {
            Expr::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn pow(self, exp: Expr) -> Expr {
        make_pow(self, exp)
    }

    pub fn powi(self, exp: i64) -> Expr {
        make_pow(self, Expr::int(exp))
    }

    pub fn powq(self, exp: Q) -> Expr {
        make_pow(self, Expr::Num(exp))
    }

    pub fn recip(self) -> Expr {
        self.powi(-1)
    }

    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        make_add(terms.into_iter().collect())
    }

    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Expr {
        make_mul(factors.into_iter().collect())
    }

    /// Full bottom-up normalization.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Num(_) | Expr::Sym(_) => self.clone(),
            Expr::Add(ts) => make_add(ts.iter().map(Expr::simplify).collect()),
            Expr::Mul(fs) => make_mul(fs.iter().map(Expr::simplify).collect()),
            Expr::Pow(b, e) => make_pow(b.simplify(), e.simplify()),
        }
    }

    pub fn subst(&self, map: &HashMap<Symbol, Expr>) -> Expr {
        if map.is_empty() {
            return self.clone();
        }
        self.subst_raw(map).simplify()
    }

    fn subst_raw(&self, map: &HashMap<Symbol, Expr>) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Sym(s) => map.get(s).cloned().unwrap_or_else(|| self.clone()),
            Expr::Add(ts) => Expr::Add(ts.iter().map(|t| t.subst_raw(map)).collect()),
            Expr::Mul(fs) => Expr::Mul(fs.iter().map(|f| f.subst_raw(map)).collect()),
            Expr::Pow(b, e) => Expr::Pow(Box::new(b.subst_raw(map)), Box::new(e.subst_raw(map))),
        }
    }

    pub fn subst_one(&self, sym: &Symbol, value: &Expr) -> Expr {
        let mut m = HashMap::new();
        m.insert(sym.clone(), value.clone());
        self.subst(&m)
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|x| x.collect_symbols(out)),
            Expr::Pow(b, e) => {
                b.collect_symbols(out);
                e.collect_symbols(out);
            }
        }
    }

    pub fn contains(&self, sym: &Symbol) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Sym(s) => s == sym,
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().any(|x| x.contains(sym)),
            Expr::Pow(b, e) => b.contains(sym) || e.contains(sym),
        }
    }

    pub fn eval<F>(&self, env: &F) -> Result<f64, EvalError>
    where
        F: Fn(&Symbol) -> Option<f64>,
    {
        let v = match self {
            Expr::Num(n) => n.to_f64().ok_or(EvalError::NonFinite)?,
            Expr::Sym(s) => env(s).ok_or_else(|| EvalError::Unbound(s.clone()))?,
            Expr::Add(ts) => {
                let mut acc = 0.0;
                for t in ts {
                    acc += t.eval(env)?;
                }
                acc
            }
            Expr::Mul(fs) => {
                let mut acc = 1.0;
                for f in fs {
                    acc *= f.eval(env)?;
                }
                acc
            }
            Expr::Pow(b, e) => {
                let bv = b.eval(env)?;
                let ev = e.eval(env)?;
                if bv == 0.0 && ev < 0.0 {
                    return Err(EvalError::ZeroDenominator);
                }
                match e.as_num().filter(|n| n.is_integer()).and_then(|n| n.to_i32()) {
                    Some(i) => bv.powi(i),
                    None => bv.powf(ev),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// Evaluates with a map environment.
    pub fn eval_map(&self, env: &HashMap<Symbol, f64>) -> Result<f64, EvalError> {
        self.eval(&|s: &Symbol| env.get(s).copied())
    }

    /// Splits a (simplified) expression into a rational coefficient and a list
    /// of `(base, exponent)` factors.
    pub fn factors(&self) -> (Q, Vec<(Expr, Expr)>) {
        match self {
            Expr::Num(n) => (n.clone(), vec![]),
            Expr::Mul(fs) => {
                let mut c = Q::one();
                let mut out = Vec::new();
                for f in fs {
                    match f {
                        Expr::Num(n) => c *= n,
                        Expr::Pow(b, e) => out.push(((**b).clone(), (**e).clone())),
                        other => out.push((other.clone(), Expr::one())),
                    }
                }
                (c, out)
            }
            Expr::Pow(b, e) => (Q::one(), vec![((**b).clone(), (**e).clone())]),
            other => (Q::one(), vec![(other.clone(), Expr::one())]),
        }
    }

    /// If this expression has the shape `c * sym^a` where `c` does not contain
    /// `sym` and `a` is a nonzero rational, returns `(c, a)`.
    pub fn isolate_power_of(&self, sym: &Symbol) -> Option<(Expr, Q)> {
        let (coeff, fs) = self.factors();
        let mut exponent: Option<Q> = None;
        let mut rest = vec![Expr::Num(coeff)];
        for (b, e) in fs {
            if b.as_sym() == Some(sym) {
                let a = e.as_num()?.clone();
                if exponent.is_some() {
                    return None;
                }
                exponent = Some(a);
            } else {
                if b.contains(sym) || e.contains(sym) {
                    return None;
                }
                rest.push(make_pow(b, e));
            }
        }
        let a = exponent.filter(|a| !a.is_zero())?;
        Some((make_mul(rest), a))
    }

    /// Conservative sign certificate: every symbol denotes a positive quantity,
    /// so sums and products of positive pieces are positive.
    pub fn is_syntactically_positive(&self) -> bool {
        match self {
            Expr::Num(n) => n.is_positive(),
            Expr::Sym(_) => true,
            Expr::Add(ts) => ts.iter().all(Expr::is_syntactically_positive),
            Expr::Mul(fs) => fs.iter().all(Expr::is_syntactically_positive),
            Expr::Pow(b, _) => b.is_syntactically_positive(),
        }
    }

    /// Splits off the numeric sign of a term: `-3*a` gives `(-3, a)`.
    pub fn split_coeff(&self) -> (Q, Expr) {
        match self {
            Expr::Num(n) => (n.clone(), Expr::one()),
            Expr::Mul(fs) => match fs.first() {
                Some(Expr::Num(n)) => {
                    let rest: Vec<Expr> = fs[1..].to_vec();
                    let rest = if rest.len() == 1 { rest.into_iter().next().unwrap() } else { Expr::Mul(rest) };
                    (n.clone(), rest)
                }
                _ => (Q::one(), self.clone()),
            },
            _ => (Q::one(), self.clone()),
        }
    }

    /// Terms of a sum (a non-sum is a single term).
    pub fn terms(&self) -> Vec<Expr> {
        match self {
            Expr::Add(ts) => ts.clone(),
            Expr::Num(n) if n.is_zero() => vec![],
            other => vec![other.clone()],
        }
    }

    pub fn to_poly(&self) -> Option<Poly> {
        Poly::from_expr(self)
    }

    /// Largest node count; used to keep reports readable.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Sym(_) => 1,
            Expr::Add(xs) | Expr::Mul(xs) => 1 + xs.iter().map(Expr::size).sum::<usize>(),
            Expr::Pow(b, e) => 1 + b.size() + e.size(),
        }
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::Sym(s)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        make_add(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        make_add(vec![self, -rhs])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        make_mul(vec![Expr::int(-1), self])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        make_mul(vec![self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        make_mul(vec![self, rhs.recip()])
    }
}

/// Builds a normalized sum from normalized terms.
pub fn make_add(terms: Vec<Expr>) -> Expr {
    let mut flat = Vec::with_capacity(terms.len());
    for t in terms {
        match t {
            Expr::Add(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    let mut constant = Q::zero();
    let mut like: BTreeMap<Expr, Q> = BTreeMap::new();
    for t in flat {
        let (c, rest) = t.split_coeff();
        if rest.is_one() {
            constant += c;
        } else {
            *like.entry(rest).or_insert_with(Q::zero) += c;
        }
    }
    let mut out = Vec::new();
    if !constant.is_zero() {
        out.push(Expr::Num(constant));
    }
    for (rest, c) in like {
        if c.is_zero() {
            continue;
        }
        out.push(scale_term(c, rest));
    }
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::Add(out),
    }
}

fn scale_term(c: Q, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    match rest {
        Expr::Mul(mut fs) => {
            fs.insert(0, Expr::Num(c));
            Expr::Mul(fs)
        }
        other => Expr::Mul(vec![Expr::Num(c), other]),
    }
}

fn add_exponents(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
        _ => make_add(vec![a, b]),
    }
}

/// Builds a normalized product from normalized factors.
///
/// Polynomial bases raised to rational powers are split into numeric content,
/// monomial content and a primitive part, so that equal primitive polynomials
/// coming from different places combine and cancel.
pub fn make_mul(factors: Vec<Expr>) -> Expr {
    let mut coeff = Q::one();
    let mut bases: BTreeMap<Expr, Expr> = BTreeMap::new();
    let mut stack: Vec<(Expr, Expr)> = Vec::new();
    for f in factors {
        match f {
            Expr::Mul(inner) => {
                for g in inner {
                    push_factor(g, &mut coeff, &mut stack);
                }
            }
            other => push_factor(other, &mut coeff, &mut stack),
        }
    }
    while let Some((base, exp)) = stack.pop() {
        if let (Expr::Add(_), Expr::Num(e)) = (&base, &exp) {
            if let Some(p) = base.to_poly() {
                let (c, mono, prim) = p.content_split();
                let prim_is_base = c.is_one() && mono.is_one();
                if !prim_is_base {
                    if e.is_integer() {
                        coeff *= num_traits::pow::Pow::pow(&c, e.to_integer());
                    } else {
                        stack.push((Expr::Num(c), Expr::Num(e.clone())));
                    }
                    for (s, k) in mono.vars() {
                        stack.push((Expr::Sym(s.clone()), Expr::Num(e * q(*k as i64))));
                    }
                    if prim.is_one() {
                        continue;
                    }
                    stack.push((prim.to_expr(), exp));
                    continue;
                }
            }
        }
        match bases.get_mut(&base) {
            Some(existing) => {
                let cur = std::mem::replace(existing, Expr::zero());
                *existing = add_exponents(cur, exp);
            }
            None => {
                bases.insert(base, exp);
            }
        }
    }
    if coeff.is_zero() {
        return Expr::zero();
    }
    let mut out = Vec::new();
    for (base, exp) in bases {
        if exp.is_zero() {
            continue;
        }
        if let (Expr::Num(b), Expr::Num(e)) = (&base, &exp) {
            if e.is_integer() {
                coeff *= num_traits::pow::Pow::pow(b, e.to_integer());
                continue;
            }
        }
        if exp.is_one() {
            out.push(base);
        } else {
            out.push(Expr::Pow(Box::new(base), Box::new(exp)));
        }
    }
    if out.is_empty() {
        return Expr::Num(coeff);
    }
    if coeff.is_one() && out.len() == 1 {
        return out.pop().unwrap();
    }
    if !coeff.is_one() {
        out.insert(0, Expr::Num(coeff));
    }
    Expr::Mul(out)
}

fn push_factor(f: Expr, coeff: &mut Q, stack: &mut Vec<(Expr, Expr)>) {
    match f {
        Expr::Num(n) => *coeff *= n,
        Expr::Pow(b, e) => stack.push((*b, *e)),
        other => stack.push((other, Expr::one())),
    }
}

/// Builds a normalized power from normalized operands.
pub fn make_pow(base: Expr, exp: Expr) -> Expr {
    if exp.is_zero() || base.is_one() {
        return Expr::one();
    }
    if exp.is_one() {
        return base;
    }
    match (&base, &exp) {
        (Expr::Num(b), Expr::Num(e)) if e.is_integer() => {
            if b.is_zero() {
                // 0^negative is left symbolic so that evaluation reports it.
                if e.is_positive() {
                    return Expr::zero();
                }
                return Expr::Pow(Box::new(base), Box::new(exp));
            }
            Expr::Num(num_traits::pow::Pow::pow(b, e.to_integer()))
        }
        (Expr::Pow(b2, e2), Expr::Num(_)) => {
            let new_exp = make_mul(vec![(**e2).clone(), exp.clone()]);
            make_pow((**b2).clone(), new_exp)
        }
        (Expr::Mul(fs), Expr::Num(_)) => {
            make_mul(fs.iter().map(|f| make_pow(f.clone(), exp.clone())).collect())
        }
        (Expr::Add(_), Expr::Num(_)) => {
            make_mul(vec![Expr::Pow(Box::new(base), Box::new(exp))])
        }
        _ => Expr::Pow(Box::new(base), Box::new(exp)),
    }
}

// ---------------------------------------------------------------------------
// Display

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(_) => 1,
        Expr::Mul(_) => 2,
        Expr::Num(n) if n.is_negative() || !n.is_integer() => 2,
        Expr::Pow(_, _) => 3,
        _ => 4,
    }
}

fn is_negative_term(e: &Expr) -> bool {
    match e {
        Expr::Num(n) => n.is_negative(),
        Expr::Mul(fs) => matches!(fs.first(), Some(Expr::Num(n)) if n.is_negative()),
        _ => false,
    }
}

fn write_paren(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if prec(e) < min_prec {
        write!(f, "({})", e)
    } else {
        write!(f, "{}", e)
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, n: &Q) -> fmt::Result {
    if n.is_integer() {
        write!(f, "{}", n.numer())
    } else {
        write!(f, "{}/{}", n.numer(), n.denom())
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Num(n) if n.is_integer() && !n.is_negative() => write!(f, "{}", n.numer()),
        Expr::Sym(s) => write!(f, "{}", s),
        other => write!(f, "({})", other),
    }
}

fn write_product(f: &mut fmt::Formatter<'_>, coeff: &Q, fs: &[(Expr, Expr)]) -> fmt::Result {
    let mut num: Vec<Expr> = Vec::new();
    let mut den: Vec<Expr> = Vec::new();
    for (b, e) in fs {
        match e {
            Expr::Num(n) if n.is_negative() => den.push(make_pow_raw(b.clone(), Expr::Num(-n.clone()))),
            _ => num.push(make_pow_raw(b.clone(), e.clone())),
        }
    }
    let mut c = coeff.clone();
    if c.is_negative() {
        write!(f, "-")?;
        c = -c;
    }
    let cn = c.numer().clone();
    let cd = c.denom().clone();
    let mut first = true;
    if !cn.is_one() || num.is_empty() {
        write!(f, "{}", cn)?;
        first = false;
    }
    for x in &num {
        if !first {
            write!(f, "*")?;
        }
        write_paren(f, x, 3)?;
        first = false;
    }
    let den_count = den.len() + usize::from(!cd.is_one());
    if den_count == 0 {
        return Ok(());
    }
    write!(f, "/")?;
    if den_count == 1 {
        if !cd.is_one() {
            return write!(f, "{}", cd);
        }
        return write_paren(f, &den[0], 3);
    }
    write!(f, "(")?;
    let mut first = true;
    if !cd.is_one() {
        write!(f, "{}", cd)?;
        first = false;
    }
    for x in &den {
        if !first {
            write!(f, "*")?;
        }
        write_paren(f, x, 3)?;
        first = false;
    }
    write!(f, ")")
}

fn make_pow_raw(b: Expr, e: Expr) -> Expr {
    if e.is_one() {
        b
    } else {
        Expr::Pow(Box::new(b), Box::new(e))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(n) => write_num(f, n),
            Expr::Sym(s) => write!(f, "{}", s),
            Expr::Add(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i == 0 {
                        write_paren(f, t, 2)?;
                    } else if is_negative_term(t) {
                        write!(f, " - ")?;
                        let (c, rest) = t.split_coeff();
                        let pos = scale_term(-c, rest);
                        write_paren(f, &pos, 2)?;
                    } else {
                        write!(f, " + ")?;
                        write_paren(f, t, 2)?;
                    }
                }
                Ok(())
            }
            Expr::Mul(_) => {
                let (c, fs) = self.factors();
                write_product(f, &c, &fs)
            }
            Expr::Pow(b, e) => {
                if let Expr::Num(n) = &**e {
                    if n.is_negative() {
                        return write_product(f, &Q::one(), &[((**b).clone(), (**e).clone())]);
                    }
                }
                write_paren(f, b, 4)?;
                write!(f, "^")?;
                write_exponent(f, e)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> Expr {
        Expr::sym(n)
    }

    #[test]
    fn natural_symbol_order() {
        let mut v = vec![Symbol::new("k10"), Symbol::new("k2"), Symbol::new("k1"), Symbol::new("a")];
        v.sort();
        let names: Vec<_> = v.iter().map(|s| s.as_str().to_string()).collect();
        assert_eq!(names, ["a", "k1", "k2", "k10"]);
    }

    #[test]
    fn like_terms_collect() {
        let e = s("a") * s("b") + s("b") * s("a") - Expr::int(2) * s("a") * s("b");
        assert!(e.is_zero());
    }

    #[test]
    fn powers_combine_and_cancel() {
        let e = s("x") * s("y") / s("x");
        assert_eq!(e, s("y"));
        let e = s("x").pow(s("alpha")) * s("x").pow(s("alpha"));
        assert_eq!(e.to_string(), "x^(2*alpha)");
    }

    #[test]
    fn polynomial_content_cancels() {
        // (k5*k6*(a+b)) / (k5*(a+b)) = k6
        let p = s("a") + s("b");
        let k1 = Expr::product([s("k5"), s("k6")]) * p.clone();
        let expanded = Expr::sum([s("k5") * s("k6") * s("a"), s("k5") * s("k6") * s("b")]);
        let e = expanded / (s("k5") * p);
        assert_eq!(e, s("k6"));
        assert_ne!(k1, Expr::zero());
    }

    #[test]
    fn display_fraction() {
        let e = s("k6") * (s("k2") * s("k4") + s("k3") * s("sigma")) / (s("k1") * s("k3") * s("k5"));
        assert_eq!(e.to_string(), "k6*(k2*k4 + k3*sigma)/(k1*k3*k5)");
        let e = s("a") - s("b");
        assert_eq!(e.to_string(), "a - b");
        let e = Expr::rational(q_frac(3, 2)) * s("a");
        assert_eq!(e.to_string(), "3*a/2");
    }

    #[test]
    fn isolate_power() {
        let e = Expr::int(3) * s("tau").powi(2) * s("k1");
        let (c, a) = e.isolate_power_of(&Symbol::new("tau")).unwrap();
        assert_eq!(a, q(2));
        assert_eq!(c, Expr::int(3) * s("k1"));
        let e = s("tau") + s("k1");
        assert!(e.isolate_power_of(&Symbol::new("tau")).is_none());
    }

    #[test]
    fn eval_reports_zero_denominator() {
        let e = s("a") / s("b");
        let err = e.eval(&|sym: &Symbol| if sym.as_str() == "a" { Some(1.0) } else { Some(0.0) });
        assert_eq!(err, Err(EvalError::ZeroDenominator));
    }

    #[test]
    fn positivity_certificate() {
        assert!((s("a") + s("b") * s("c")).is_syntactically_positive());
        assert!(!(s("a") - s("b")).is_syntactically_positive());
    }
}

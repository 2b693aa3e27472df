//! Solving one equation for one symbol, under the standing assumption that
//! every symbol denotes a positive real.

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::{make_add, make_mul, make_pow, Expr, Symbol};
use super::poly::{Monomial, Poly};
use super::ratfn::RatFn;

pub fn occurrences(e: &Expr, s: &Symbol) -> usize {
    match e {
        Expr::Num(_) => 0,
        Expr::Sym(t) => usize::from(t == s),
        Expr::Add(xs) | Expr::Mul(xs) => xs.iter().map(|x| occurrences(x, s)).sum(),
        Expr::Pow(b, x) => occurrences(b, s) + occurrences(x, s),
    }
}

/// `expr = a*sym + b` with `a`, `b` free of `sym`.
pub fn linear_split(expr: &Expr, sym: &Symbol) -> Option<(Expr, Expr)> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for t in expr.terms() {
        if !t.contains(sym) {
            b.push(t);
            continue;
        }
        let (c, k) = t.isolate_power_of(sym)?;
        if !k.is_one() {
            return None;
        }
        a.push(c);
    }
    if a.is_empty() {
        return None;
    }
    Some((make_add(a), make_add(b)))
}

/// Solves `lhs = rhs` for `sym`.
///
/// When `sym` occurs once the equation is unwound from the outside in;
/// otherwise the difference is cleared to a polynomial numerator and solved
/// if it is linear in `sym`.
pub fn solve_for(lhs: &Expr, rhs: &Expr, sym: &Symbol) -> Option<Expr> {
    let (side, value) = match (lhs.contains(sym), rhs.contains(sym)) {
        (true, false) => (lhs, rhs),
        (false, true) => (rhs, lhs),
        (false, false) => return None,
        (true, true) => return solve_linear(lhs, rhs, sym),
    };
    if occurrences(side, sym) == 1 {
        if let Some(v) = unwind(side.clone(), value.clone(), sym) {
            return Some(v);
        }
    }
    solve_linear(lhs, rhs, sym)
}

fn unwind(mut side: Expr, mut value: Expr, sym: &Symbol) -> Option<Expr> {
    loop {
        side = match side {
            Expr::Sym(ref s) if s == sym => return Some(value),
            Expr::Mul(fs) => {
                let (inner, rest): (Vec<Expr>, Vec<Expr>) = fs.into_iter().partition(|f| f.contains(sym));
                let [inner] = <[Expr; 1]>::try_from(inner).ok()?;
                value = make_mul(vec![value, make_mul(rest).recip()]);
                inner
            }
            Expr::Add(ts) => {
                let (inner, rest): (Vec<Expr>, Vec<Expr>) = ts.into_iter().partition(|t| t.contains(sym));
                let [inner] = <[Expr; 1]>::try_from(inner).ok()?;
                value = make_add(vec![value, -make_add(rest)]);
                inner
            }
            Expr::Pow(b, e) => {
                if e.contains(sym) {
                    return None;
                }
                value = make_pow(value, make_pow(*e, Expr::int(-1)));
                *b
            }
            _ => return None,
        };
    }
}

fn solve_linear(lhs: &Expr, rhs: &Expr, sym: &Symbol) -> Option<Expr> {
    let d = RatFn::from_expr(&make_add(vec![lhs.clone(), -rhs.clone()]))?.reduced();
    if d.num.degree_in(sym) != 1 {
        return None;
    }
    let mut a = Poly::zero();
    let mut b = Poly::zero();
    let unit = Monomial::var(sym.clone(), 1);
    for (m, c) in d.num.terms() {
        match m.div(&unit) {
            Some(rest) => a = a.add(&Poly::term(c.clone(), rest)),
            None => b = b.add(&Poly::term(c.clone(), m.clone())),
        }
    }
    Some(make_mul(vec![Expr::int(-1), b.to_expr(), a.to_expr().recip()]))
}

/// Randomized identity test: `e` vanishes at a few positive points, relative
/// to the size of its terms.
pub fn vanishes(e: &Expr) -> bool {
    if e.is_zero() {
        return true;
    }
    let syms: Vec<Symbol> = e.free_symbols().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..4 {
        let vals: Vec<f64> = syms.iter().map(|_| rng.gen_range(0.5..2.0)).collect();
        let env = |s: &Symbol| syms.iter().position(|t| t == s).map(|i| vals[i]);
        let Ok(v) = e.eval(&env) else { return false };
        let scale: f64 = e.terms().iter().filter_map(|t| t.eval(&env).ok()).map(f64::abs).sum();
        if v.abs() > 1e-10 * (1.0 + scale) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_expr;

    fn p(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn unwinds_single_occurrence() {
        let x = Symbol::new("sigma");
        let v = solve_for(&p("x27/x29"), &p("sigma/k24"), &x).unwrap();
        assert_eq!(v, p("k24*x27/x29"));
        let v = solve_for(&p("x31/(x29*x30)"), &p("(k23 + s)/k25"), &Symbol::new("x30")).unwrap();
        assert!(vanishes(&(v - p("k25*x31/(x29*(k23 + s))"))));
    }

    #[test]
    fn root_of_power() {
        let v = solve_for(&p("a^2*b"), &p("c"), &Symbol::new("a")).unwrap();
        assert_eq!(v, p("(c/b)^(1/2)"));
    }

    #[test]
    fn linear_fallback() {
        let s = Symbol::new("s");
        let v = solve_for(&p("(k1 + s)/(k2 + s)"), &p("y"), &s).unwrap();
        assert!(vanishes(&(v - p("(k1 - k2*y)/(y - 1)"))));
    }

    #[test]
    fn split() {
        let (a, b) = linear_split(&p("k28*x29*x34 + k29*h*x34 - k30*x35"), &Symbol::new("x35")).unwrap();
        assert_eq!(a, p("-k30"));
        assert_eq!(b, p("k28*x29*x34 + k29*h*x34"));
        assert!(linear_split(&p("x^2 + 1"), &Symbol::new("x")).is_none());
    }

    #[test]
    fn identity_check() {
        assert!(vanishes(&p("(a + b)^2 - a^2 - 2*a*b - b^2")));
        assert!(!vanishes(&p("a - b")));
    }
}

//! Rate laws, their classification, and the species formation rate.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::crn::{Complex, Network};
use crate::error::{Error, Result};
use crate::symbolic::{make_add, Expr, Symbol, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KineticsTag {
    MassAction,
    PowerLaw,
    Rational,
    Other,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateLaw {
    pub expr: Expr,
    pub tag: KineticsTag,
}

/// Rate law per reaction plus the symbol roles needed to read them.
#[derive(Clone, Debug, PartialEq)]
pub struct Kinetics {
    pub rates: Vec<RateLaw>,
    /// Concentration symbol of each species, in species order.
    pub conc: Vec<Symbol>,
    /// Named constants with optional default values.
    pub constants: BTreeMap<Symbol, Option<Q>>,
}

impl Kinetics {
    pub fn conc_index(&self, s: &Symbol) -> Option<usize> {
        self.conc.iter().position(|c| c == s)
    }

    pub fn is_conc(&self, s: &Symbol) -> bool {
        self.conc_index(s).is_some()
    }

    pub fn is_constant(&self, s: &Symbol) -> bool {
        self.constants.contains_key(s)
    }

    /// Rate-constant symbols in order of first appearance.
    pub fn rate_constants(&self) -> Vec<Symbol> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for r in &self.rates {
            for s in r.expr.free_symbols() {
                if !self.is_conc(&s) && !self.is_constant(&s) && seen.insert(s.clone()) {
                    out.push(s);
                }
            }
        }
        out
    }

    pub fn all_mass_action(&self) -> bool {
        self.rates.iter().all(|r| r.tag == KineticsTag::MassAction)
    }

    pub fn restrict(&self, reactions: &[usize]) -> Kinetics {
        Kinetics {
            rates: reactions.iter().map(|&r| self.rates[r].clone()).collect(),
            conc: self.conc.clone(),
            constants: self.constants.clone(),
        }
    }

    /// Default values of named constants.
    pub fn constant_defaults(&self) -> HashMap<Symbol, f64> {
        self.constants
            .iter()
            .filter_map(|(s, v)| v.as_ref().and_then(|q| q.to_f64()).map(|f| (s.clone(), f)))
            .collect()
    }
}

pub fn classify_rate(expr: &Expr, source: &Complex, conc: &[Symbol]) -> KineticsTag {
    if let Some(exps) = monomial_species_exponents(expr, conc) {
        let matches = exps.iter().zip(&source.0).all(|(e, &y)| e.as_ref().map_or(y == 0, |q| *q == Q::from_integer(y.into())));
        return if matches { KineticsTag::MassAction } else { KineticsTag::PowerLaw };
    }
    if is_rational_like(expr, conc) {
        KineticsTag::Rational
    } else {
        KineticsTag::Other
    }
}

/// For `c * prod s^a` with `c > 0`, every base a symbol and every exponent a
/// number, returns the exponent of each species (None when absent).
fn monomial_species_exponents(expr: &Expr, conc: &[Symbol]) -> Option<Vec<Option<Q>>> {
    let (c, fs) = expr.factors();
    if !c.is_positive() {
        return None;
    }
    let mut out = vec![None; conc.len()];
    for (b, e) in fs {
        let s = b.as_sym()?;
        let q = e.as_num()?.clone();
        if let Some(j) = conc.iter().position(|x| x == s) {
            out[j] = Some(q);
        }
    }
    Some(out)
}

fn is_rational_like(e: &Expr, conc: &[Symbol]) -> bool {
    match e {
        Expr::Num(_) | Expr::Sym(_) => true,
        Expr::Add(xs) | Expr::Mul(xs) => xs.iter().all(|x| is_rational_like(x, conc)),
        Expr::Pow(b, ex) => is_rational_like(b, conc) && !ex.free_symbols().iter().any(|s| conc.contains(s)),
    }
}

/// Symbolic right-hand side `f_j = sum_r rate_r * v_rj`.
pub fn formation_rate(net: &Network, kin: &Kinetics) -> Vec<Expr> {
    let mut acc: Vec<Vec<Expr>> = vec![Vec::new(); net.m()];
    for r in 0..net.r() {
        let v = net.reaction_vector(r);
        for (j, &c) in v.iter().enumerate() {
            if c != 0 {
                acc[j].push(Expr::int(c) * kin.rates[r].expr.clone());
            }
        }
    }
    acc.into_iter().map(make_add).collect()
}

/// Numeric value of each rate at the given symbol assignment.
pub fn evaluate_rates(net: &Network, kin: &Kinetics, env: &HashMap<Symbol, f64>) -> Result<Vec<f64>> {
    (0..net.r())
        .map(|r| {
            kin.rates[r].expr.eval_map(env).map_err(|e| match e {
                crate::symbolic::EvalError::Unbound(s) => Error::Config(format!("unbound symbol `{s}` in rate of {}", net.reactions()[r].label)),
                other => Error::Eval { context: format!("rate of {}", net.reactions()[r].label), message: other.to_string() },
            })
        })
        .collect()
}

/// `(f, scale)` where `scale_j = sum_r |rate_r * v_rj|`.
pub fn evaluate_rhs(net: &Network, kin: &Kinetics, env: &HashMap<Symbol, f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let rates = evaluate_rates(net, kin, env)?;
    let mut f = vec![0.0; net.m()];
    let mut scale = vec![0.0; net.m()];
    for (r, rate) in rates.iter().enumerate() {
        for (j, &c) in net.reaction_vector(r).iter().enumerate() {
            if c != 0 {
                let t = rate * c as f64;
                f[j] += t;
                scale[j] += t.abs();
            }
        }
    }
    Ok((f, scale))
}

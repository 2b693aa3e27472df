//! Steady states of parts that are not mass action: direct elimination on
//! the balance equations, and denominator clearing to an associated
//! mass-action system.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Signed;
use serde::Serialize;

use crate::crn::{Complex, Network};
use crate::error::{Error, Result};
use crate::kinetics::{formation_rate, KineticsTag, Kinetics, RateLaw};
use crate::parametrization::Parametrization;
use crate::report::ser_display;
use crate::symbolic::{linear_split, make_add, make_mul, rational_equal, vanishes, Expr, Monomial, Poly, Symbol};

#[derive(Clone, Debug, Serialize)]
pub struct EliminationStep {
    pub species: usize,
    /// Species whose balance equation was used.
    pub equation: usize,
    /// Why the isolated coefficient is positive.
    pub certificate: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EliminationPlan {
    pub steps: Vec<EliminationStep>,
    pub free: Vec<usize>,
    /// Dependents that had to be freed because no equation was left for them.
    pub promoted: Vec<usize>,
}

/// Catalysts (present in complexes, never changed) and species that appear
/// only inside quotient or variable-exponent factors, plus the preferred ones.
pub fn default_free(net: &Network, kin: &Kinetics, preferred: &[usize]) -> Vec<usize> {
    let present = net.species_in_complexes();
    let moving = net.species_in_reaction_vectors();
    let mut free: BTreeSet<usize> = present.difference(&moving).copied().collect();
    free.extend(preferred.iter().filter(|j| present.contains(j)));
    for &j in &present {
        let x = &kin.conc[j];
        let mut plain = false;
        let mut hidden = false;
        for r in &kin.rates {
            let (_, fs) = r.expr.factors();
            for (b, e) in fs {
                if !b.contains(x) && !e.contains(x) {
                    continue;
                }
                if b.as_sym() == Some(x) && e.as_num().is_some() {
                    plain = true;
                } else {
                    hidden = true;
                }
            }
        }
        if hidden && !plain {
            free.insert(j);
        }
    }
    free.into_iter().collect()
}

fn certify(a: &Expr) -> Option<(bool, String)> {
    let neg = -a.clone();
    if neg.is_syntactically_positive() {
        Some((true, format!("coefficient -({neg}) is a sum of positive terms")))
    } else if a.is_syntactically_positive() {
        Some((false, format!("coefficient {a} is a sum of positive terms")))
    } else {
        None
    }
}

/// Solves the balance equations of `net` for every species not in `free`,
/// one linear isolation at a time.
pub fn solve_by_elimination(net: &Network, kin: &Kinetics, free: &[usize]) -> Result<(EliminationPlan, Parametrization)> {
    let present: Vec<usize> = net.species_in_complexes().into_iter().collect();
    let f = formation_rate(net, kin);
    let mut free: Vec<usize> = free.iter().copied().filter(|j| present.contains(j)).collect();
    let mut unknown: Vec<usize> = present.iter().copied().filter(|j| !free.contains(j)).collect();
    let mut open: Vec<usize> = present.clone();
    let mut solved: HashMap<Symbol, Expr> = HashMap::new();
    let mut steps = Vec::new();
    let mut promoted = Vec::new();
    while !unknown.is_empty() {
        let mut hit = None;
        'search: for &u in &unknown {
            let mut order = open.clone();
            order.sort_by_key(|&i| (i != u, i));
            for i in order {
                let eq = f[i].subst(&solved);
                let others = unknown.iter().any(|&w| w != u && eq.contains(&kin.conc[w]));
                if others {
                    continue;
                }
                let Some((a, b)) = linear_split(&eq, &kin.conc[u]) else { continue };
                let Some((negated, certificate)) = certify(&a) else { continue };
                let value = if negated {
                    make_mul(vec![b, (-a).recip()])
                } else {
                    make_mul(vec![-b, a.recip()])
                };
                hit = Some((u, i, value, certificate));
                break 'search;
            }
        }
        match hit {
            Some((u, i, value, certificate)) => {
                for v in solved.values_mut() {
                    *v = v.subst_one(&kin.conc[u], &value);
                }
                solved.insert(kin.conc[u].clone(), value);
                steps.push(EliminationStep { species: u, equation: i, certificate });
                unknown.retain(|&w| w != u);
                open.retain(|&w| w != i);
            }
            None => {
                let u = *unknown.last().unwrap();
                let absent = open.iter().all(|&i| !f[i].subst(&solved).contains(&kin.conc[u]));
                if !absent && unknown.len() == 1 {
                    return Err(Error::Unsolvable(format!(
                        "no balance equation is linear with a positive coefficient in {}",
                        net.species()[u]
                    )));
                }
                unknown.pop();
                free.push(u);
                promoted.push(u);
            }
        }
    }
    for &i in &open {
        let rest = f[i].subst(&solved);
        if !vanishes(&rest) {
            return Err(Error::Unsolvable(format!(
                "balance of {} does not vanish for the chosen free species",
                net.species()[i]
            )));
        }
    }
    free.sort_unstable();
    let entries: Vec<(usize, Expr)> = present
        .iter()
        .map(|&j| (j, solved.get(&kin.conc[j]).cloned().unwrap_or_else(|| Expr::Sym(kin.conc[j].clone()))))
        .collect();
    let free_syms = free.iter().map(|&j| kin.conc[j].clone()).collect();
    Ok((
        EliminationPlan { steps, free: free.clone(), promoted },
        Parametrization { entries, free: free_syms, provenance: "elimination".into() },
    ))
}

/// A mass-action system with the same positive steady states, obtained by
/// multiplying every balance equation by one positive denominator.
#[derive(Clone, Debug, Serialize)]
pub struct ClearedSystem {
    #[serde(serialize_with = "ser_display")]
    pub denominator: Expr,
    #[serde(skip)]
    pub network: Network,
    #[serde(skip)]
    pub kinetics: Kinetics,
    /// Composite rate constants, e.g. `k2p = k2*k3`.
    #[serde(serialize_with = "ser_subst")]
    pub substitutions: Vec<(Symbol, Expr)>,
}

fn ser_subst<S: serde::Serializer>(v: &[(Symbol, Expr)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(v.iter().map(|(k, e)| (k.to_string(), e.to_string())))
}

impl ClearedSystem {
    pub fn substitution_map(&self) -> HashMap<Symbol, Expr> {
        self.substitutions.iter().cloned().collect()
    }
}

/// Denominator of a rate law: the product of its negative-power factors.
fn split_denominator(e: &Expr) -> (Expr, Expr) {
    let (c, fs) = e.factors();
    let mut num = vec![Expr::Num(c)];
    let mut den = Vec::new();
    for (b, x) in fs {
        match x.as_num() {
            Some(q) if q.is_negative() => den.push(make_mul(vec![b]).powq(-q.clone())),
            _ => num.push(b.pow(x)),
        }
    }
    (make_mul(num), make_mul(den))
}

fn species_exponents(m: &Monomial, conc: &[Symbol]) -> (Vec<i64>, Monomial) {
    let mut v = vec![0; conc.len()];
    let mut rest = Vec::new();
    for (s, k) in m.vars() {
        match conc.iter().position(|c| c == s) {
            Some(j) => v[j] = i64::from(*k),
            None => rest.push((s.clone(), *k)),
        }
    }
    (v, Monomial::from_pairs(rest))
}

pub fn clear_denominators(net: &Network, kin: &Kinetics) -> Result<ClearedSystem> {
    let mut den: Option<Poly> = None;
    for (r, law) in kin.rates.iter().enumerate() {
        let (_, d) = split_denominator(&law.expr);
        if d.is_one() {
            continue;
        }
        let p = Poly::from_expr(&d)
            .ok_or_else(|| Error::Inapplicable(format!("denominator of {} is not a polynomial", net.reactions()[r].label)))?;
        match &den {
            None => den = Some(p),
            Some(q) if *q == p => {}
            Some(q) => {
                return Err(Error::Inapplicable(format!(
                    "rate denominators differ: {} and {}",
                    q.to_expr(),
                    p.to_expr()
                )))
            }
        }
    }
    let Some(den) = den else {
        return Ok(ClearedSystem { denominator: Expr::one(), network: net.clone(), kinetics: kin.clone(), substitutions: vec![] });
    };
    let has_constant_term = den.terms().any(|(m, _)| species_exponents(m, &kin.conc).0.iter().all(|&k| k == 0));
    if !den.all_positive() || !has_constant_term {
        return Err(Error::Inapplicable(format!("cannot certify that {} is positive", den.to_expr())));
    }
    let den_expr = den.to_expr();
    let mut out = Network::new(net.species().to_vec());
    let mut rates: Vec<RateLaw> = Vec::new();
    let mut index: BTreeMap<(Vec<i64>, Vec<i64>), usize> = BTreeMap::new();
    let mut pending: Vec<(Vec<i64>, Vec<i64>, Expr)> = Vec::new();
    for (r, law) in kin.rates.iter().enumerate() {
        let w = Poly::from_expr(&make_mul(vec![law.expr.clone(), den_expr.clone()]))
            .ok_or_else(|| Error::Inapplicable(format!("rate of {} times the denominator is not a polynomial", net.reactions()[r].label)))?;
        let v = net.reaction_vector(r);
        let mut terms: Vec<(Vec<i64>, Expr)> = Vec::new();
        for (m, c) in w.terms() {
            if !c.is_positive() {
                return Err(Error::Inapplicable(format!("cleared rate of {} has a negative term", net.reactions()[r].label)));
            }
            let (y, rest) = species_exponents(m, &kin.conc);
            terms.push((y, make_mul(vec![Expr::Num(c.clone()), rest.to_expr()])));
        }
        terms.sort_by_key(|(y, _)| (y.iter().sum::<i64>(), std::cmp::Reverse(y.clone())));
        for (y, c) in terms {
            let p: Vec<i64> = y.iter().zip(&v).map(|(a, b)| a + b).collect();
            if p.iter().any(|&x| x < 0) {
                return Err(Error::Inapplicable(format!("cleared term of {} would need a negative product", net.reactions()[r].label)));
            }
            match index.get(&(y.clone(), p.clone())) {
                Some(&i) => pending[i].2 = make_add(vec![pending[i].2.clone(), c]),
                None => {
                    index.insert((y.clone(), p.clone()), pending.len());
                    pending.push((y, p, c));
                }
            }
        }
    }
    let taken: BTreeSet<Symbol> = kin.rate_constants().into_iter().chain(kin.constants.keys().cloned()).collect();
    let mut substitutions = Vec::new();
    for (i, (y, p, c)) in pending.into_iter().enumerate() {
        let label = format!("R{}", i + 1);
        out.add_reaction(&label, Complex(y.clone()), Complex(p))?;
        let k = match c.as_sym() {
            Some(_) => c,
            None => {
                let stem = c.free_symbols().into_iter().next().map(|s| s.to_string()).unwrap_or_else(|| "k".into());
                let mut name = format!("{stem}p");
                while taken.contains(&Symbol::new(&name)) || substitutions.iter().any(|(s, _): &(Symbol, Expr)| s.as_str() == name) {
                    name.push('p');
                }
                let s = Symbol::new(&name);
                substitutions.push((s.clone(), c));
                Expr::Sym(s)
            }
        };
        let mut fs = vec![k];
        for (j, &e) in y.iter().enumerate() {
            if e > 0 {
                fs.push(Expr::Sym(kin.conc[j].clone()).powi(e));
            }
        }
        rates.push(RateLaw { expr: make_mul(fs), tag: KineticsTag::MassAction });
    }
    let kinetics = Kinetics { rates, conc: kin.conc.clone(), constants: kin.constants.clone() };
    let cleared = ClearedSystem { denominator: den_expr, network: out, kinetics, substitutions };
    debug_assert!(cleared.check(net, kin));
    Ok(cleared)
}

impl ClearedSystem {
    /// Cleared right-hand side equals the denominator times the original one.
    pub fn check(&self, net: &Network, kin: &Kinetics) -> bool {
        let sub = self.substitution_map();
        let lhs = formation_rate(&self.network, &self.kinetics);
        let rhs = formation_rate(net, kin);
        lhs.iter().zip(&rhs).all(|(a, b)| {
            let a = a.subst(&sub);
            let b = make_mul(vec![b.clone(), self.denominator.clone()]);
            rational_equal(&a, &b).unwrap_or_else(|| vanishes(&(a - b)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_network;
    use crate::symbolic::parse_expr;

    const YU: &str = "species X1 X2
R1: X1 + X2 -> 2X1 ; k1*x1*x2/(k2 + x1)
R2: 2X1 -> X1 + X2 ; k3*x1^2
";

    #[test]
    fn yu_craciun_clears_to_three_reactions() {
        let m = parse_network(YU).unwrap();
        let c = clear_denominators(&m.network, &m.kinetics).unwrap();
        assert_eq!(c.denominator, parse_expr("k2 + x1").unwrap());
        let rendered: Vec<String> = (0..c.network.r()).map(|r| c.network.render_reaction(r)).collect();
        assert_eq!(rendered, vec!["R1: X1 + X2 -> 2X1", "R2: 2X1 -> X1 + X2", "R3: 3X1 -> 2X1 + X2"]);
        let rates: Vec<String> = c.kinetics.rates.iter().map(|r| r.expr.to_string()).collect();
        assert_eq!(rates, vec!["k1*x1*x2", "k2p*x1^2", "k3*x1^3"]);
        assert_eq!(c.substitutions, vec![(Symbol::new("k2p"), parse_expr("k2*k3").unwrap())]);
        assert!(c.check(&m.network, &m.kinetics));
    }

    #[test]
    fn mass_action_is_identity() {
        let m = parse_network("R1: A -> B ; k1*a\nR2: B -> A ; k2*b\n").unwrap();
        let c = clear_denominators(&m.network, &m.kinetics).unwrap();
        assert!(c.denominator.is_one());
        assert_eq!(c.network, m.network);
    }

    #[test]
    fn differing_denominators_rejected() {
        let m = parse_network("R1: A -> B ; k1*a/(k2 + a)\nR2: B -> A ; k3*b/(k4 + b)\n").unwrap();
        assert_eq!(clear_denominators(&m.network, &m.kinetics).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn inflow_outflow() {
        let m = parse_network("R1: 0 -> X ; ka\nR2: X -> 0 ; kb*x\n").unwrap();
        let (plan, p) = solve_by_elimination(&m.network, &m.kinetics, &[]).unwrap();
        assert_eq!(plan.steps.len(), 1);
        assert_eq!(p.get(0).unwrap(), &parse_expr("ka/kb").unwrap());
    }

    #[test]
    fn hill_part_eliminates() {
        let src = "species X28 X29 X34 X35
const alpha = 2
const kbar = 1
R28: X29 + X34 -> X29 + X35 ; k28*x29*x34
R29: X28 + X34 -> X28 + X35 ; k29*x28^alpha/(kbar^alpha + x28^alpha)*x34
R30: X35 -> X34 ; k30*x35
";
        let m = parse_network(src).unwrap();
        let free = default_free(&m.network, &m.kinetics, &[2]);
        assert_eq!(free, vec![0, 1, 2]);
        let (_, p) = solve_by_elimination(&m.network, &m.kinetics, &free).unwrap();
        let want = parse_expr("(k28*x29*x34 + k29*x28^alpha/(kbar^alpha + x28^alpha)*x34)/k30").unwrap();
        assert!(vanishes(&(p.get(3).unwrap().clone() - want)));
        assert_eq!(p.free, vec![Symbol::new("x28"), Symbol::new("x29"), Symbol::new("x34")]);
    }

    #[test]
    fn conservation_promotes_a_free_species() {
        let m = parse_network("R1: A -> B ; k1*a\nR2: B -> A ; k2*b\n").unwrap();
        let (plan, p) = solve_by_elimination(&m.network, &m.kinetics, &[]).unwrap();
        assert_eq!(plan.promoted, vec![1]);
        assert_eq!(p.get(0).unwrap(), &parse_expr("k2*b/k1").unwrap());
    }

    #[test]
    fn nonlinear_is_unsolvable() {
        let m = parse_network("R1: 0 -> X ; k1\nR2: 2X -> X ; k2*x^2\n").unwrap();
        assert_eq!(solve_by_elimination(&m.network, &m.kinetics, &[]).unwrap_err().exit_code(), 3);
    }
}

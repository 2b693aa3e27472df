//! Combining per-part steady states into one parametrization of the whole
//! network, ACR verdicts, and composition of mutually exclusive parts.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::parametrization::{ParamSystem, Parametrization};
use crate::report::ser_display;
use crate::symbolic::{make_mul, solve_for, vanishes, Expr, Symbol};

/// `lhs = rhs`, remembered with where it came from.
#[derive(Clone, Debug)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Expr,
    pub origin: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Resolution {
    Solved {
        #[serde(serialize_with = "ser_display")]
        symbol: Symbol,
        #[serde(serialize_with = "ser_display")]
        value: Expr,
    },
    /// Both sides already agree.
    Consistent,
    /// Left as a constraint on the free parameters.
    Residual,
    /// A parameter had to be declared free to make progress.
    Freed {
        #[serde(serialize_with = "ser_display")]
        symbol: Symbol,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct MergeConstraint {
    pub origin: String,
    #[serde(serialize_with = "ser_display")]
    pub lhs: Expr,
    #[serde(serialize_with = "ser_display")]
    pub rhs: Expr,
    pub resolution: Resolution,
}

#[derive(Clone, Debug, Serialize)]
pub struct MergeOutcome {
    pub parametrization: Parametrization,
    pub constraints: Vec<MergeConstraint>,
}

/// Equations `x_j = P_j` of a parametrization.
pub fn entry_equations(p: &Parametrization, conc: &[Symbol], origin: &str) -> Vec<Equation> {
    p.entries
        .iter()
        .filter(|(j, e)| e.as_sym() != Some(&conc[*j]))
        .map(|(j, e)| Equation { lhs: Expr::Sym(conc[*j].clone()), rhs: e.clone(), origin: format!("{origin}: {}", conc[*j]) })
        .collect()
}

/// One equation `x^(M_e) = kappa_e` per forest edge.
pub fn forest_relations(sys: &ParamSystem, conc: &[Symbol], origin: &str) -> Vec<Equation> {
    (0..sys.m.rows())
        .map(|e| {
            let fs = sys
                .columns
                .iter()
                .enumerate()
                .filter(|(c, _)| !num_traits::Zero::is_zero(&sys.m[(e, *c)]))
                .map(|(c, &j)| Expr::Sym(conc[j].clone()).powq(sys.m[(e, c)].clone()))
                .collect();
            let (t, h) = sys.forest[e];
            Equation { lhs: make_mul(fs), rhs: sys.kappa[e].clone(), origin: format!("{origin}: edge {}->{}", t + 1, h + 1) }
        })
        .collect()
}

/// Solves the union of all part equations for every species.
///
/// Preferred species are held fixed. Repeatedly, an equation with a single
/// unknown is solved for it and the value substituted everywhere. When no
/// such equation is left, the first remaining parameter (or, failing that,
/// the highest-index species) is declared free.
pub fn merge_equations(
    species: &[usize],
    conc: &[Symbol],
    equations: Vec<Equation>,
    params: &[Symbol],
    preferred: &[usize],
) -> Result<MergeOutcome> {
    let mut unknown: Vec<Symbol> = species.iter().filter(|j| !preferred.contains(j)).map(|&j| conc[j].clone()).collect();
    let mut param_order: Vec<Symbol> = params.to_vec();
    unknown.extend(params.iter().cloned());
    let mut open = equations;
    let mut solved: Vec<(Symbol, Expr)> = Vec::new();
    let mut freed: Vec<Symbol> = Vec::new();
    let mut constraints = Vec::new();
    while !open.is_empty() {
        let mut progress = None;
        for (i, eq) in open.iter().enumerate() {
            let present: Vec<&Symbol> = unknown.iter().filter(|u| eq.lhs.contains(u) || eq.rhs.contains(u)).collect();
            match present.as_slice() {
                [] => {
                    progress = Some((i, None));
                    break;
                }
                [u] => {
                    if let Some(v) = solve_for(&eq.lhs, &eq.rhs, u) {
                        progress = Some((i, Some(((*u).clone(), v))));
                        break;
                    }
                }
                _ => {}
            }
        }
        match progress {
            Some((i, None)) => {
                let eq = open.remove(i);
                let diff = eq.lhs.clone() - eq.rhs.clone();
                let resolution = if vanishes(&diff) {
                    Resolution::Consistent
                } else if diff.free_symbols().iter().all(|s| !conc.contains(s) && !params.contains(s)) {
                    return Err(Error::Contradiction(format!("{}: {} = {} cannot hold", eq.origin, eq.lhs, eq.rhs)));
                } else {
                    Resolution::Residual
                };
                constraints.push(MergeConstraint { origin: eq.origin, lhs: eq.lhs, rhs: eq.rhs, resolution });
            }
            Some((i, Some((u, v)))) => {
                let eq = open.remove(i);
                for e in open.iter_mut() {
                    e.lhs = e.lhs.subst_one(&u, &v);
                    e.rhs = e.rhs.subst_one(&u, &v);
                }
                for (_, w) in solved.iter_mut() {
                    *w = w.subst_one(&u, &v);
                }
                unknown.retain(|s| *s != u);
                constraints.push(MergeConstraint {
                    origin: eq.origin,
                    lhs: eq.lhs,
                    rhs: eq.rhs,
                    resolution: Resolution::Solved { symbol: u.clone(), value: v.clone() },
                });
                solved.push((u, v));
            }
            None => {
                let pick = param_order
                    .iter()
                    .find(|p| unknown.contains(p))
                    .cloned()
                    .or_else(|| species.iter().rev().map(|&j| conc[j].clone()).find(|s| unknown.contains(s)));
                let Some(p) = pick else { break };
                unknown.retain(|s| *s != p);
                param_order.retain(|s| *s != p);
                constraints.push(MergeConstraint {
                    origin: "merge".into(),
                    lhs: Expr::Sym(p.clone()),
                    rhs: Expr::Sym(p.clone()),
                    resolution: Resolution::Freed { symbol: p.clone() },
                });
                freed.push(p);
            }
        }
    }
    let value: HashMap<Symbol, Expr> = solved.into_iter().collect();
    let mut entries: Vec<(usize, Expr)> =
        species.iter().map(|&j| (j, value.get(&conc[j]).cloned().unwrap_or_else(|| Expr::Sym(conc[j].clone())))).collect();
    // A free parameter equal to some species' own value takes that species' name.
    let mut renames: HashMap<Symbol, Expr> = HashMap::new();
    for p in freed.iter().filter(|p| !conc.contains(p)) {
        if let Some(&(j, _)) = entries.iter().find(|(_, e)| e.as_sym() == Some(p)) {
            renames.insert(p.clone(), Expr::Sym(conc[j].clone()));
        }
    }
    if !renames.is_empty() {
        for (_, e) in entries.iter_mut() {
            *e = e.subst(&renames);
        }
        for c in constraints.iter_mut() {
            if c.resolution == Resolution::Residual {
                c.lhs = c.lhs.subst(&renames);
                c.rhs = c.rhs.subst(&renames);
            }
        }
    }
    let used: BTreeSet<Symbol> = entries.iter().flat_map(|(_, e)| e.free_symbols()).collect();
    let mut free: Vec<Symbol> = preferred.iter().filter(|j| species.contains(j)).map(|&j| conc[j].clone()).collect();
    for p in &freed {
        let name = match renames.get(p) {
            Some(Expr::Sym(s)) => s.clone(),
            _ => p.clone(),
        };
        if !free.contains(&name) {
            free.push(name);
        }
    }
    free.retain(|s| used.contains(s));
    free.sort();
    Ok(MergeOutcome { parametrization: Parametrization { entries, free, provenance: "merge".into() }, constraints })
}

/// Merges parametrizations by equating their entries species by species.
pub fn merge_parametrizations(parts: &[Parametrization], conc: &[Symbol], preferred: &[usize]) -> Result<MergeOutcome> {
    let species: Vec<usize> = parts.iter().flat_map(|p| p.species()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut params = Vec::new();
    let mut eqs = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        for s in &p.free {
            if !conc.contains(s) && !params.contains(s) {
                params.push(s.clone());
            }
        }
        eqs.extend(entry_equations(p, conc, &format!("part {}", i + 1)));
    }
    merge_equations(&species, conc, eqs, &params, preferred)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcrEntry {
    pub species: usize,
    pub acr: bool,
    /// Free parameters the value depends on.
    #[serde(serialize_with = "crate::report::ser_display_vec")]
    pub depends_on: Vec<Symbol>,
}

/// ACR holds for a species when its value involves no free parameter and no
/// concentration.
pub fn acr_report(p: &Parametrization, conc: &[Symbol]) -> Vec<AcrEntry> {
    p.entries
        .iter()
        .map(|(j, e)| {
            let depends_on: Vec<Symbol> = e.free_symbols().into_iter().filter(|s| p.free.contains(s) || conc.contains(s)).collect();
            AcrEntry { species: *j, acr: depends_on.is_empty(), depends_on }
        })
        .collect()
}

/// Concatenation of the steady states of two mutually exclusive parts.
pub fn compose_exclusive(a: &Parametrization, b: &Parametrization, conc: &[Symbol]) -> Result<Parametrization> {
    let sa: BTreeSet<usize> = a.species().into_iter().collect();
    let sb: BTreeSet<usize> = b.species().into_iter().collect();
    let mentions = |p: &Parametrization, other: &BTreeSet<usize>| {
        p.entries.iter().any(|(_, e)| other.iter().any(|&j| e.contains(&conc[j])))
    };
    if !sa.is_disjoint(&sb) || mentions(a, &sb) || mentions(b, &sa) {
        return Err(Error::Inapplicable("parts are not mutually exclusive".into()));
    }
    let mut entries: Vec<(usize, Expr)> = a.entries.iter().chain(&b.entries).cloned().collect();
    entries.sort_by_key(|(j, _)| *j);
    let mut free = a.free.clone();
    free.extend(b.free.iter().filter(|s| !a.free.contains(s)).cloned());
    Ok(Parametrization { entries, free, provenance: "composition".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_expr;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn conc(n: usize) -> Vec<Symbol> {
        (0..n).map(|i| Symbol::new(&format!("x{}", i + 1))).collect()
    }

    fn par(entries: &[(usize, &str)], free: &[&str]) -> Parametrization {
        Parametrization {
            entries: entries.iter().map(|(j, s)| (*j, e(s))).collect(),
            free: free.iter().map(|s| Symbol::new(s)).collect(),
            provenance: "test".into(),
        }
    }

    #[test]
    fn shared_species_pins_sigma() {
        let c = conc(2);
        let a = par(&[(0, "k6/k5")], &[]);
        let b = par(&[(0, "sigma"), (1, "sigma*k1")], &["sigma"]);
        let out = merge_parametrizations(&[a, b], &c, &[]).unwrap();
        assert_eq!(out.parametrization.get(0).unwrap(), &e("k6/k5"));
        assert_eq!(out.parametrization.get(1).unwrap(), &e("k1*k6/k5"));
        assert!(out.parametrization.free.is_empty());
        assert!(out
            .constraints
            .iter()
            .any(|c| c.resolution == Resolution::Solved { symbol: Symbol::new("sigma"), value: e("k6/k5") }));
    }

    #[test]
    fn disjoint_parts_concatenate() {
        let c = conc(4);
        let a = par(&[(0, "k1*tau"), (1, "tau")], &["tau"]);
        let b = par(&[(2, "k2"), (3, "k3/k4")], &[]);
        let out = merge_parametrizations(&[a, b], &c, &[]).unwrap();
        let p = out.parametrization;
        assert_eq!(p.get(0).unwrap(), &e("k1*x2"));
        assert_eq!(p.get(1).unwrap(), &e("x2"));
        assert_eq!(p.get(3).unwrap(), &e("k3/k4"));
        assert_eq!(p.free, vec![Symbol::new("x2")]);
    }

    #[test]
    fn preferred_species_become_free() {
        let c = conc(2);
        let a = par(&[(0, "k1*tau^2"), (1, "k2*tau")], &["tau"]);
        let out = merge_parametrizations(&[a], &c, &[0]).unwrap();
        let p = out.parametrization;
        assert_eq!(p.free, vec![Symbol::new("x1")]);
        assert!(vanishes(&(p.get(1).unwrap().clone() - e("k2*(x1/k1)^(1/2)"))));
    }

    #[test]
    fn contradiction_detected() {
        let c = conc(1);
        let a = par(&[(0, "k1")], &[]);
        let b = par(&[(0, "k2")], &[]);
        let err = merge_parametrizations(&[a, b], &c, &[]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn merge_is_order_independent() {
        let c = conc(3);
        let a = par(&[(0, "k6/k5"), (1, "k1*tau")], &["tau"]);
        let b = par(&[(0, "sigma"), (2, "sigma^2")], &["sigma"]);
        let p1 = merge_parametrizations(&[a.clone(), b.clone()], &c, &[]).unwrap().parametrization;
        let p2 = merge_parametrizations(&[b, a], &c, &[]).unwrap().parametrization;
        for j in 0..3 {
            assert!(vanishes(&(p1.get(j).unwrap().clone() - p2.get(j).unwrap().clone())));
        }
    }

    #[test]
    fn acr_verdicts() {
        let c = vec![Symbol::new("a"), Symbol::new("e"), Symbol::new("ae"), Symbol::new("b")];
        let p = par(&[(0, "k6*(k2*k4 + k3*sigma)/(k1*k3*k5)"), (1, "k5/sigma"), (2, "3"), (3, "k6/k5")], &["sigma"]);
        let r = acr_report(&p, &c);
        assert_eq!(r.iter().map(|x| x.acr).collect::<Vec<_>>(), vec![false, false, true, true]);
        assert_eq!(r[1].depends_on, vec![Symbol::new("sigma")]);
    }

    #[test]
    fn exclusive_composition() {
        let c = conc(4);
        let a = par(&[(0, "a1"), (1, "a2")], &[]);
        let b = par(&[(2, "b3"), (3, "b4")], &[]);
        let p = compose_exclusive(&a, &b, &c).unwrap();
        assert_eq!(p.species(), vec![0, 1, 2, 3]);
        assert_eq!(p.get(2).unwrap(), &e("b3"));
        let overlap = par(&[(1, "k")], &[]);
        assert!(compose_exclusive(&a, &overlap, &c).is_err());
        let mentions = par(&[(2, "x1*k")], &[]);
        assert!(compose_exclusive(&a, &mentions, &c).is_err());
    }
}

//! Independent oracles: brute-force arborescence enumeration, exhaustive
//! partition search, and the seeded residual harness.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::crn::Network;
use crate::decomposition::{build, Decomposition};
use crate::error::{Error, Result};
use crate::kinetics::{evaluate_rhs, Kinetics};
use crate::parametrization::Parametrization;
use crate::symbolic::{make_mul, Expr, Monomial, Poly, Symbol};

pub const MAX_TREE_VERTICES: usize = 8;
pub const MAX_PARTITION_REACTIONS: usize = 10;

/// Every spanning arborescence oriented toward `root`, as sorted edge-index
/// sets. Each non-root vertex picks one outgoing edge; picks in which every
/// vertex reaches the root are kept.
pub fn enumerate_rooted_trees(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Vec<Vec<usize>>> {
    if n > MAX_TREE_VERTICES {
        return Err(Error::Config(format!("tree enumeration is limited to {MAX_TREE_VERTICES} vertices")));
    }
    let out: Vec<Vec<usize>> = (0..n)
        .map(|v| (0..edges.len()).filter(|&e| edges[e].0 == v && edges[e].1 != v).collect())
        .collect();
    let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    if others.iter().any(|&v| out[v].is_empty()) {
        return Ok(vec![]);
    }
    let mut trees = Vec::new();
    let mut choice = vec![0usize; others.len()];
    loop {
        let mut next = vec![usize::MAX; n];
        for (i, &v) in others.iter().enumerate() {
            next[v] = edges[out[v][choice[i]]].1;
        }
        let reaches = others.iter().all(|&v| {
            let mut u = v;
            for _ in 0..n {
                if u == root {
                    return true;
                }
                u = next[u];
            }
            u == root
        });
        if reaches {
            let mut t: Vec<usize> = others.iter().enumerate().map(|(i, &v)| out[v][choice[i]]).collect();
            t.sort_unstable();
            trees.push(t);
        }
        let mut i = 0;
        loop {
            if i == others.len() {
                return Ok(trees);
            }
            choice[i] += 1;
            if choice[i] < out[others[i]].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Sum over enumerated trees of the product of their labels.
pub fn tree_sum(n: usize, edges: &[(usize, usize)], labels: &[Poly], root: usize) -> Result<Poly> {
    let mut total = Poly::zero();
    for t in enumerate_rooted_trees(n, edges, root)? {
        let prod = t.iter().fold(Poly::one(), |acc, &e| acc.mul(&labels[e]));
        total = total.add(&prod);
    }
    Ok(total)
}

fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[rank][c];
                for k in c..cols {
                    let d = &f * &m[rank][k];
                    m[i][k] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    // Restricted growth strings.
    let mut out = Vec::new();
    let mut a = vec![0usize; n];
    fn rec(i: usize, max: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == a.len() {
            out.push(a.clone());
            return;
        }
        for b in 0..=max + 1 {
            a[i] = b;
            rec(i + 1, max.max(b), a, out);
        }
    }
    if n == 0 {
        return out;
    }
    rec(1, 0, &mut a, &mut out);
    out
}

/// Finest independent decomposition by trying every partition.
pub fn exhaustive_finest(net: &Network) -> Result<Decomposition> {
    let r = net.r();
    if r > MAX_PARTITION_REACTIONS {
        return Err(Error::Config(format!("exhaustive search is limited to {MAX_PARTITION_REACTIONS} reactions")));
    }
    let vectors: Vec<Vec<i64>> = (0..r).map(|i| net.reaction_vector(i)).collect();
    let total = rational_rank(&vectors);
    let mut best: Option<Vec<Vec<usize>>> = None;
    for labels in set_partitions(r) {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        if best.as_ref().is_some_and(|b| b.len() >= k) {
            continue;
        }
        let parts: Vec<Vec<usize>> = (0..k).map(|b| (0..r).filter(|&i| labels[i] == b).collect()).collect();
        let sum: usize = parts.iter().map(|p| rational_rank(&p.iter().map(|&i| vectors[i].clone()).collect::<Vec<_>>())).sum();
        if sum == total {
            best = Some(parts);
        }
    }
    build(net, best.unwrap_or_default())
}

#[derive(Clone, Debug)]
pub struct HarnessConfig {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    /// Values held fixed instead of sampled (named constants and overrides).
    pub fixed: HashMap<Symbol, f64>,
}

impl HarnessConfig {
    pub fn new(seed: u64, samples: usize, tol: f64) -> Self {
        HarnessConfig { seed, samples, tol, fixed: HashMap::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailingSample {
    pub index: usize,
    pub residual: f64,
    pub reason: String,
    pub assignment: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessReport {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub sampled: Vec<String>,
    pub max_residual: f64,
    pub median_residual: f64,
    pub passed: bool,
    /// Worst sample, when it exceeds the tolerance.
    pub failure: Option<FailingSample>,
}

/// Draws the free symbols log-uniformly on `[0.1, 10]`, evaluates the
/// parametrization and reports `max_j |f_j| / (1 + sum_r |rate_r v_rj|)`.
/// Species without an entry are sampled as free.
pub fn residual_harness(net: &Network, kin: &Kinetics, p: &Parametrization, cfg: &HarnessConfig) -> Result<HarnessReport> {
    let mut fixed = kin.constant_defaults();
    fixed.extend(cfg.fixed.iter().map(|(k, v)| (k.clone(), *v)));
    let present: BTreeSet<usize> = net.species_in_complexes();
    let mut syms: BTreeSet<Symbol> = kin.rate_constants().into_iter().collect();
    syms.extend(kin.constants.keys().cloned());
    for (_, e) in &p.entries {
        syms.extend(e.free_symbols());
    }
    for &j in &present {
        if p.get(j).is_none() {
            syms.insert(kin.conc[j].clone());
        }
    }
    let defined: BTreeSet<Symbol> = p.entries.iter().map(|(j, _)| kin.conc[*j].clone()).filter(|s| !p.free.contains(s)).collect();
    let sampled: Vec<Symbol> = syms.into_iter().filter(|s| !fixed.contains_key(s) && !defined.contains(s)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (lo, hi) = (0.1f64.ln(), 10f64.ln());
    let mut residuals = Vec::with_capacity(cfg.samples);
    let mut worst: Option<(usize, f64, String, HashMap<Symbol, f64>)> = None;
    for index in 0..cfg.samples {
        let mut env = fixed.clone();
        for s in &sampled {
            env.insert(s.clone(), rng.gen_range(lo..hi).exp());
        }
        let (res, reason) = sample_residual(net, kin, p, &mut env)?;
        residuals.push(res);
        let exceeds = !(res <= cfg.tol);
        if exceeds && worst.as_ref().is_none_or(|w| res > w.1 || (res.is_nan() && !w.1.is_nan())) {
            worst = Some((index, res, reason, env));
        }
    }
    let max_residual = residuals.iter().copied().fold(0.0, |a: f64, b| if b.is_nan() || b > a { b } else { a });
    let mut sorted: Vec<f64> = residuals.iter().map(|r| if r.is_nan() { f64::INFINITY } else { *r }).collect();
    sorted.sort_by(f64::total_cmp);
    let median_residual = if sorted.is_empty() { 0.0 } else { sorted[sorted.len() / 2] };
    let failure = worst.map(|(index, residual, reason, env)| FailingSample {
        index,
        residual,
        reason,
        assignment: env.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    });
    Ok(HarnessReport {
        seed: cfg.seed,
        samples: cfg.samples,
        tol: cfg.tol,
        sampled: sampled.iter().map(|s| s.to_string()).collect(),
        max_residual,
        median_residual,
        passed: failure.is_none(),
        failure,
    })
}

fn sample_residual(net: &Network, kin: &Kinetics, p: &Parametrization, env: &mut HashMap<Symbol, f64>) -> Result<(f64, String)> {
    // Entries may refer to other entries; evaluate in dependency order.
    let mut pending: Vec<&(usize, Expr)> = p.entries.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut later = Vec::new();
        for entry in pending {
            let (j, e) = entry;
            match e.eval_map(env) {
                Ok(v) if v.is_finite() && v > 0.0 => {
                    env.insert(kin.conc[*j].clone(), v);
                }
                Ok(v) => return Ok((f64::INFINITY, format!("{} evaluates to {v}", kin.conc[*j]))),
                Err(crate::symbolic::EvalError::Unbound(s)) if p.entries.iter().any(|(k, _)| kin.conc[*k] == s) => {
                    later.push(entry)
                }
                Err(crate::symbolic::EvalError::Unbound(s)) => {
                    return Err(Error::Config(format!("unbound symbol `{s}` in the value of {}", kin.conc[*j])))
                }
                Err(err) => return Ok((f64::INFINITY, format!("{}: {err}", kin.conc[*j]))),
            }
        }
        if later.len() == before {
            let names: Vec<String> = later.iter().map(|(j, _)| kin.conc[*j].to_string()).collect();
            return Err(Error::Config(format!("circular definitions among {}", names.join(", "))));
        }
        pending = later;
    }
    let (f, scale) = match evaluate_rhs(net, kin, env) {
        Ok(x) => x,
        Err(Error::Eval { message, .. }) => return Ok((f64::INFINITY, message)),
        Err(e) => return Err(e),
    };
    let mut worst = (0.0f64, String::new());
    for j in 0..f.len() {
        let r = f[j].abs() / (1.0 + scale[j]);
        if !r.is_finite() {
            return Ok((f64::INFINITY, format!("non-finite balance for {}", net.species()[j])));
        }
        if r > worst.0 {
            worst = (r, format!("largest imbalance in {}", net.species()[j]));
        }
    }
    Ok(worst)
}

/// Every parametrization obtained by raising one top-level exponent of one
/// entry by one, labelled by species and factor. Entries that just name a
/// free parameter are left alone.
pub fn exponent_perturbations(p: &Parametrization) -> Vec<(String, Parametrization)> {
    let mut out = Vec::new();
    for (i, (j, e)) in p.entries.iter().enumerate() {
        if matches!(e, Expr::Sym(s) if p.free.contains(s)) {
            continue;
        }
        let (c, fs) = e.factors();
        for k in 0..fs.len() {
            let mut parts = vec![Expr::Num(c.clone())];
            for (t, (b, x)) in fs.iter().enumerate() {
                let x = if t == k { x.clone() + Expr::one() } else { x.clone() };
                parts.push(b.clone().pow(x));
            }
            let mut q = p.clone();
            q.entries[i].1 = make_mul(parts);
            out.push((format!("species {j}, factor {}", fs[k].0), q));
        }
    }
    out
}

/// Product of symbol labels `l_0 .. l_{k-1}` as polynomials.
pub fn symbolic_labels(k: usize) -> Vec<Poly> {
    (0..k).map(|i| Poly::term(One::one(), Monomial::var(Symbol::new(&format!("l{i}")), 1))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_network;
    use crate::parametrization::laplacian_tree_constants;

    #[test]
    fn two_cycle_has_one_tree_per_root() {
        let edges = [(0, 1), (1, 0)];
        assert_eq!(enumerate_rooted_trees(2, &edges, 0).unwrap(), vec![vec![1]]);
        assert_eq!(enumerate_rooted_trees(2, &edges, 1).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn complete_digraph_on_four() {
        let edges: Vec<(usize, usize)> = (0..4).flat_map(|a| (0..4).filter(move |&b| b != a).map(move |b| (a, b))).collect();
        for root in 0..4 {
            assert_eq!(enumerate_rooted_trees(4, &edges, root).unwrap().len(), 16);
        }
        let labels = symbolic_labels(edges.len());
        let k = laplacian_tree_constants(4, &edges, &labels);
        for root in 0..4 {
            assert_eq!(tree_sum(4, &edges, &labels, root).unwrap(), k[root]);
        }
    }

    #[test]
    fn oversized_graph_refused() {
        assert!(enumerate_rooted_trees(9, &[], 0).is_err());
    }

    #[test]
    fn partitions_counted() {
        assert_eq!(set_partitions(4).len(), 15);
        assert_eq!(set_partitions(5).len(), 52);
    }

    #[test]
    fn exhaustive_agrees_on_small_networks() {
        let m = parse_network("R1: A -> B ; k1*a\nR2: B -> A ; k2*b\nR3: C -> D ; k3*c\nR4: D -> C ; k4*d\n").unwrap();
        assert_eq!(exhaustive_finest(&m.network).unwrap().partition(), vec![vec![0, 1], vec![2, 3]]);
        let fig = parse_network("species A B C\nR1: B + C -> A + C ; k1*b*c\nR2: A -> 0 ; k2*a\nR3: 0 -> B ; k3\nR4: 2C -> C ; k4*c^2\nR5: C -> 2C ; k5*c\n").unwrap();
        let prod = crate::decomposition::finest_independent_decomposition(&fig.network).unwrap();
        assert_eq!(exhaustive_finest(&fig.network).unwrap().partition(), prod.partition());
    }

    #[test]
    fn harness_is_reproducible_and_catches_errors() {
        let m = parse_network("R1: 0 -> X ; ka\nR2: X -> 0 ; kb*x\n").unwrap();
        let good = Parametrization { entries: vec![(0, crate::symbolic::parse_expr("ka/kb").unwrap())], free: vec![], provenance: String::new() };
        let cfg = HarnessConfig::new(7, 200, 1e-12);
        let a = residual_harness(&m.network, &m.kinetics, &good, &cfg).unwrap();
        let b = residual_harness(&m.network, &m.kinetics, &good, &cfg).unwrap();
        assert!(a.passed);
        assert_eq!(debug_repr(&a), debug_repr(&b));
        for (_, bad) in exponent_perturbations(&good) {
            let r = residual_harness(&m.network, &m.kinetics, &bad, &cfg).unwrap();
            assert!(!r.passed);
            assert!(r.failure.is_some());
        }
    }

    fn debug_repr(r: &HarnessReport) -> String {
        format!("{r:?}")
    }
}

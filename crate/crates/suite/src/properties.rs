//! Seeded property suites: each production routine against an oracle that
//! shares none of its code. Each runner returns the number of cases checked.

use proptest::prelude::*;
use proptest::test_runner::{Config, FileFailurePersistence, RngAlgorithm, TestRng, TestRunner};

use crnss::decomposition::finest_independent_decomposition;
use crnss::dsl::parse_network;
use crnss::graph::{strong_components, weak_components};
use crnss::kinetics::evaluate_rhs;
use crnss::linalg::QMatrix;
use crnss::parametrization::laplacian_tree_constants;
use crnss::symbolic::{Symbol, Q};
use crnss::translation::{check_dynamic_equivalence, translate, SigmaNaming};
use crnss::verify::{exhaustive_finest, symbolic_labels, tree_sum};

const SEED: [u8; 32] = *b"crnss-property-suites-seed-00001";

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: Some(Box::new(FileFailurePersistence::Off)), ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect()
}

/// Tree constants are taken per weakly connected component, so the oracle
/// enumerates arborescences inside each component.
fn check_matrix_tree(n: usize, edges: &[(usize, usize)]) -> Result<(), TestCaseError> {
    let labels = symbolic_labels(edges.len());
    let k = laplacian_tree_constants(n, edges, &labels);
    for comp in weak_components(n, edges) {
        let local = |v: usize| comp.iter().position(|&w| w == v);
        let (sub_edges, sub_labels): (Vec<(usize, usize)>, Vec<_>) = edges
            .iter()
            .zip(&labels)
            .filter_map(|(&(a, b), l)| Some(((local(a)?, local(b)?), l.clone())))
            .unzip();
        for (i, &root) in comp.iter().enumerate() {
            let oracle = tree_sum(comp.len(), &sub_edges, &sub_labels, i).unwrap();
            prop_assert_eq!(&k[root], &oracle, "root {} of {:?}", root, edges);
        }
    }
    Ok(())
}

/// Every strongly connected labelled digraph on 1 to 4 vertices.
pub fn matrix_tree_exhaustive() -> Result<usize, String> {
    let mut checked = 0;
    for n in 1..=4 {
        let pairs = all_pairs(n);
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e).collect();
            if strong_components(n, &edges).len() != 1 {
                continue;
            }
            check_matrix_tree(n, &edges).map_err(|e| e.to_string())?;
            checked += 1;
        }
    }
    Ok(checked)
}

pub fn matrix_tree_random(cases: u32) -> Result<usize, String> {
    let pairs = all_pairs(5);
    runner(cases)
        .run(&proptest::collection::vec(any::<bool>(), pairs.len()), |mask| {
            let edges: Vec<(usize, usize)> = pairs.iter().zip(&mask).filter(|(_, m)| **m).map(|(e, _)| *e).collect();
            check_matrix_tree(5, &edges)
        })
        .map_err(|e| e.to_string())?;
    Ok(cases as usize)
}

fn rational() -> impl Strategy<Value = Q> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

/// Random matrices of every rank: a product of `rows x k` and `k x cols`.
fn low_rank_matrix() -> impl Strategy<Value = Vec<Vec<Q>>> {
    (1usize..=5, 1usize..=5, 1usize..=4).prop_flat_map(|(r, c, k)| {
        (proptest::collection::vec(proptest::collection::vec(rational(), k), r), proptest::collection::vec(proptest::collection::vec(rational(), c), k))
            .prop_map(|(a, b)| mat_mul(&a, &b))
    })
}

fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|t| &row[t] * &b[t][j]).sum()).collect())
        .collect()
}

pub fn generalized_inverse(cases: u32) -> Result<usize, String> {
    runner(cases)
        .run(&low_rank_matrix(), |m| {
            let qm = QMatrix::from_rows(&m);
            let h = qm.generalized_inverse().to_rows();
            prop_assert_eq!(h.len(), m[0].len());
            prop_assert_eq!(mat_mul(&mat_mul(&m, &h), &m), m.clone());
            let kernel = qm.kernel_basis();
            for v in &kernel {
                let col: Vec<Vec<Q>> = v.iter().map(|x| vec![x.clone()]).collect();
                prop_assert!(mat_mul(&m, &col).iter().all(|r| r[0] == Q::from_integer(0.into())));
            }
            prop_assert_eq!(kernel.len() + qm.rank(), m[0].len());
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(cases as usize)
}

const SPECIES: [&str; 4] = ["A", "B", "C", "D"];

fn complex_text(c: &[i64]) -> String {
    let terms: Vec<String> = c
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(j, &x)| if x == 1 { SPECIES[j].to_string() } else { format!("{x}{}", SPECIES[j]) })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn mass_action_rate(i: usize, c: &[i64]) -> String {
    let mut s = format!("k{}", i + 1);
    for (j, &x) in c.iter().enumerate() {
        match x {
            0 => {}
            1 => s += &format!("*{}", SPECIES[j].to_lowercase()),
            _ => s += &format!("*{}^{x}", SPECIES[j].to_lowercase()),
        }
    }
    s
}

/// Mass-action networks as `.crn` text; duplicate reactions and self-loops
/// are dropped.
fn random_network(max_r: usize) -> impl Strategy<Value = (usize, Vec<(Vec<i64>, Vec<i64>)>)> {
    (1usize..=4).prop_flat_map(move |m| {
        let complex = proptest::collection::vec(0i64..=2, m);
        (Just(m), proptest::collection::vec((complex.clone(), complex), 1..=max_r))
    })
}

fn network_text(m: usize, reactions: &[(Vec<i64>, Vec<i64>)]) -> Option<String> {
    let mut kept: Vec<&(Vec<i64>, Vec<i64>)> = Vec::new();
    for r in reactions {
        if r.0 != r.1 && !kept.contains(&r) {
            kept.push(r);
        }
    }
    if kept.is_empty() {
        return None;
    }
    let mut s = format!("species {}\n", SPECIES[..m].join(" "));
    for (i, (a, b)) in kept.iter().enumerate() {
        s += &format!("R{}: {} -> {} ; {}\n", i + 1, complex_text(a), complex_text(b), mass_action_rate(i, a));
    }
    Some(s)
}

fn canonical(mut p: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for part in &mut p {
        part.sort_unstable();
    }
    p.sort();
    p
}

pub fn finest_decomposition(cases: u32) -> Result<usize, String> {
    runner(cases)
        .run(&random_network(8), |(m, reactions)| {
            let Some(text) = network_text(m, &reactions) else { return Ok(()) };
            let model = parse_network(&text).unwrap();
            let fast = finest_independent_decomposition(&model.network).unwrap();
            let slow = exhaustive_finest(&model.network).unwrap();
            prop_assert_eq!(canonical(fast.partition()), canonical(slow.partition()), "{}", text);
            let ranks: usize = fast.parts.iter().map(|p| p.summary.s).sum();
            prop_assert_eq!(ranks, model.network.rank());
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(cases as usize)
}

/// Returns the number of shifted networks that translated; shifts that would
/// leave a phantom edge without a kinetic complex are skipped.
pub fn translation_equivalence(cases: u32) -> Result<usize, String> {
    let strategy = random_network(6).prop_flat_map(|(m, reactions)| {
        let n = reactions.len();
        (Just(m), Just(reactions), proptest::collection::vec(proptest::collection::vec(-2i64..=2, m), n), any::<u64>())
    });
    let translated = std::cell::Cell::new(0);
    runner(cases)
        .run(&strategy, |(m, reactions, raw, point_seed)| {
            let Some(text) = network_text(m, &reactions) else { return Ok(()) };
            let model = parse_network(&text).unwrap();
            let net = &model.network;
            // Clamp each shift so both shifted complexes stay nonnegative.
            let shifts: Vec<Vec<i64>> = (0..net.r())
                .map(|r| {
                    let (y, y2) = (net.source(r), net.product(r));
                    (0..m).map(|j| raw[r % raw.len()][j].max(-y.0[j].min(y2.0[j]))).collect()
                })
                .collect();
            let Ok(g) = translate(net, &model.kinetics, &shifts, SigmaNaming::default()) else { return Ok(()) };
            prop_assert!(check_dynamic_equivalence(net, &model.kinetics, &g).is_empty(), "{}", text);
            // Same vector field numerically, at a random positive point.
            let mut state = point_seed;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                0.1 + (state >> 11) as f64 / (1u64 << 53) as f64 * 9.9
            };
            let mut env = std::collections::HashMap::new();
            for s in model.kinetics.rate_constants() {
                env.insert(s, next());
            }
            for c in &model.kinetics.conc {
                env.insert(c.clone(), next());
            }
            for s in &g.sigmas {
                env.insert(s.clone(), next());
            }
            let (f, scale) = evaluate_rhs(net, &model.kinetics, &env).unwrap();
            let ft = g.formation_rate(&model.kinetics.conc);
            let lookup = |s: &Symbol| env.get(s).copied();
            for j in 0..m {
                let v = ft[j].eval(&lookup).unwrap();
                prop_assert!((v - f[j]).abs() <= 1e-12 * (1.0 + scale[j]), "species {}: {} vs {}", j, v, f[j]);
            }
            translated.set(translated.get() + 1);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(translated.get())
}

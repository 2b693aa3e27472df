//! Structural and numerical invariants of each stage, as seeded properties.

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use proptest::test_runner::{Config, FileFailurePersistence, RngAlgorithm, TestRng, TestRunner};

use crnss::bundled;
use crnss::crn::Network;
use crnss::decomposition::{finest_independent_decomposition, is_independent, restrict_kinetics};
use crnss::dsl::{parse_network, render_network, Model};
use crnss::kinetics::{evaluate_rhs, formation_rate};
use crnss::linalg::exact_rank;
use crnss::merge::{acr_report, entry_equations, forest_relations, merge_equations, Equation};
use crnss::mixed::{clear_denominators, default_free, solve_by_elimination};
use crnss::parametrization::{parametrize, ParamOptions, Parametrization};
use crnss::pipeline::{directed_shifts, run_pipeline, translate_and_parametrize, PipelineOptions};
use crnss::symbolic::{make_add, rational_equal, vanishes, Expr, Symbol};
use crnss::translation::{search_translation, translate, SearchBudget, SigmaNaming};
use crnss::verify::{residual_harness, HarnessConfig};

fn runner(cases: u32, seed: u8) -> TestRunner {
    let config = Config { cases, failure_persistence: Some(Box::new(FileFailurePersistence::Off)), ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

const SPECIES: [&str; 4] = ["A", "B", "C", "D"];

fn complex_text(c: &[i64]) -> String {
    let t: Vec<String> = c
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(j, &x)| if x == 1 { SPECIES[j].to_string() } else { format!("{x}{}", SPECIES[j]) })
        .collect();
    if t.is_empty() {
        "0".into()
    } else {
        t.join(" + ")
    }
}

fn mass_action(i: usize, c: &[i64]) -> String {
    let mut s = format!("k{}", i + 1);
    for (j, &x) in c.iter().enumerate() {
        if x == 1 {
            s += &format!("*{}", SPECIES[j].to_lowercase());
        } else if x > 1 {
            s += &format!("*{}^{x}", SPECIES[j].to_lowercase());
        }
    }
    s
}

/// Random mass-action networks as `.crn` text.
fn networks(max_r: usize) -> impl Strategy<Value = String> {
    (1usize..=4)
        .prop_flat_map(move |m| {
            let c = proptest::collection::vec(0i64..=2, m);
            (Just(m), proptest::collection::vec((c.clone(), c), 1..=max_r))
        })
        .prop_filter_map("no proper reactions", |(m, rs)| {
            let mut kept: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
            for r in rs {
                if r.0 != r.1 && !kept.contains(&r) {
                    kept.push(r);
                }
            }
            if kept.is_empty() {
                return None;
            }
            let mut s = format!("species {}\n", SPECIES[..m].join(" "));
            for (i, (a, b)) in kept.iter().enumerate() {
                s += &format!("R{}: {} -> {} ; {}\n", i + 1, complex_text(a), complex_text(b), mass_action(i, a));
            }
            Some(s)
        })
}

fn positive_env(model: &Model, extra: &[Symbol], seed: u64) -> HashMap<Symbol, f64> {
    let mut state = seed | 1;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        0.1 + (state >> 11) as f64 / (1u64 << 53) as f64 * 9.9
    };
    let mut env = HashMap::new();
    for s in model.kinetics.rate_constants().iter().chain(&model.kinetics.conc).chain(extra) {
        env.insert(s.clone(), next());
    }
    env
}

fn permuted(net: &Network, order: &[usize]) -> String {
    let mut s = format!("species {}\n", net.species().join(" "));
    for &r in order {
        s += &format!("{} ; k\n", net.render_reaction(r));
    }
    s
}

#[test]
fn deficiency_and_rank() {
    runner(300, 1)
        .run(&networks(8), |text| {
            let net = parse_network(&text).unwrap().network;
            let s = net.summary();
            prop_assert_eq!(s.delta, s.n as i64 - s.ell as i64 - s.s as i64);
            prop_assert!(s.delta >= 0);
            let mut rows = s.stoich_matrix.clone();
            let before = exact_rank(&transpose(&rows));
            for r in 0..net.r() {
                for (j, v) in net.reaction_vector(r).into_iter().enumerate() {
                    rows[j].push(v);
                }
            }
            prop_assert_eq!(exact_rank(&transpose(&rows)), before);
            let linkage = net.linkage_classes();
            for strong in net.strong_linkage_classes() {
                let homes = linkage.iter().filter(|l| strong.iter().all(|v| l.contains(v))).count();
                prop_assert_eq!(homes, 1);
            }
            Ok(())
        })
        .unwrap();
}

fn transpose(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let cols = rows.first().map_or(0, Vec::len);
    (0..cols).map(|c| rows.iter().map(|r| r[c]).collect()).collect()
}

#[test]
fn weak_reversibility_ignores_order() {
    runner(200, 2)
        .run(&networks(6).prop_flat_map(|t| (Just(t), any::<u64>())), |(text, seed)| {
            let net = parse_network(&text).unwrap().network;
            let mut order: Vec<usize> = (0..net.r()).collect();
            order.sort_by_key(|r| (*r as u64).wrapping_mul(seed | 1).rotate_left(17));
            let reordered = parse_network(&permuted(&net, &order)).unwrap().network;
            prop_assert_eq!(net.is_weakly_reversible(), reordered.is_weakly_reversible());
            // Species relabelled by reversing the header.
            let reversed: Vec<String> = net.species().iter().rev().cloned().collect();
            let mut body = format!("species {}\n", reversed.join(" "));
            for r in 0..net.r() {
                body += &format!("{} ; k\n", net.render_reaction(r));
            }
            prop_assert_eq!(parse_network(&body).unwrap().network.is_weakly_reversible(), net.is_weakly_reversible());
            Ok(())
        })
        .unwrap();
}

#[test]
fn rhs_matches_direct_monomials() {
    runner(200, 3)
        .run(&networks(6).prop_flat_map(|t| (Just(t), any::<u64>())), |(text, seed)| {
            let model = parse_network(&text).unwrap();
            let net = &model.network;
            for k in 0..5u64 {
                let env = positive_env(&model, &[], seed.wrapping_add(k));
                let (f, _) = evaluate_rhs(net, &model.kinetics, &env).unwrap();
                let mut direct = vec![0.0; net.m()];
                for r in 0..net.r() {
                    let mut rate = env[&Symbol::new(&format!("k{}", r + 1))];
                    for (j, &y) in net.source(r).0.iter().enumerate() {
                        rate *= env[&model.kinetics.conc[j]].powi(y as i32);
                    }
                    for (j, v) in net.reaction_vector(r).into_iter().enumerate() {
                        direct[j] += v as f64 * rate;
                    }
                }
                for j in 0..net.m() {
                    prop_assert!((f[j] - direct[j]).abs() <= 1e-12 * (1.0 + direct[j].abs()));
                }
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn formation_rate_adds_over_parts() {
    runner(150, 4)
        .run(&networks(6).prop_flat_map(|t| (Just(t), any::<u32>())), |(text, mask)| {
            let model = parse_network(&text).unwrap();
            let net = &model.network;
            let (a, b): (Vec<usize>, Vec<usize>) = (0..net.r()).partition(|r| mask >> r & 1 == 1);
            let whole = formation_rate(net, &model.kinetics);
            let fa = formation_rate(&net.subnetwork(&a), &model.kinetics.restrict(&a));
            let fb = formation_rate(&net.subnetwork(&b), &model.kinetics.restrict(&b));
            for j in 0..net.m() {
                prop_assert_eq!(rational_equal(&whole[j], &make_add(vec![fa[j].clone(), fb[j].clone()])), Some(true));
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn render_parse_round_trip() {
    runner(200, 5)
        .run(&networks(8), |text| {
            let model = parse_network(&text).unwrap();
            let rendered = render_network(&model);
            let again = parse_network(&rendered).unwrap();
            prop_assert_eq!(&again.network, &model.network);
            prop_assert_eq!(&again.kinetics, &model.kinetics);
            prop_assert_eq!(render_network(&again), rendered);
            Ok(())
        })
        .unwrap();
}

#[test]
fn mutated_input_yields_diagnostics_not_panics() {
    let base = bundled::get("insulin.crn").unwrap().to_string();
    let tokens = ["->", "<->", ";", "+", "*", "(", ")", "^", "2", "R1:", "species", "translate", "", "0", "x", "#"];
    let strategy = proptest::collection::vec((0..base.len(), 0..tokens.len()), 1..6);
    runner(300, 6)
        .run(&strategy, |edits| {
            let mut text = base.clone();
            for (at, t) in edits {
                let mut at = at.min(text.len());
                while !text.is_char_boundary(at) {
                    at -= 1;
                }
                let end = (at + 2).min(text.len());
                let end = if text.is_char_boundary(end) { end } else { at };
                text.replace_range(at..end, tokens[t]);
            }
            if let Err(crnss::Error::Parse(d)) = parse_network(&text) {
                prop_assert!(!d.is_empty());
                prop_assert!(d.iter().all(|x| x.span.line >= 1 && x.span.start <= x.span.end));
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn decomposition_is_independent_maximal_and_order_free() {
    runner(200, 7)
        .run(&networks(7).prop_flat_map(|t| (Just(t), any::<u64>())), |(text, seed)| {
            let net = parse_network(&text).unwrap().network;
            let dec = finest_independent_decomposition(&net).unwrap();
            prop_assert!(is_independent(&net, &dec.partition()).unwrap());
            for part in dec.partition() {
                if part.len() < 2 || part.len() > 6 {
                    continue;
                }
                for mask in 1..(1u32 << part.len()) - 1 {
                    let (a, b): (Vec<usize>, Vec<usize>) = part.iter().enumerate().fold((vec![], vec![]), |(mut a, mut b), (i, &r)| {
                        if mask >> i & 1 == 1 {
                            a.push(r)
                        } else {
                            b.push(r)
                        }
                        (a, b)
                    });
                    let mut split: Vec<Vec<usize>> = dec.partition().into_iter().filter(|p| *p != part).collect();
                    split.push(a);
                    split.push(b);
                    prop_assert!(!is_independent(&net, &split).unwrap());
                }
            }
            let mut order: Vec<usize> = (0..net.r()).collect();
            order.sort_by_key(|r| (*r as u64 + 1).wrapping_mul(seed | 1).rotate_left(29));
            let other = parse_network(&permuted(&net, &order)).unwrap().network;
            let by_label = |n: &Network| -> BTreeSet<BTreeSet<String>> {
                finest_independent_decomposition(n)
                    .unwrap()
                    .parts
                    .into_iter()
                    .map(|p| p.reactions.iter().map(|&r| n.render_reaction(r)).collect())
                    .collect()
            };
            prop_assert_eq!(by_label(&net), by_label(&other));
            Ok(())
        })
        .unwrap();
}

#[test]
fn phantom_edges_and_edge_vectors() {
    runner(200, 8)
        .run(&networks(6).prop_flat_map(|t| (Just(t), proptest::collection::vec(-1i64..=1, 4))), |(text, raw)| {
            let model = parse_network(&text).unwrap();
            let net = &model.network;
            let shifts: Vec<Vec<i64>> = (0..net.r())
                .map(|r| (0..net.m()).map(|j| raw[j].max(-net.source(r).0[j].min(net.product(r).0[j]))).collect())
                .collect();
            let Ok(g) = translate(net, &model.kinetics, &shifts, SigmaNaming::default()) else { return Ok(()) };
            for e in g.edges.iter().filter(|e| !e.phantom) {
                let r = e.reaction.unwrap();
                prop_assert_eq!(g.vertices[e.head].stoich.diff(&g.vertices[e.tail].stoich), net.reaction_vector(r));
            }
            let mut bare = g.clone();
            bare.edges.retain(|e| !e.phantom);
            let with = g.formation_rate(&model.kinetics.conc);
            let without = bare.formation_rate(&model.kinetics.conc);
            for j in 0..net.m() {
                prop_assert_eq!(rational_equal(&with[j], &without[j]), Some(true));
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn translated_networks_parametrize_correctly() {
    let found = std::cell::Cell::new(0);
    runner(400, 9)
        .run(&networks(4), |text| {
            let model = parse_network(&text).unwrap();
            let (net, kin) = (&model.network, &model.kinetics);
            let Some(shifts) = search_translation(net, kin, &SearchBudget::default()) else { return Ok(()) };
            let g = translate(net, kin, &shifts, SigmaNaming::default()).unwrap();
            let columns: Vec<usize> = net.species_in_complexes().into_iter().collect();
            let Ok((sys, p)) = parametrize(&g, &columns, &ParamOptions::default()) else { return Ok(()) };
            prop_assert!(sys.m.mul(&sys.h).mul(&sys.m) == sys.m);
            prop_assert!(sys.m.mul(&sys.b).is_zero());
            let h = residual_harness(net, kin, &p, &HarnessConfig::new(5, 30, 1e-9)).unwrap();
            prop_assert!(h.passed, "{}\n{:?}\n{:?}", text, p, h.failure);
            found.set(found.get() + 1);
            Ok(())
        })
        .unwrap();
    assert!(found.get() >= 10, "only {} networks translated", found.get());
}

fn enzyme() -> Model {
    parse_network(bundled::get("enzyme.crn").unwrap()).unwrap()
}

#[test]
fn forest_and_inverse_choice_do_not_matter() {
    let m = enzyme();
    let all: Vec<usize> = (0..m.network.r()).collect();
    let g = translate(&m.network, &m.kinetics, &directed_shifts(&m, &all).unwrap(), SigmaNaming::default()).unwrap();
    let forests = [None, Some(vec![(0, 1), (0, 2), (0, 3), (0, 4)]), Some(vec![(1, 0), (2, 1), (3, 2), (4, 3)])];
    let mut outcomes = Vec::new();
    for forest in forests {
        let (_, p) = parametrize(&g, &[0, 1, 2, 3], &ParamOptions { forest, ..Default::default() }).unwrap();
        let h = residual_harness(&m.network, &m.kinetics, &p, &HarnessConfig::new(3, 2000, 1e-12)).unwrap();
        assert!(h.passed, "{:?}", h.failure);
        outcomes.push(p);
    }
    for p in &outcomes[1..] {
        for j in 0..4 {
            assert!(vanishes(&(p.get(j).unwrap().clone() - outcomes[0].get(j).unwrap().clone())));
        }
    }
}

#[test]
fn cleared_system_scales_the_vector_field() {
    let m = parse_network(bundled::get("yu_craciun.crn").unwrap()).unwrap();
    let c = clear_denominators(&m.network, &m.kinetics).unwrap();
    let subs = c.substitution_map();
    let f = formation_rate(&m.network, &m.kinetics);
    let g = formation_rate(&c.network, &c.kinetics);
    for seed in 0..1000u64 {
        let env = positive_env(&m, &[], seed * 7919 + 1);
        let lookup = |s: &Symbol| env.get(s).copied();
        let d = c.denominator.eval(&lookup).unwrap();
        for j in 0..2 {
            let lhs = d * f[j].eval(&lookup).unwrap();
            let rhs = g[j].subst(&subs).eval(&lookup).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
        }
    }
}

fn insulin() -> Model {
    parse_network(bundled::get("insulin.crn").unwrap()).unwrap()
}

#[test]
fn elimination_parts_are_exact() {
    let m = insulin();
    let dec = finest_independent_decomposition(&m.network).unwrap();
    for (part, (kin, pure)) in dec.parts.iter().zip(restrict_kinetics(&m.kinetics, &dec)) {
        if pure {
            continue;
        }
        let sub = m.network.subnetwork(&part.reactions);
        let free = default_free(&sub, &kin, &m.free);
        let (plan, p) = solve_by_elimination(&sub, &kin, &free).unwrap();
        assert!(plan.steps.iter().all(|s| !s.certificate.is_empty()));
        let h = residual_harness(&sub, &kin, &p, &HarnessConfig::new(13, 500, 1e-12)).unwrap();
        assert!(h.passed, "{:?}", h.failure);
    }
}

/// The merge inputs of each insulin part, as the pipeline builds them.
fn insulin_part_equations(m: &Model) -> (Vec<Vec<Equation>>, Vec<Symbol>) {
    let dec = finest_independent_decomposition(&m.network).unwrap();
    let mut groups = Vec::new();
    let mut params = Vec::new();
    for (i, (part, (kin, pure))) in dec.parts.iter().zip(restrict_kinetics(&m.kinetics, &dec)).enumerate() {
        let sub = m.network.subnetwork(&part.reactions);
        let origin = format!("part {}", i + 1);
        if pure {
            let naming = SigmaNaming { part: Some(i + 1) };
            let opts = ParamOptions { part: Some(i + 1), ..Default::default() };
            let tp = translate_and_parametrize(&sub, &kin, directed_shifts(m, &part.reactions), naming, &SearchBudget::default(), &opts).unwrap();
            params.extend(tp.system.sigmas.iter().cloned());
            groups.push(forest_relations(&tp.system, &m.kinetics.conc, &origin));
        } else {
            let free = default_free(&sub, &kin, &m.free);
            let (_, p) = solve_by_elimination(&sub, &kin, &free).unwrap();
            groups.push(entry_equations(&p, &m.kinetics.conc, &origin));
        }
    }
    (groups, params)
}

#[test]
fn merge_is_order_independent() {
    let m = insulin();
    let (groups, params) = insulin_part_equations(&m);
    let species: Vec<usize> = m.network.species_in_complexes().into_iter().collect();
    let merge = |order: &[usize]| -> Parametrization {
        let eqs: Vec<Equation> = order.iter().flat_map(|&i| groups[i].clone()).collect();
        merge_equations(&species, &m.kinetics.conc, eqs, &params, &m.free).unwrap().parametrization
    };
    let base = merge(&(0..groups.len()).collect::<Vec<_>>());
    let n = groups.len();
    runner(20, 10)
        .run(&Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), |order| {
            let p = merge(&order);
            prop_assert_eq!(&p.free, &base.free);
            for (j, e) in &base.entries {
                prop_assert!(vanishes(&(p.get(*j).unwrap().clone() - e.clone())), "{}", m.network.species()[*j]);
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn acr_ignores_free_parameter_names() {
    for name in ["enzyme.crn", "insulin.crn", "three_species.crn"] {
        let m = parse_network(bundled::get(name).unwrap()).unwrap();
        let p = run_pipeline(&m, &PipelineOptions::default()).parametrization.unwrap();
        let rename: HashMap<Symbol, Expr> = p.free.iter().enumerate().map(|(i, s)| (s.clone(), Expr::Sym(Symbol::new(&format!("renamed{i}"))))).collect();
        let mut q = p.clone();
        for (_, e) in q.entries.iter_mut() {
            *e = e.subst(&rename);
        }
        q.free = p.free.iter().map(|s| rename[s].as_sym().unwrap().clone()).collect();
        let verdicts = |x: &Parametrization| acr_report(x, &m.kinetics.conc).into_iter().map(|a| (a.species, a.acr)).collect::<Vec<_>>();
        assert_eq!(verdicts(&p), verdicts(&q), "{name}");
    }
}

#[test]
fn parametrized_values_stay_positive() {
    let m = insulin();
    let p = run_pipeline(&m, &PipelineOptions::default()).parametrization.unwrap();
    let h = residual_harness(&m.network, &m.kinetics, &p, &HarnessConfig::new(17, 2000, 1e-9)).unwrap();
    assert!(h.passed, "{:?}", h.failure);
}

//! Network translation into generalized networks with stoichiometric and
//! kinetic complexes, phantom edges and representative vertices.

use std::collections::HashMap;

use serde::Serialize;

use crate::crn::{Complex, Network};
use crate::error::{Error, Result};
use crate::graph;
use crate::kinetics::{formation_rate, KineticsTag, Kinetics};
use crate::linalg::exact_rank;
use crate::symbolic::{make_mul, rational_equal, Expr, Symbol};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Vertex {
    pub stoich: Complex,
    /// `None` only for vertices that never act as a source.
    pub kinetic: Option<Complex>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    #[serde(serialize_with = "crate::report::ser_display")]
    pub label: Expr,
    pub phantom: bool,
    /// Originating reaction for effective edges.
    pub reaction: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneralizedNetwork {
    pub species: Vec<String>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    /// Lowest-index vertex of each stoichiometric class.
    pub representatives: Vec<usize>,
    /// Per original reaction.
    pub shifts: Vec<Vec<i64>>,
    #[serde(serialize_with = "crate::report::ser_display_vec")]
    pub sigmas: Vec<Symbol>,
}

/// How phantom-edge parameters are named.
#[derive(Clone, Copy, Debug, Default)]
pub struct SigmaNaming {
    pub part: Option<usize>,
}

impl SigmaNaming {
    pub fn name(&self, i: usize, count: usize) -> Symbol {
        match (self.part, count) {
            (None, 1) => Symbol::new("sigma"),
            (None, _) => Symbol::new(&format!("sigma{}", i + 1)),
            (Some(p), 1) => Symbol::new(&format!("sigma_{p}")),
            (Some(p), _) => Symbol::new(&format!("sigma_{p}_{}", i + 1)),
        }
    }
}

/// Rate coefficient of a mass-action law: the law with the concentration
/// factors removed.
pub fn mass_action_label(expr: &Expr, kin: &Kinetics) -> Expr {
    let (c, fs) = expr.factors();
    let mut keep = vec![Expr::Num(c)];
    for (b, e) in fs {
        if b.as_sym().is_some_and(|s| kin.is_conc(s)) {
            continue;
        }
        keep.push(b.pow(e));
    }
    make_mul(keep)
}

/// Builds the generalized network obtained by adding `shifts[r]` to both
/// complexes of reaction `r`. Kinetic complexes are the original sources.
pub fn translate(net: &Network, kin: &Kinetics, shifts: &[Vec<i64>], naming: SigmaNaming) -> Result<GeneralizedNetwork> {
    if let Some(r) = kin.rates.iter().position(|r| r.tag != KineticsTag::MassAction) {
        return Err(Error::Inapplicable(format!("reaction {} is not mass action", net.reactions()[r].label)));
    }
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    for r in 0..net.r() {
        let shift = &shifts[r];
        let label = &net.reactions()[r].label;
        let ys = net.source(r).shifted(shift).ok_or_else(|| Error::Structural(format!("shift of {label} makes the source negative")))?;
        let yp = net.product(r).shifted(shift).ok_or_else(|| Error::Structural(format!("shift of {label} makes the product negative")))?;
        let yk = net.source(r).clone();
        let tail = match vertices.iter().position(|v| v.stoich == ys && v.kinetic.as_ref() == Some(&yk)) {
            Some(i) => i,
            None => match vertices.iter().position(|v| v.stoich == ys && v.kinetic.is_none()) {
                Some(i) => {
                    vertices[i].kinetic = Some(yk);
                    i
                }
                None => {
                    vertices.push(Vertex { stoich: ys, kinetic: Some(yk) });
                    vertices.len() - 1
                }
            },
        };
        let head = match vertices.iter().position(|v| v.stoich == yp) {
            Some(i) => i,
            None => {
                vertices.push(Vertex { stoich: yp, kinetic: None });
                vertices.len() - 1
            }
        };
        edges.push(Edge { tail, head, label: mass_action_label(&kin.rates[r].expr, kin), phantom: false, reaction: Some(r) });
    }
    let mut representatives = Vec::new();
    let mut phantom_pairs = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        match vertices[..i].iter().position(|w| w.stoich == v.stoich) {
            Some(rep) => phantom_pairs.push((rep, i)),
            None => representatives.push(i),
        }
    }
    let count = phantom_pairs.len();
    let mut sigmas = Vec::new();
    for (k, (rep, i)) in phantom_pairs.into_iter().enumerate() {
        if vertices[rep].kinetic.is_none() {
            return Err(Error::Inapplicable("phantom edge would leave a vertex without a kinetic complex".into()));
        }
        let s = naming.name(k, count);
        sigmas.push(s.clone());
        edges.push(Edge { tail: rep, head: i, label: Expr::Sym(s), phantom: true, reaction: None });
    }
    Ok(GeneralizedNetwork { species: net.species().to_vec(), vertices, edges, representatives, shifts: shifts.to_vec(), sigmas })
}

fn deficiency(n: usize, edges: &[(usize, usize)], vectors: &[Vec<i64>]) -> i64 {
    let ell = graph::weak_components(n, edges).len();
    let s = exact_rank(vectors);
    n as i64 - ell as i64 - s as i64
}

impl GeneralizedNetwork {
    pub fn kinetic(&self, v: usize) -> &Complex {
        self.vertices[v].kinetic.as_ref().unwrap_or(&self.vertices[v].stoich)
    }

    fn all_edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.tail, e.head)).collect()
    }

    /// Deficiency of the stoichiometric network: distinct stoichiometric
    /// complexes joined by effective edges.
    pub fn effective_deficiency(&self) -> i64 {
        let rep_of = |v: usize| self.representatives.iter().position(|&r| self.vertices[r].stoich == self.vertices[v].stoich).unwrap();
        let edges: Vec<(usize, usize)> = self.edges.iter().filter(|e| !e.phantom).map(|e| (rep_of(e.tail), rep_of(e.head))).collect();
        let vectors: Vec<Vec<i64>> =
            self.edges.iter().filter(|e| !e.phantom).map(|e| self.vertices[e.head].stoich.diff(&self.vertices[e.tail].stoich)).collect();
        deficiency(self.representatives.len(), &edges, &vectors)
    }

    /// Deficiency of the kinetic-order network: all vertices and edges,
    /// complexes read through the kinetic map.
    pub fn kinetic_deficiency(&self) -> i64 {
        deficiency(self.vertices.len(), &self.all_edges(), &self.kinetic_differences())
    }

    pub fn kinetic_differences(&self) -> Vec<Vec<i64>> {
        self.edges.iter().map(|e| self.kinetic(e.head).diff(self.kinetic(e.tail))).collect()
    }

    pub fn is_weakly_reversible(&self) -> bool {
        graph::is_weakly_reversible(self.vertices.len(), &self.all_edges())
    }

    pub fn stoichiometric_weakly_reversible(&self) -> bool {
        let rep_of = |v: usize| self.representatives.iter().position(|&r| self.vertices[r].stoich == self.vertices[v].stoich).unwrap();
        let edges: Vec<(usize, usize)> = self.edges.iter().filter(|e| !e.phantom).map(|e| (rep_of(e.tail), rep_of(e.head))).collect();
        graph::is_weakly_reversible(self.representatives.len(), &edges)
    }

    pub fn is_v_star_directed(&self) -> bool {
        let is_rep = |v: usize| self.representatives.contains(&v);
        self.edges.iter().all(|e| if e.phantom { is_rep(e.tail) } else { is_rep(e.head) })
    }

    /// True when the parametrization theorem applies.
    pub fn theorem_applies(&self) -> std::result::Result<(), String> {
        if !self.is_weakly_reversible() {
            return Err("translated network is not weakly reversible".into());
        }
        if !self.stoichiometric_weakly_reversible() {
            return Err("stoichiometric network is not weakly reversible".into());
        }
        if !self.is_v_star_directed() {
            return Err("translated network is not V*-directed".into());
        }
        let de = self.effective_deficiency();
        if de != 0 {
            return Err(format!("effective deficiency is {de}"));
        }
        let dk = self.kinetic_deficiency();
        if dk != 0 {
            return Err(format!("kinetic deficiency is {dk}"));
        }
        Ok(())
    }

    /// Formation rate of the translated system: effective edges only, rate
    /// `label * x^kinetic(tail)`.
    pub fn formation_rate(&self, conc: &[Symbol]) -> Vec<Expr> {
        let m = self.species.len();
        let mut acc: Vec<Vec<Expr>> = vec![Vec::new(); m];
        for e in self.edges.iter().filter(|e| !e.phantom) {
            let y = self.kinetic(e.tail);
            let mut fs = vec![e.label.clone()];
            for (j, &c) in y.0.iter().enumerate() {
                if c != 0 {
                    fs.push(Expr::Sym(conc[j].clone()).powi(c));
                }
            }
            let rate = make_mul(fs);
            for (j, d) in self.vertices[e.head].stoich.diff(&self.vertices[e.tail].stoich).into_iter().enumerate() {
                if d != 0 {
                    acc[j].push(Expr::int(d) * rate.clone());
                }
            }
        }
        acc.into_iter().map(Expr::sum).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let k = v.kinetic.as_ref().map(|k| k.render(&self.species)).unwrap_or_else(|| "-".into());
            let star = if self.representatives.contains(&i) { "*" } else { "" };
            out.push_str(&format!("v{}{}: {} ({})\n", i + 1, star, v.stoich.render(&self.species), k));
        }
        for e in &self.edges {
            let kind = if e.phantom { "phantom" } else { "effective" };
            out.push_str(&format!("v{} -> v{} [{}] {}\n", e.tail + 1, e.head + 1, e.label, kind));
        }
        out
    }
}

/// Symbolic check that the translated and original systems have the same
/// right-hand side. Returns the species whose coordinates differ.
pub fn check_dynamic_equivalence(net: &Network, kin: &Kinetics, g: &GeneralizedNetwork) -> Vec<usize> {
    let f = formation_rate(net, kin);
    let ft = g.formation_rate(&kin.conc);
    (0..net.m()).filter(|&j| rational_equal(&f[j], &ft[j]) != Some(true)).collect()
}

#[derive(Clone, Debug)]
pub struct SearchBudget {
    /// Maximum L1 norm of a single linkage-class shift.
    pub max_norm: i64,
    pub max_evaluations: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_norm: 2, max_evaluations: 100_000 }
    }
}

/// Searches uniform shifts per linkage class for a translation with both
/// deficiencies zero. Deterministic: smaller total shift first.
pub fn search_translation(net: &Network, kin: &Kinetics, budget: &SearchBudget) -> Option<Vec<Vec<i64>>> {
    let m = net.m();
    let classes = net.linkage_classes();
    let class_of: HashMap<usize, usize> = classes.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |&v| (v, i))).collect();
    let species: Vec<usize> = net.species_in_complexes().into_iter().collect();
    let norm = |v: &[i64]| v.iter().map(|x| x.abs()).sum::<i64>();

    let mut candidates: Vec<Vec<Vec<i64>>> = Vec::new();
    for (ci, class) in classes.iter().enumerate() {
        let mut cands: Vec<Vec<i64>> = vec![vec![0; m]];
        for &v in class {
            for (w, other) in net.complexes().iter().enumerate() {
                if class_of[&w] != ci {
                    cands.push(other.diff(&net.complexes()[v]));
                }
            }
        }
        for &j in &species {
            for sign in [1, -1] {
                let mut e = vec![0; m];
                e[j] = sign;
                cands.push(e);
            }
        }
        cands.retain(|c| norm(c) <= budget.max_norm && class.iter().all(|&v| net.complexes()[v].shifted(c).is_some()));
        cands.sort_by(|a, b| norm(a).cmp(&norm(b)).then_with(|| b.cmp(a)));
        cands.dedup();
        candidates.push(cands);
    }

    let reaction_class: Vec<usize> = (0..net.r()).map(|r| class_of[&net.reactions()[r].source]).collect();
    let mut evaluations = 0;
    let max_total = budget.max_norm * classes.len() as i64;
    let mut choice = vec![0usize; classes.len()];
    for total in 0..=max_total {
        if let Some(found) =
            search_rec(net, kin, &candidates, &reaction_class, 0, total, &mut choice, &mut evaluations, budget.max_evaluations, &norm)
        {
            return Some(found);
        }
        if evaluations >= budget.max_evaluations {
            return None;
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn search_rec(
    net: &Network,
    kin: &Kinetics,
    cands: &[Vec<Vec<i64>>],
    reaction_class: &[usize],
    depth: usize,
    remaining: i64,
    choice: &mut Vec<usize>,
    evaluations: &mut usize,
    cap: usize,
    norm: &dyn Fn(&[i64]) -> i64,
) -> Option<Vec<Vec<i64>>> {
    if *evaluations >= cap {
        return None;
    }
    if depth == cands.len() {
        if remaining != 0 {
            return None;
        }
        *evaluations += 1;
        let shifts: Vec<Vec<i64>> = reaction_class.iter().map(|&c| cands[c][choice[c]].clone()).collect();
        let g = translate(net, kin, &shifts, SigmaNaming::default()).ok()?;
        return g.theorem_applies().is_ok().then_some(shifts);
    }
    for (i, c) in cands[depth].iter().enumerate() {
        let n = norm(c);
        if n > remaining {
            continue;
        }
        if depth + 1 == cands.len() && n != remaining {
            continue;
        }
        choice[depth] = i;
        if let Some(found) = search_rec(net, kin, cands, reaction_class, depth + 1, remaining - n, choice, evaluations, cap, norm) {
            return Some(found);
        }
    }
    None
}

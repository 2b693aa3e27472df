//! Tree constants and the closed-form positive steady-state parametrization
//! of weakly reversible, deficiency-zero translated networks.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph;
use crate::linalg::QMatrix;
use crate::report::ser_display_vec;
use crate::symbolic::{make_mul, q, Expr, Poly, Symbol};
use crate::translation::GeneralizedNetwork;

/// Per-species closed forms over rate constants and free parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Parametrization {
    /// `(species index, expression)`, ascending by species.
    #[serde(serialize_with = "ser_entries")]
    pub entries: Vec<(usize, Expr)>,
    #[serde(serialize_with = "ser_display_vec")]
    pub free: Vec<Symbol>,
    pub provenance: String,
}

fn ser_entries<S: serde::Serializer>(v: &[(usize, Expr)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(j, e)| (j, e.to_string())))
}

impl Parametrization {
    pub fn get(&self, j: usize) -> Option<&Expr> {
        self.entries.iter().find(|(k, _)| *k == j).map(|(_, e)| e)
    }

    pub fn species(&self) -> Vec<usize> {
        self.entries.iter().map(|(j, _)| *j).collect()
    }
}

/// Determinant of a polynomial matrix by fraction-free elimination.
pub fn poly_det(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut prev = Poly::one();
    let mut negate = false;
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Poly::zero();
            };
            m.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = Poly::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        d
    }
}

fn edge_labels(g: &GeneralizedNetwork) -> Result<Vec<Poly>> {
    g.edges
        .iter()
        .map(|e| {
            Poly::from_expr(&e.label).ok_or_else(|| Error::Inapplicable(format!("edge label `{}` is not polynomial", e.label)))
        })
        .collect()
}

/// `K_i`: sum over spanning trees oriented toward `i` (within its weak
/// component) of the product of edge labels. Laplacian cofactors.
pub fn tree_constants(g: &GeneralizedNetwork) -> Result<Vec<Poly>> {
    let labels = edge_labels(g)?;
    let pairs: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.tail, e.head)).collect();
    Ok(laplacian_tree_constants(g.vertices.len(), &pairs, &labels))
}

/// Directed matrix-tree theorem on a labelled digraph, per weak component.
pub fn laplacian_tree_constants(n: usize, pairs: &[(usize, usize)], labels: &[Poly]) -> Vec<Poly> {
    let mut out = vec![Poly::one(); n];
    for comp in graph::weak_components(n, pairs) {
        let pos = |v: usize| comp.iter().position(|&c| c == v);
        let k = comp.len();
        let mut lap = vec![vec![Poly::zero(); k]; k];
        for (e, &(t, h)) in pairs.iter().enumerate() {
            let (Some(a), Some(b)) = (pos(t), pos(h)) else { continue };
            if a == b {
                continue;
            }
            lap[a][a] = lap[a][a].add(&labels[e]);
            lap[a][b] = lap[a][b].sub(&labels[e]);
        }
        for (i, &v) in comp.iter().enumerate() {
            let minor: Vec<Vec<Poly>> = (0..k)
                .filter(|&r| r != i)
                .map(|r| (0..k).filter(|&c| c != i).map(|c| lap[r][c].clone()).collect())
                .collect();
            out[v] = poly_det(minor);
        }
    }
    out
}

/// Breadth-first spanning forest: per weak component from its lowest vertex,
/// edges scanned in index order in either direction. Returns `(tail, head)`
/// in true orientation.
pub fn spanning_forest(g: &GeneralizedNetwork) -> Vec<(usize, usize)> {
    let n = g.vertices.len();
    let mut seen = vec![false; n];
    let mut forest = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for e in &g.edges {
                let other = if e.tail == u {
                    e.head
                } else if e.head == u {
                    e.tail
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    forest.push((e.tail, e.head));
                    queue.push_back(other);
                }
            }
        }
    }
    forest
}

fn check_forest(g: &GeneralizedNetwork, forest: &[(usize, usize)]) -> Result<()> {
    let n = g.vertices.len();
    let pairs: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.tail, e.head)).collect();
    let comps = graph::weak_components(n, &pairs);
    if forest.iter().any(|&(a, b)| a >= n || b >= n) {
        return Err(Error::Config("forest edge refers to a missing vertex".into()));
    }
    let fcomps = graph::weak_components(n, forest);
    if forest.len() != n - comps.len() || fcomps != comps {
        return Err(Error::Config("supplied edges do not form a spanning forest of the kinetic-order graph".into()));
    }
    Ok(())
}

/// Everything computed on the way to a parametrization.
#[derive(Clone, Debug, Serialize)]
pub struct ParamSystem {
    #[serde(serialize_with = "ser_display_vec")]
    pub tree_constants: Vec<Poly>,
    pub forest: Vec<(usize, usize)>,
    #[serde(serialize_with = "ser_display_vec")]
    pub kappa: Vec<Expr>,
    /// Species (columns of `m`).
    pub columns: Vec<usize>,
    pub m: QMatrix,
    pub h: QMatrix,
    pub b: QMatrix,
    #[serde(serialize_with = "ser_display_vec")]
    pub sigmas: Vec<Symbol>,
    #[serde(serialize_with = "ser_display_vec")]
    pub taus: Vec<Symbol>,
}

#[derive(Clone, Debug, Default)]
pub struct ParamOptions {
    pub forest: Option<Vec<(usize, usize)>>,
    /// Generalized inverse, species x forest edges.
    pub h: Option<QMatrix>,
    /// Suffix for τ names in multi-part runs.
    pub part: Option<usize>,
}

fn tau_name(part: Option<usize>, i: usize) -> Symbol {
    match part {
        None => Symbol::new(&format!("tau{}", i + 1)),
        Some(p) => Symbol::new(&format!("tau_{p}_{}", i + 1)),
    }
}

pub fn kinetic_difference_matrix(g: &GeneralizedNetwork, forest: &[(usize, usize)], columns: &[usize]) -> QMatrix {
    let rows: Vec<Vec<_>> = forest
        .iter()
        .map(|&(t, h)| {
            let d = g.kinetic(h).diff(g.kinetic(t));
            columns.iter().map(|&j| q(d[j])).collect()
        })
        .collect();
    let mut m = QMatrix::zeros(forest.len(), columns.len());
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            m[(i, j)] = v.clone();
        }
    }
    m
}

/// Species `j` maps to `prod_e kappa_e^H[j,e] * prod_p tau_p^B[j,p]`.
/// `columns` lists the species to parametrize (those of the subnetwork).
pub fn parametrize(g: &GeneralizedNetwork, columns: &[usize], opts: &ParamOptions) -> Result<(ParamSystem, Parametrization)> {
    g.theorem_applies().map_err(Error::Inapplicable)?;
    let k = tree_constants(g)?;
    if let Some(i) = k.iter().position(Poly::is_zero) {
        return Err(Error::Inapplicable(format!("tree constant of vertex {} is zero", i + 1)));
    }
    let forest = match &opts.forest {
        Some(f) => {
            check_forest(g, f)?;
            f.clone()
        }
        None => spanning_forest(g),
    };
    let kappa: Vec<Expr> = forest.iter().map(|&(t, h)| make_mul(vec![k[h].to_expr(), k[t].to_expr().recip()])).collect();
    let m = kinetic_difference_matrix(g, &forest, columns);
    let h = match &opts.h {
        Some(h) => {
            if h.rows() != columns.len() || h.cols() != forest.len() || m.mul(h).mul(&m) != m {
                return Err(Error::Config("supplied H does not satisfy M H M = M".into()));
            }
            h.clone()
        }
        None => m.generalized_inverse(),
    };
    let kernel = m.kernel_basis();
    let b = QMatrix::from_cols(columns.len(), &kernel);
    let taus: Vec<Symbol> = (0..kernel.len()).map(|i| tau_name(opts.part, i)).collect();
    let mut entries = Vec::new();
    for (jj, &j) in columns.iter().enumerate() {
        let mut fs = Vec::new();
        for (e, kap) in kappa.iter().enumerate() {
            let x = &h[(jj, e)];
            if !x.is_zero() {
                fs.push(kap.clone().powq(x.clone()));
            }
        }
        for (p, t) in taus.iter().enumerate() {
            let x = &b[(jj, p)];
            if !x.is_zero() {
                fs.push(Expr::Sym(t.clone()).powq(x.clone()));
            }
        }
        entries.push((j, make_mul(fs)));
    }
    let mut free: Vec<Symbol> = g.sigmas.clone();
    free.extend(taus.iter().cloned());
    let used: BTreeSet<Symbol> = entries.iter().flat_map(|(_, e)| e.free_symbols()).collect();
    free.retain(|s| used.contains(s));
    let sys = ParamSystem { tree_constants: k, forest, kappa, columns: columns.to_vec(), m, h, b, sigmas: g.sigmas.clone(), taus };
    Ok((sys, Parametrization { entries, free, provenance: "tree constants".into() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_network;
    use crate::symbolic::parse_expr;
    use crate::translation::{translate, SigmaNaming};

    const ENZYME: &str = "species A E AE B
R1: A + E <-> AE ; k1*a*e ; k2*ae
R2: AE <-> B + E ; k3*ae ; k4*b*e
R3: B -> 0 ; k5*b
R4: 0 -> A ; k6
";

    fn enzyme() -> (crate::dsl::Model, GeneralizedNetwork) {
        let m = parse_network(ENZYME).unwrap();
        let e = vec![0, 1, 0, 0];
        let z = vec![0; 4];
        let g = translate(&m.network, &m.kinetics, &[z.clone(), z.clone(), z.clone(), z, e.clone(), e], SigmaNaming::default()).unwrap();
        (m, g)
    }

    fn p(s: &str) -> Poly {
        parse_expr(s).unwrap().to_poly().unwrap()
    }

    #[test]
    fn enzyme_tree_constants() {
        let (_, g) = enzyme();
        let k = tree_constants(&g).unwrap();
        assert_eq!(k[0], p("k5*k6*(k2*k4 + k3*sigma + k2*sigma)"));
        assert_eq!(k[1], p("k1*k5*k6*(k4 + sigma)"));
        assert_eq!(k[2], p("k1*k3*k5*k6"));
        assert_eq!(k[3], p("k1*k3*sigma*k6"));
        assert_eq!(k[4], p("k1*k3*sigma*k5"));
    }

    #[test]
    fn enzyme_with_published_forest_and_inverse() {
        let (_, g) = enzyme();
        let forest = vec![(0, 1), (0, 2), (0, 3), (0, 4)];
        let h = QMatrix::from_i64(&[vec![0, 0, 1, 0], vec![-1, 1, 0, 0], vec![1, -1, 0, 1], vec![-1, 0, -1, -1]]).transpose();
        let opts = ParamOptions { forest: Some(forest), h: Some(h), part: None };
        let (sys, par) = parametrize(&g, &[0, 1, 2, 3], &opts).unwrap();
        assert_eq!(sys.m, QMatrix::from_i64(&[vec![-1, -1, 1, 0], vec![-1, 0, 0, 1], vec![-1, -1, 0, 1], vec![-1, -1, 0, 0]]));
        assert_eq!(sys.b.cols(), 0);
        assert_eq!(par.get(0).unwrap(), &parse_expr("(k6/(k1*k3*k5))*(k2*k4 + k3*sigma + k2*sigma)").unwrap());
        assert_eq!(par.get(1).unwrap(), &parse_expr("k5/sigma").unwrap());
        assert_eq!(par.get(2).unwrap(), &parse_expr("k6*(k4 + sigma)/(k3*sigma)").unwrap());
        assert_eq!(par.get(3).unwrap(), &parse_expr("k6/k5").unwrap());
    }

    #[test]
    fn bfs_forest_is_deterministic() {
        let (_, g) = enzyme();
        assert_eq!(spanning_forest(&g), vec![(0, 1), (4, 0), (1, 2), (3, 4)]);
    }

    #[test]
    fn bad_inverse_rejected() {
        let (_, g) = enzyme();
        let opts = ParamOptions { h: Some(QMatrix::identity(4)), ..Default::default() };
        let err = parametrize(&g, &[0, 1, 2, 3], &opts).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn determinant() {
        let m = vec![vec![p("a"), p("b")], vec![p("c"), p("d")]];
        assert_eq!(poly_det(m), p("a*d - b*c"));
    }
}

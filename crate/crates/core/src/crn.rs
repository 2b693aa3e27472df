//! Reaction networks: species, deduplicated complexes, labelled reactions and
//! their structural indices.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph;
use crate::linalg::exact_rank;

/// Non-negative stoichiometric coefficients, one per species.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct Complex(pub Vec<i64>);

impl Complex {
    pub fn zero(m: usize) -> Self {
        Complex(vec![0; m])
    }

    pub fn unit(m: usize, j: usize) -> Self {
        let mut v = vec![0; m];
        v[j] = 1;
        Complex(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &c)| c != 0).map(|(j, _)| j).collect()
    }

    pub fn diff(&self, other: &Complex) -> Vec<i64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    /// Adds a signed shift; `None` if a coordinate would go negative.
    pub fn shifted(&self, by: &[i64]) -> Option<Complex> {
        let v: Vec<i64> = self.0.iter().zip(by).map(|(a, b)| a + b).collect();
        v.iter().all(|&c| c >= 0).then_some(Complex(v))
    }

    pub fn render(&self, species: &[String]) -> String {
        render_linear(&self.0, species)
    }
}

/// `2X1 + X2`, `-X3`, or `0`.
pub fn render_linear(v: &[i64], species: &[String]) -> String {
    let mut out = String::new();
    for (j, &c) in v.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0 { " - " } else { " + " });
        }
        if c.abs() != 1 {
            out.push_str(&c.abs().to_string());
        }
        out.push_str(&species[j]);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Reaction {
    pub label: String,
    pub source: usize,
    pub product: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Network {
    species: Vec<String>,
    complexes: Vec<Complex>,
    reactions: Vec<Reaction>,
    complex_lookup: HashMap<Complex, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructuralSummary {
    pub m: usize,
    pub r: usize,
    pub n: usize,
    pub ell: usize,
    pub s: usize,
    pub delta: i64,
    pub weakly_reversible: bool,
    pub strong_linkage_classes: usize,
    pub stoich_matrix: Vec<Vec<i64>>,
}

impl Network {
    pub fn new(species: Vec<String>) -> Self {
        Network { species, ..Default::default() }
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s == name)
    }

    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn m(&self) -> usize {
        self.species.len()
    }

    pub fn r(&self) -> usize {
        self.reactions.len()
    }

    pub fn n(&self) -> usize {
        self.complexes.len()
    }

    pub fn reaction_index(&self, label: &str) -> Option<usize> {
        self.reactions.iter().position(|r| r.label == label)
    }

    fn intern(&mut self, c: Complex) -> usize {
        if let Some(&i) = self.complex_lookup.get(&c) {
            return i;
        }
        let i = self.complexes.len();
        self.complex_lookup.insert(c.clone(), i);
        self.complexes.push(c);
        i
    }

    pub fn add_reaction(&mut self, label: &str, source: Complex, product: Complex) -> Result<usize> {
        let m = self.m();
        if source.0.len() != m || product.0.len() != m {
            return Err(Error::Structural(format!("reaction {label}: complex dimension differs from species count {m}")));
        }
        if source.0.iter().chain(&product.0).any(|&c| c < 0) {
            return Err(Error::Structural(format!("reaction {label}: negative stoichiometric coefficient")));
        }
        if source == product {
            return Err(Error::Structural(format!("reaction {label}: self-loop complex")));
        }
        if self.reaction_index(label).is_some() {
            return Err(Error::Structural(format!("duplicate reaction label `{label}`")));
        }
        let s = self.intern(source);
        let p = self.intern(product);
        self.reactions.push(Reaction { label: label.to_string(), source: s, product: p });
        Ok(self.reactions.len() - 1)
    }

    pub fn source(&self, r: usize) -> &Complex {
        &self.complexes[self.reactions[r].source]
    }

    pub fn product(&self, r: usize) -> &Complex {
        &self.complexes[self.reactions[r].product]
    }

    pub fn reaction_vector(&self, r: usize) -> Vec<i64> {
        self.product(r).diff(self.source(r))
    }

    /// `m x r`; column `i` is the vector of reaction `i`.
    pub fn stoichiometric_matrix(&self) -> Vec<Vec<i64>> {
        let vs: Vec<Vec<i64>> = (0..self.r()).map(|r| self.reaction_vector(r)).collect();
        (0..self.m()).map(|j| vs.iter().map(|v| v[j]).collect()).collect()
    }

    pub fn rank(&self) -> usize {
        exact_rank(&self.stoichiometric_matrix())
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.reactions.iter().map(|r| (r.source, r.product)).collect()
    }

    pub fn linkage_classes(&self) -> Vec<Vec<usize>> {
        graph::weak_components(self.n(), &self.edges())
    }

    pub fn strong_linkage_classes(&self) -> Vec<Vec<usize>> {
        graph::strong_components(self.n(), &self.edges())
    }

    pub fn is_weakly_reversible(&self) -> bool {
        graph::is_weakly_reversible(self.n(), &self.edges())
    }

    pub fn summary(&self) -> StructuralSummary {
        let n = self.n();
        let ell = self.linkage_classes().len();
        let s = self.rank();
        StructuralSummary {
            m: self.m(),
            r: self.r(),
            n,
            ell,
            s,
            delta: n as i64 - ell as i64 - s as i64,
            weakly_reversible: self.is_weakly_reversible(),
            strong_linkage_classes: self.strong_linkage_classes().len(),
            stoich_matrix: self.stoichiometric_matrix(),
        }
    }

    /// Network on a subset of reactions; species are kept, complexes are
    /// re-interned in order of first use.
    pub fn subnetwork(&self, reactions: &[usize]) -> Network {
        let mut sub = Network::new(self.species.clone());
        for &r in reactions {
            let rx = &self.reactions[r];
            let s = sub.intern(self.complexes[rx.source].clone());
            let p = sub.intern(self.complexes[rx.product].clone());
            sub.reactions.push(Reaction { label: rx.label.clone(), source: s, product: p });
        }
        sub
    }

    /// Species with a nonzero coefficient in some complex.
    pub fn species_in_complexes(&self) -> BTreeSet<usize> {
        self.complexes.iter().flat_map(|c| c.support()).collect()
    }

    /// Species whose net change is nonzero in some reaction.
    pub fn species_in_reaction_vectors(&self) -> BTreeSet<usize> {
        (0..self.r())
            .flat_map(|r| {
                self.reaction_vector(r).into_iter().enumerate().filter(|(_, v)| *v != 0).map(|(j, _)| j).collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn render_reaction(&self, r: usize) -> String {
        format!(
            "{}: {} -> {}",
            self.reactions[r].label,
            self.source(r).render(&self.species),
            self.product(r).render(&self.species)
        )
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.r() {
            writeln!(f, "{}", self.render_reaction(r))?;
        }
        Ok(())
    }
}

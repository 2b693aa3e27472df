//! Independent decompositions of the reaction set.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::crn::{Network, StructuralSummary};
use crate::error::{Error, Result};
use crate::kinetics::{KineticsTag, Kinetics};
use crate::linalg::{exact_rank, QMatrix};
use crate::symbolic::q;

#[derive(Clone, Debug, Serialize)]
pub struct Part {
    /// Reaction indices, ascending.
    pub reactions: Vec<usize>,
    pub labels: Vec<String>,
    pub summary: StructuralSummary,
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub parts: Vec<Part>,
    pub rank: usize,
    pub independent: bool,
}

impl Decomposition {
    pub fn partition(&self) -> Vec<Vec<usize>> {
        self.parts.iter().map(|p| p.reactions.clone()).collect()
    }

    /// Index of the part holding reaction `r`.
    pub fn part_of(&self, r: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.reactions.contains(&r))
    }
}

fn check_partition(net: &Network, partition: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; net.r()];
    for part in partition {
        if part.is_empty() {
            return Err(Error::Structural("empty part in partition".into()));
        }
        for &r in part {
            if r >= net.r() {
                return Err(Error::Structural(format!("reaction index {r} out of range")));
            }
            if std::mem::replace(&mut seen[r], true) {
                return Err(Error::Structural(format!("reaction {} appears in two parts", net.reactions()[r].label)));
            }
        }
    }
    if let Some(r) = seen.iter().position(|s| !s) {
        return Err(Error::Structural(format!("reaction {} is not covered", net.reactions()[r].label)));
    }
    Ok(())
}

fn sub_rank(net: &Network, reactions: &[usize]) -> usize {
    let vs: Vec<Vec<i64>> = reactions.iter().map(|&r| net.reaction_vector(r)).collect();
    exact_rank(&vs)
}

/// Rank additivity: `rank(S) = sum rank(S_i)`.
pub fn is_independent(net: &Network, partition: &[Vec<usize>]) -> Result<bool> {
    check_partition(net, partition)?;
    let total: usize = partition.iter().map(|p| sub_rank(net, p)).sum();
    Ok(total == net.rank())
}

pub fn build(net: &Network, mut partition: Vec<Vec<usize>>) -> Result<Decomposition> {
    check_partition(net, &partition)?;
    for p in &mut partition {
        p.sort_unstable();
    }
    partition.sort_by_key(|p| p[0]);
    let parts: Vec<Part> = partition
        .into_iter()
        .map(|reactions| {
            let sub = net.subnetwork(&reactions);
            Part {
                labels: reactions.iter().map(|&r| net.reactions()[r].label.clone()).collect(),
                summary: sub.summary(),
                reactions,
            }
        })
        .collect();
    let rank = net.rank();
    let independent = parts.iter().map(|p| p.summary.s).sum::<usize>() == rank;
    Ok(Decomposition { parts, rank, independent })
}

/// The unique finest independent decomposition.
///
/// A basis of reaction vectors is picked by leftmost pivots; every reaction
/// joins the basis vectors it needs into one clique, and the components of
/// the resulting graph give the parts.
pub fn finest_independent_decomposition(net: &Network) -> Result<Decomposition> {
    let m = net.m();
    let vectors: Vec<Vec<i64>> = (0..net.r()).map(|r| net.reaction_vector(r)).collect();
    if let Some(r) = vectors.iter().position(|v| v.iter().all(|&c| c == 0)) {
        return Err(Error::Structural(format!("reaction {} has a zero reaction vector", net.reactions()[r].label)));
    }
    if vectors.is_empty() {
        return Err(Error::Structural("network has no reactions".into()));
    }
    let mut basis: Vec<usize> = Vec::new();
    for r in 0..net.r() {
        let mut cand: Vec<Vec<i64>> = basis.iter().map(|&b| vectors[b].clone()).collect();
        cand.push(vectors[r].clone());
        if exact_rank(&cand) > basis.len() {
            basis.push(r);
        }
    }
    let cols: Vec<Vec<_>> = basis.iter().map(|&b| vectors[b].iter().map(|&c| q(c)).collect()).collect();
    let bmat = QMatrix::from_cols(m, &cols);
    let k = basis.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut anchor = vec![0usize; net.r()];
    for (r, v) in vectors.iter().enumerate() {
        let rhs: Vec<_> = v.iter().map(|&c| q(c)).collect();
        let coords = bmat.solve(&rhs).expect("reaction vector lies in the span of the basis");
        let support: Vec<usize> = coords.iter().enumerate().filter(|(_, c)| !num_traits::Zero::is_zero(*c)).map(|(i, _)| i).collect();
        for w in support.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        anchor[r] = support[0];
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for r in 0..net.r() {
        let root = find(&mut parent, anchor[r]);
        match groups.iter_mut().find(|(g, _)| *g == root) {
            Some((_, v)) => v.push(r),
            None => groups.push((root, vec![r])),
        }
    }
    build(net, groups.into_iter().map(|(_, v)| v).collect())
}

/// Per-part kinetics and a flag telling whether the part is pure mass action.
pub fn restrict_kinetics(kin: &Kinetics, dec: &Decomposition) -> Vec<(Kinetics, bool)> {
    dec.parts
        .iter()
        .map(|p| {
            let k = kin.restrict(&p.reactions);
            let pure = k.rates.iter().all(|r| r.tag == KineticsTag::MassAction);
            (k, pure)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MassActionUnion {
    pub mass_action_parts: Vec<usize>,
    pub other_parts: Vec<usize>,
    pub mutually_exclusive: bool,
}

pub fn mass_action_union(net: &Network, dec: &Decomposition, purity: &[bool]) -> MassActionUnion {
    let (ma, other): (Vec<usize>, Vec<usize>) = (0..dec.parts.len()).partition(|&i| purity[i]);
    let species_of = |parts: &[usize]| -> BTreeSet<usize> {
        let rs: Vec<usize> = parts.iter().flat_map(|&i| dec.parts[i].reactions.clone()).collect();
        net.subnetwork(&rs).species_in_complexes()
    };
    let a = species_of(&ma);
    let b = species_of(&other);
    MassActionUnion { mutually_exclusive: a.is_disjoint(&b), mass_action_parts: ma, other_parts: other }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_network;

    const FIG1: &str = "species A B C\nR1: B + C -> A + C ; k1*b*c\nR2: A -> 0 ; k2*a\nR3: 0 -> B ; k3\nR4: 2C -> C ; k4*c^2\nR5: C -> 2C ; k5*c\n";

    #[test]
    fn three_species_split_is_not_independent() {
        let m = parse_network(FIG1).unwrap();
        assert!(!is_independent(&m.network, &[vec![0, 1], vec![2, 3, 4]]).unwrap());
        assert!(is_independent(&m.network, &[vec![0, 1, 2, 3, 4]]).unwrap());
        let d = finest_independent_decomposition(&m.network).unwrap();
        assert!(d.independent);
        assert_eq!(d.partition(), vec![vec![0, 1, 2], vec![3, 4]]);
    }

    #[test]
    fn block_diagonal() {
        let m = parse_network("R1: A -> B ; k1*a\nR2: C -> D ; k2*c\n").unwrap();
        let d = finest_independent_decomposition(&m.network).unwrap();
        assert_eq!(d.parts.len(), 2);
        let u = mass_action_union(&m.network, &d, &[true, false]);
        assert!(u.mutually_exclusive);
    }

    #[test]
    fn invalid_partitions() {
        let m = parse_network(FIG1).unwrap();
        assert!(is_independent(&m.network, &[vec![0, 1]]).is_err());
        assert!(is_independent(&m.network, &[vec![0, 1, 2], vec![2, 3, 4]]).is_err());
        assert!(is_independent(&m.network, &[vec![0, 1, 2, 3, 4], vec![]]).is_err());
    }
}

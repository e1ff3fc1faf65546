// SPDX-License-Identifier: Apache-2.0

//! n-excitation computational basis of an N-gon, ordered so that the
//! rotational symmetry shows up as circulant blocks, and assembly of the
//! exchange Hamiltonian restricted to that basis.
//!
//! States are grouped into orbits ("classes") of the rotation i → i+1. Each
//! class is labelled by the lexicographically smallest rotation of its gap
//! pattern (the circular sequence of distances between consecutive excited
//! vertices). Classes are sorted by that label, with short classes (orbits
//! smaller than N) last. Within a class the states run |s⟩, |s+1⟩, |s+2⟩, …
//! starting from the member that contains vertex 1 and spans the fewest
//! vertices, so for n = 2 the order is |12⟩,|23⟩,…,|N1⟩; |13⟩,|24⟩,…

use std::collections::{HashMap, HashSet};
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;

use crate::coupling::{offset_class, CouplingSet};
use crate::error::{Error, Result};

/// Largest polygon a basis can describe (one bit per vertex).
pub const MAX_SITES: usize = 63;

/// A set of excited vertices, stored as a bitmask over 0-based vertex indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExcitationSet(u64);

impl ExcitationSet {
    pub const GROUND: ExcitationSet = ExcitationSet(0);

    /// Builds a set from 1-based vertex labels.
    pub fn from_vertices(vertices: &[usize]) -> Self {
        ExcitationSet(vertices.iter().fold(0u64, |m, &v| m | 1 << (v - 1)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Whether the 0-based vertex `i` is excited.
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    /// Sorted 1-based vertex labels.
    pub fn vertices(self) -> Vec<usize> {
        self.indices().into_iter().map(|i| i + 1).collect()
    }

    /// Sorted 0-based vertex indices.
    pub fn indices(self) -> Vec<usize> {
        (0..64).filter(|&i| self.contains(i)).collect()
    }

    pub fn rotate(self, n_sites: usize) -> Self {
        let top = 1u64 << (n_sites - 1);
        let wrapped = if self.0 & top != 0 { 1 } else { 0 };
        ExcitationSet(((self.0 & !top) << 1) | wrapped)
    }

    /// Reflection i → −i (mod N) in 0-based indices.
    pub fn reflect(self, n_sites: usize) -> Self {
        let mut out = 0u64;
        for i in self.indices() {
            out |= 1 << ((n_sites - i) % n_sites);
        }
        ExcitationSet(out)
    }

    pub fn complement(self, n_sites: usize) -> Self {
        let all = if n_sites == 64 { u64::MAX } else { (1u64 << n_sites) - 1 };
        ExcitationSet(!self.0 & all)
    }

    /// Circular gaps between consecutive excited vertices.
    fn gaps(self, n_sites: usize) -> Vec<usize> {
        let idx = self.indices();
        let k = idx.len();
        (0..k)
            .map(|p| {
                if p + 1 < k {
                    idx[p + 1] - idx[p]
                } else {
                    idx[0] + n_sites - idx[p]
                }
            })
            .collect()
    }
}

impl fmt::Display for ExcitationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "|G⟩");
        }
        let labels: Vec<String> = self.vertices().iter().map(|v| v.to_string()).collect();
        let sep = if labels.iter().any(|l| l.len() > 1) { "," } else { "" };
        write!(f, "|{}⟩", labels.join(sep))
    }
}

/// One orbit of the cyclic rotation within the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClass {
    /// Smallest rotation of the gap pattern; empty for the ground state.
    pub descriptor: Vec<usize>,
    /// Index of the first member in the basis.
    pub start: usize,
    pub size: usize,
}

impl OrbitClass {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.size
    }
}

/// Ordered n-excitation basis of an N-gon.
#[derive(Clone, Debug)]
pub struct ExcitationBasis {
    n_sites: usize,
    excitations: usize,
    states: Vec<ExcitationSet>,
    classes: Vec<OrbitClass>,
    index: HashMap<ExcitationSet, usize>,
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn smallest_rotation(gaps: &[usize]) -> Vec<usize> {
    (0..gaps.len().max(1))
        .map(|s| gaps[s..].iter().chain(&gaps[..s]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

fn subsets(n_sites: usize, k: usize) -> Vec<ExcitationSet> {
    let mut out = Vec::with_capacity(binomial(n_sites, k));
    let mut current = Vec::with_capacity(k);
    fn recurse(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<ExcitationSet>) {
        if cur.len() == k {
            out.push(ExcitationSet(cur.iter().fold(0, |m, &i| m | 1 << i)));
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            recurse(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    recurse(0, n_sites, k, &mut current, &mut out);
    out
}

/// Enumerates the n-excitation basis in canonical class order.
pub fn build_basis(n_sites: usize, excitations: usize) -> Result<ExcitationBasis> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(Error::Domain(format!("N = {n_sites} outside 1..={MAX_SITES}")));
    }
    if excitations > n_sites {
        return Err(Error::Domain(format!(
            "excitation number {excitations} exceeds N = {n_sites}"
        )));
    }
    let mut seen: HashSet<ExcitationSet> = HashSet::new();
    let mut orbits: Vec<(bool, Vec<usize>, Vec<ExcitationSet>)> = Vec::new();
    for s in subsets(n_sites, excitations) {
        if seen.contains(&s) {
            continue;
        }
        let mut members = vec![s];
        let mut next = s.rotate(n_sites);
        while next != s {
            members.push(next);
            next = next.rotate(n_sites);
        }
        for m in &members {
            seen.insert(*m);
        }
        let descriptor = smallest_rotation(&s.gaps(n_sites));
        // Representative: contains vertex 1 and spans the fewest vertices.
        let rep = members
            .iter()
            .copied()
            .filter(|m| m.contains(0) || m.is_empty())
            .min_by_key(|m| (m.indices().last().copied().unwrap_or(0), m.indices()))
            .expect("every orbit of a nonempty set meets vertex 1");
        let mut ordered = Vec::with_capacity(members.len());
        let mut cur = rep;
        for _ in 0..members.len() {
            ordered.push(cur);
            cur = cur.rotate(n_sites);
        }
        orbits.push((members.len() < n_sites, descriptor, ordered));
    }
    orbits.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));

    let mut states = Vec::new();
    let mut classes = Vec::new();
    for (_, descriptor, members) in orbits {
        classes.push(OrbitClass {
            descriptor,
            start: states.len(),
            size: members.len(),
        });
        states.extend(members);
    }
    let index = states.iter().enumerate().map(|(k, s)| (*s, k)).collect();
    Ok(ExcitationBasis {
        n_sites,
        excitations,
        states,
        classes,
        index,
    })
}

impl ExcitationBasis {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn excitations(&self) -> usize {
        self.excitations
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[ExcitationSet] {
        &self.states
    }

    pub fn classes(&self) -> &[OrbitClass] {
        &self.classes
    }

    pub fn index_of(&self, state: ExcitationSet) -> Option<usize> {
        self.index.get(&state).copied()
    }

    /// Classes whose orbit has the full length N.
    pub fn full_classes(&self) -> impl Iterator<Item = &OrbitClass> {
        self.classes.iter().filter(move |c| c.size == self.n_sites)
    }

    pub fn short_classes(&self) -> impl Iterator<Item = &OrbitClass> {
        self.classes.iter().filter(move |c| c.size < self.n_sites)
    }

    /// Basis permutation induced by the rotation i → i+1: entry k is the index of the rotated state k.
    pub fn rotation_permutation(&self) -> Vec<usize> {
        self.permutation(|s| s.rotate(self.n_sites))
    }

    /// Basis permutation induced by the reflection i → −i.
    pub fn reflection_permutation(&self) -> Vec<usize> {
        self.permutation(|s| s.reflect(self.n_sites))
    }

    fn permutation(&self, map: impl Fn(ExcitationSet) -> ExcitationSet) -> Vec<usize> {
        self.states
            .iter()
            .map(|s| self.index[&map(*s)])
            .collect()
    }
}

/// The exchange interaction restricted to one excitation block.
#[derive(Clone, Debug)]
pub struct HamiltonianBlock {
    pub basis: ExcitationBasis,
    /// Interaction part only, in the coupling set's units; zero diagonal.
    pub matrix: Array2<Complex64>,
    /// Free part nω + i·nγ shared by every diagonal element (γ = 1).
    pub diagonal_offset: Complex64,
}

impl HamiltonianBlock {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// Sets the qubit transition frequency ω entering the offset as nω.
    pub fn with_transition_frequency(mut self, omega: f64) -> Self {
        self.diagonal_offset.re = omega * self.basis.excitations() as f64;
        self
    }

    pub fn real_part(&self) -> Array2<Complex64> {
        self.matrix.mapv(|z| Complex64::new(z.re, 0.0))
    }

    pub fn imag_part(&self) -> Array2<Complex64> {
        self.matrix.mapv(|z| Complex64::new(z.im, 0.0))
    }
}

/// Assembles H_int restricted to `basis`: ⟨A|H|B⟩ = Ω_ij when A = B − {j} + {i}.
pub fn build_hamiltonian_block(basis: &ExcitationBasis, couplings: &CouplingSet) -> Result<HamiltonianBlock> {
    let n = basis.n_sites();
    if couplings.n_sites() != n {
        return Err(Error::Precondition(format!(
            "basis is for N = {n} but couplings are for N = {}",
            couplings.n_sites()
        )));
    }
    let dim = basis.len();
    let mut matrix = Array2::zeros((dim, dim));
    for (a, state) in basis.states().iter().enumerate() {
        for i in state.indices() {
            for j in (0..n).filter(|&j| !state.contains(j)) {
                let other = ExcitationSet(state.bits() & !(1 << i) | 1 << j);
                let b = basis.index_of(other).expect("single swaps stay in the block");
                matrix[[a, b]] = couplings.get(offset_class(n, i, j));
            }
        }
    }
    Ok(HamiltonianBlock {
        basis: basis.clone(),
        matrix,
        diagonal_offset: Complex64::new(0.0, basis.excitations() as f64),
    })
}

/// Maps each n-excitation state onto its complement in the (N−n)-excitation basis.
///
/// Returns the complementary basis and, for each index of `basis`, the index of
/// the complement there. The induced Hamiltonian blocks coincide entrywise.
pub fn particle_hole_map(basis: &ExcitationBasis) -> Result<(ExcitationBasis, Vec<usize>)> {
    let n = basis.n_sites();
    let other = build_basis(n, n - basis.excitations())?;
    let map = basis
        .states()
        .iter()
        .map(|s| other.index_of(s.complement(n)).expect("complement has N − n excitations"))
        .collect();
    Ok((other, map))
}

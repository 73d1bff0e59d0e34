//! Redundancy lattice of source antichains.
//!
//! An atom is a collection of nonempty source-index sets none of which
//! contains another. Atoms are ordered by
//! `a ⪯ b  ⇔  every element of b contains some element of a`,
//! which puts the all-singletons atom `{1}{2}…{M}` at the bottom and the
//! full set `{1…M}` at the top. Partial information values are recovered
//! from redundancy values by Möbius inversion along this order.

use std::collections::HashMap;
use std::fmt;

use crate::error::{PirdError, Result};

/// Largest supported source count (166 atoms).
pub const MAX_SOURCES: usize = 4;

/// Source sets are stored as bitmasks: bit `i - 1` set ⇔ source `i` present.
type Mask = u8;

fn mask_indices(mask: Mask) -> Vec<usize> {
    (0..8).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect()
}

fn is_subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

fn canonicalize(masks: &mut [Mask]) {
    masks.sort_by_key(|&m| mask_indices(m));
}

/// A node of the redundancy lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    n_sources: usize,
    masks: Vec<Mask>,
}

impl Atom {
    /// Builds an atom from 1-based source-index sets.
    ///
    /// Duplicate indices inside a set are merged; element order is irrelevant.
    pub fn new(n_sources: usize, elements: &[Vec<usize>]) -> Result<Self> {
        check_source_count(n_sources)?;
        if elements.is_empty() {
            return Err(PirdError::Argument("atom must have at least one element".into()));
        }
        let mut masks = Vec::with_capacity(elements.len());
        for el in elements {
            if el.is_empty() {
                return Err(PirdError::Argument("atom element must be nonempty".into()));
            }
            let mut mask: Mask = 0;
            for &i in el {
                if i == 0 || i > n_sources {
                    return Err(PirdError::Argument(format!(
                        "source index {i} outside 1..={n_sources}"
                    )));
                }
                mask |= 1 << (i - 1);
            }
            masks.push(mask);
        }
        for (i, &a) in masks.iter().enumerate() {
            for (j, &b) in masks.iter().enumerate() {
                if i != j && is_subset(a, b) {
                    return Err(PirdError::Argument(format!(
                        "not an antichain: {:?} is contained in {:?}",
                        mask_indices(a),
                        mask_indices(b)
                    )));
                }
            }
        }
        canonicalize(&mut masks);
        Ok(Self { n_sources, masks })
    }

    /// Parses the canonical string form, e.g. `"{1}{23}"`.
    pub fn parse(n_sources: usize, s: &str) -> Result<Self> {
        let bad = || PirdError::Argument(format!("malformed atom string {s:?}"));
        let s = s.trim();
        let inner = s.strip_prefix('{').and_then(|t| t.strip_suffix('}')).ok_or_else(bad)?;
        let elements = inner
            .split("}{")
            .map(|el| {
                el.chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_sources, &elements)
    }

    pub fn n_sources(&self) -> usize {
        self.n_sources
    }

    /// Number of elements `J`.
    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// Elements as sorted 1-based index lists, in canonical order.
    pub fn elements(&self) -> Vec<Vec<usize>> {
        self.masks.iter().map(|&m| mask_indices(m)).collect()
    }

    /// Williams–Beer order: `self ⪯ other`.
    pub fn precedes(&self, other: &Atom) -> Result<bool> {
        if self.n_sources != other.n_sources {
            return Err(PirdError::Argument(format!(
                "atoms over different source counts ({} vs {})",
                self.n_sources, other.n_sources
            )));
        }
        Ok(precedes_masks(&self.masks, &other.masks))
    }

    /// Coarse-grained role of the atom's partial information.
    pub fn group(&self) -> AtomGroup {
        let singles: Vec<usize> = self
            .masks
            .iter()
            .filter(|m| m.count_ones() == 1)
            .map(|&m| m.trailing_zeros() as usize + 1)
            .collect();
        match singles.as_slice() {
            [] => AtomGroup::Synergistic,
            [m] => AtomGroup::Unique(*m),
            _ => AtomGroup::Redundant,
        }
    }
}

fn precedes_masks(a: &[Mask], b: &[Mask]) -> bool {
    b.iter().all(|&bj| a.iter().any(|&ai| is_subset(ai, bj)))
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &m in &self.masks {
            write!(f, "{{")?;
            for i in mask_indices(m) {
                write!(f, "{i}")?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// First-order coarse-graining of lattice atoms.
///
/// An atom whose elements include two or more single sources carries
/// information held by several individual sources (redundant); exactly one
/// single source makes it unique to that source; none makes it synergistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomGroup {
    Redundant,
    Unique(usize),
    Synergistic,
}

impl fmt::Display for AtomGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomGroup::Redundant => write!(f, "R"),
            AtomGroup::Unique(m) => write!(f, "U{m}"),
            AtomGroup::Synergistic => write!(f, "S"),
        }
    }
}

fn check_source_count(m: usize) -> Result<()> {
    if m == 0 {
        return Err(PirdError::Argument("at least one source is required".into()));
    }
    if m > MAX_SOURCES {
        return Err(PirdError::Capability(format!(
            "redundancy lattice limited to {MAX_SOURCES} sources, got {m}"
        )));
    }
    Ok(())
}

/// The full antichain lattice over `M` sources.
///
/// Atoms are stored in a linear extension of `⪯` (every atom appears after
/// all of its predecessors), so a single forward pass performs the Möbius
/// inversion.
#[derive(Clone, Debug)]
pub struct RedundancyLattice {
    n_sources: usize,
    atoms: Vec<Atom>,
    strict_down: Vec<Vec<usize>>,
    index: HashMap<Atom, usize>,
}

impl RedundancyLattice {
    /// Enumerates every nonempty antichain of nonempty subsets of `{1..M}`.
    pub fn enumerate(n_sources: usize) -> Result<Self> {
        check_source_count(n_sources)?;
        let subsets: Vec<Mask> = (1..(1u16 << n_sources)).map(|m| m as Mask).collect();
        let n = subsets.len();

        let mut found: Vec<Vec<Mask>> = Vec::new();
        for family in 1u32..(1u32 << n) {
            let members: Vec<Mask> = (0..n)
                .filter(|&i| family & (1 << i) != 0)
                .map(|i| subsets[i])
                .collect();
            let antichain = members.iter().enumerate().all(|(i, &a)| {
                members
                    .iter()
                    .enumerate()
                    .all(|(j, &b)| i == j || !is_subset(a, b))
            });
            if antichain {
                found.push(members);
            }
        }

        let mut atoms: Vec<Atom> = found
            .into_iter()
            .map(|mut masks| {
                canonicalize(&mut masks);
                Atom { n_sources, masks }
            })
            .collect();

        let down_size = |a: &Atom, all: &[Atom]| {
            all.iter().filter(|b| precedes_masks(&b.masks, &a.masks)).count()
        };
        let sizes: HashMap<Atom, usize> =
            atoms.iter().map(|a| (a.clone(), down_size(a, &atoms))).collect();
        atoms.sort_by(|a, b| {
            sizes[a]
                .cmp(&sizes[b])
                .then_with(|| a.elements().cmp(&b.elements()))
        });

        let strict_down = atoms
            .iter()
            .map(|a| {
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| *b != a && precedes_masks(&b.masks, &a.masks))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        let index = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();

        Ok(Self { n_sources, atoms, strict_down, index })
    }

    pub fn n_sources(&self) -> usize {
        self.n_sources
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn index_of(&self, atom: &Atom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    /// Indices of the atoms strictly below atom `i`.
    pub fn strict_down(&self, i: usize) -> &[usize] {
        &self.strict_down[i]
    }

    /// Index of `{1}{2}…{M}`.
    pub fn bottom(&self) -> usize {
        0
    }

    /// Index of `{12…M}`.
    pub fn top(&self) -> usize {
        self.atoms.len() - 1
    }

    /// Möbius inversion on index-aligned values:
    /// `pi[a] = redundancy[a] − Σ_{b ≺ a} pi[b]`.
    pub fn invert(&self, redundancy: &[f64]) -> Result<Vec<f64>> {
        if redundancy.len() != self.atoms.len() {
            return Err(PirdError::Argument(format!(
                "expected {} redundancy values, got {}",
                self.atoms.len(),
                redundancy.len()
            )));
        }
        let mut pi = vec![0.0; redundancy.len()];
        self.invert_into(redundancy, &mut pi);
        Ok(pi)
    }

    /// Allocation-free inversion for hot loops; lengths must match.
    pub(crate) fn invert_into(&self, redundancy: &[f64], pi: &mut [f64]) {
        for i in 0..self.atoms.len() {
            let below: f64 = self.strict_down[i].iter().map(|&j| pi[j]).sum();
            pi[i] = redundancy[i] - below;
        }
    }

    /// Inverse of [`invert`](Self::invert): sums values over each atom's down-set.
    pub fn accumulate(&self, pi: &[f64]) -> Vec<f64> {
        (0..self.atoms.len())
            .map(|i| pi[i] + self.strict_down[i].iter().map(|&j| pi[j]).sum::<f64>())
            .collect()
    }

    /// Map-based Möbius inversion; every lattice atom must be present.
    pub fn moebius_invert(&self, redundancy: &HashMap<Atom, f64>) -> Result<HashMap<Atom, f64>> {
        let values = self
            .atoms
            .iter()
            .map(|a| {
                let v = redundancy
                    .get(a)
                    .copied()
                    .ok_or_else(|| PirdError::Argument(format!("no redundancy value for atom {a}")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(PirdError::Argument(format!("non-finite redundancy for atom {a}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let pi = self.invert(&values)?;
        Ok(self.atoms.iter().cloned().zip(pi).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent count: every family of nonempty subsets, kept when no
    /// member contains another. Written with index vectors, not bitmasks.
    fn brute_force_count(m: usize) -> usize {
        let subsets: Vec<Vec<usize>> = (1..(1usize << m))
            .map(|s| (0..m).filter(|b| s & (1 << b) != 0).collect())
            .collect();
        let contains = |a: &Vec<usize>, b: &Vec<usize>| a.iter().all(|x| b.contains(x));
        (1..(1usize << subsets.len()))
            .filter(|fam| {
                let members: Vec<&Vec<usize>> = (0..subsets.len())
                    .filter(|i| fam & (1 << i) != 0)
                    .map(|i| &subsets[i])
                    .collect();
                members.iter().enumerate().all(|(i, a)| {
                    members.iter().enumerate().all(|(j, b)| i == j || !contains(a, b))
                })
            })
            .count()
    }

    #[test]
    fn atom_counts_match_brute_force() {
        let expected = [1, 4, 18, 166];
        for m in 1..=4 {
            assert_eq!(brute_force_count(m), expected[m - 1]);
            assert_eq!(RedundancyLattice::enumerate(m).unwrap().len(), expected[m - 1]);
        }
    }

    #[test]
    fn two_source_lattice() {
        let l = RedundancyLattice::enumerate(2).unwrap();
        let names: Vec<String> = l.atoms().iter().map(|a| a.to_string()).collect();
        assert_eq!(names, ["{1}{2}", "{1}", "{2}", "{12}"]);
        assert_eq!(l.atom(l.bottom()).to_string(), "{1}{2}");
        assert_eq!(l.atom(l.top()).to_string(), "{12}");
    }

    #[test]
    fn single_source_lattice() {
        let l = RedundancyLattice::enumerate(1).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l.atom(0).to_string(), "{1}");
        assert_eq!(l.invert(&[0.37]).unwrap(), vec![0.37]);
    }

    #[test]
    fn source_count_limits() {
        assert!(matches!(RedundancyLattice::enumerate(5), Err(PirdError::Capability(_))));
        assert!(matches!(RedundancyLattice::enumerate(0), Err(PirdError::Argument(_))));
    }

    #[test]
    fn precedence_examples() {
        let a = |s: &str| Atom::parse(2, s).unwrap();
        assert!(a("{1}{2}").precedes(&a("{1}")).unwrap());
        assert!(a("{1}").precedes(&a("{1}")).unwrap());
        assert!(!a("{12}").precedes(&a("{1}")).unwrap());
        assert!(a("{1}").precedes(&a("{12}")).unwrap());
        let other = Atom::parse(3, "{1}").unwrap();
        assert!(matches!(a("{1}").precedes(&other), Err(PirdError::Argument(_))));
    }

    #[test]
    fn order_is_a_partial_order() {
        for m in 1..=3 {
            let l = RedundancyLattice::enumerate(m).unwrap();
            let at = l.atoms();
            for a in at {
                assert!(a.precedes(a).unwrap());
                for b in at {
                    if a != b && a.precedes(b).unwrap() {
                        assert!(!b.precedes(a).unwrap(), "antisymmetry {a} {b}");
                    }
                    for c in at {
                        if a.precedes(b).unwrap() && b.precedes(c).unwrap() {
                            assert!(a.precedes(c).unwrap(), "transitivity {a} {b} {c}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn storage_order_is_linear_extension() {
        let l = RedundancyLattice::enumerate(4).unwrap();
        for i in 0..l.len() {
            assert!(l.strict_down(i).iter().all(|&j| j < i));
        }
        // unique bottom and top
        for (i, a) in l.atoms().iter().enumerate() {
            assert!(l.atom(l.bottom()).precedes(a).unwrap());
            assert!(a.precedes(l.atom(l.top())).unwrap());
            if i != l.bottom() {
                assert!(!a.precedes(l.atom(l.bottom())).unwrap());
            }
        }
        assert_eq!(l.atom(l.bottom()).to_string(), "{1}{2}{3}{4}");
        assert_eq!(l.atom(l.top()).to_string(), "{1234}");
    }

    #[test]
    fn antichain_validity_exhaustive() {
        for m in 1..=4 {
            let l = RedundancyLattice::enumerate(m).unwrap();
            for a in l.atoms() {
                let els = a.elements();
                for (i, x) in els.iter().enumerate() {
                    assert!(!x.is_empty());
                    assert!(x.iter().all(|&k| (1..=m).contains(&k)));
                    for (j, y) in els.iter().enumerate() {
                        if i != j {
                            assert!(!x.iter().all(|k| y.contains(k)));
                        }
                    }
                }
                // round trip through the canonical string
                assert_eq!(&Atom::parse(m, &a.to_string()).unwrap(), a);
            }
        }
    }

    #[test]
    fn canonical_form_ignores_order() {
        let a = Atom::new(3, &[vec![3, 2], vec![1]]).unwrap();
        let b = Atom::new(3, &[vec![1], vec![2, 3]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "{1}{23}");
        assert!(Atom::new(3, &[vec![1], vec![1, 2]]).is_err());
        assert!(Atom::new(3, &[vec![4]]).is_err());
        assert!(Atom::new(3, &[vec![]]).is_err());
    }

    #[test]
    fn two_source_inversion_by_hand() {
        let l = RedundancyLattice::enumerate(2).unwrap();
        let pi = l.invert(&[0.2, 0.5, 0.5, 0.7]).unwrap();
        let expected = [0.2, 0.3, 0.3, -0.1];
        for (p, e) in pi.iter().zip(expected) {
            assert!((p - e).abs() < 1e-15, "{pi:?}");
        }
        let back = l.accumulate(&pi);
        for (b, r) in back.iter().zip([0.2, 0.5, 0.5, 0.7]) {
            assert!((b - r).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_redundancy_telescopes() {
        for m in 1..=4 {
            let l = RedundancyLattice::enumerate(m).unwrap();
            let pi = l.invert(&vec![1.25; l.len()]).unwrap();
            assert_eq!(pi[l.bottom()], 1.25);
            assert!(pi.iter().skip(1).all(|&v| v.abs() < 1e-12), "{pi:?}");
        }
    }

    #[test]
    fn map_inversion_requires_every_atom() {
        let l = RedundancyLattice::enumerate(2).unwrap();
        let mut map: HashMap<Atom, f64> =
            l.atoms().iter().cloned().zip([0.2, 0.5, 0.5, 0.7]).collect();
        let pi = l.moebius_invert(&map).unwrap();
        assert!((pi[&Atom::parse(2, "{12}").unwrap()] + 0.1).abs() < 1e-15);
        map.remove(&Atom::parse(2, "{1}").unwrap());
        assert!(matches!(l.moebius_invert(&map), Err(PirdError::Argument(_))));
        assert!(l.invert(&[1.0]).is_err());
    }

    #[test]
    fn groups_for_three_sources() {
        let l = RedundancyLattice::enumerate(3).unwrap();
        let count = |g: AtomGroup| l.atoms().iter().filter(|a| a.group() == g).count();
        assert_eq!(count(AtomGroup::Redundant), 4);
        assert_eq!(count(AtomGroup::Unique(1)), 2);
        assert_eq!(count(AtomGroup::Synergistic), 8);
        assert_eq!(Atom::parse(3, "{1}{23}").unwrap().group(), AtomGroup::Unique(1));
        let l2 = RedundancyLattice::enumerate(2).unwrap();
        let groups: Vec<AtomGroup> = l2.atoms().iter().map(Atom::group).collect();
        assert_eq!(
            groups,
            [AtomGroup::Redundant, AtomGroup::Unique(1), AtomGroup::Unique(2), AtomGroup::Synergistic]
        );
    }
}

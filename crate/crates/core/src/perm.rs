//! Permutations of `{0, ..., n-1}` acting on the right: `i^(gh) = (i^g)^h`.
//!
//! Points are 0-based internally; JSON and cycle notation are 1-based.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// The full cycle `(1 2 ... n)`.
    pub fn cycle(n: usize) -> Self {
        Permutation { images: (0..n).map(|i| (i + 1) % n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::MalformedInput(format!(
                    "not a permutation of 1..{n}: {:?}",
                    images.iter().map(|i| i + 1).collect::<Vec<_>>()
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// From disjoint 0-based cycles; unlisted points are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cyc in cycles {
            for (k, &x) in cyc.iter().enumerate() {
                if x >= n || used[x] {
                    return Err(Error::MalformedInput(format!("bad cycle {cyc:?}")));
                }
                used[x] = true;
                images[x] = cyc[(k + 1) % cyc.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// Parses 1-based cycle notation such as `"(1 2 3 8)(5 7)"`.
    pub fn parse_cycles(n: usize, text: &str) -> Result<Self> {
        let mut cycles = Vec::new();
        for chunk in text.split('(').skip(1) {
            let body = chunk
                .split(')')
                .next()
                .ok_or_else(|| Error::MalformedInput(text.to_string()))?;
            let cyc = body
                .split([' ', ','])
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .ok()
                        .filter(|&x| x >= 1)
                        .map(|x| x - 1)
                        .ok_or_else(|| Error::MalformedInput(text.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            cycles.push(cyc);
        }
        let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
        Self::from_cycles(n, &refs)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation { images: self.images.iter().map(|&i| other.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn power(&self, k: i64) -> Permutation {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Permutation::identity(self.degree());
        for _ in 0..k.unsigned_abs() {
            acc = acc.then(&base);
        }
        acc
    }

    /// Relabels points by `label`: the result maps `label[i]` to `label[self(i)]`.
    pub fn relabel(&self, label: &[usize]) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[label[i]] = label[j];
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Disjoint cycles, each starting at its smallest point, sorted by that point.
    /// Fixed points are included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cyc.push(x);
                x = self.images[x];
            }
            out.push(cyc);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    pub fn is_full_cycle(&self) -> bool {
        self.degree() > 0 && self.cycle_count() == 1
    }

    pub fn order(&self) -> usize {
        self.cycles()
            .iter()
            .map(Vec::len)
            .fold(1, num_integer::lcm)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let one_based: Vec<usize> = self.images.iter().map(|i| i + 1).collect();
        one_based.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<usize>::deserialize(d)?;
        if raw.contains(&0) {
            return Err(serde::de::Error::custom("permutation images are 1-based"));
        }
        Permutation::from_images(raw.into_iter().map(|i| i - 1).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// Orbit of `point` with a transversal: `transversal[x] = Some(u)` with `point^u = x`.
pub fn orbit_with_transversal(
    gens: &[Permutation],
    point: usize,
    n: usize,
) -> Vec<Option<Permutation>> {
    let mut trans: Vec<Option<Permutation>> = vec![None; n];
    trans[point] = Some(Permutation::identity(n));
    let mut queue = VecDeque::from([point]);
    while let Some(x) = queue.pop_front() {
        let ux = trans[x].clone().expect("visited");
        for g in gens {
            let y = g.apply(x);
            if trans[y].is_none() {
                trans[y] = Some(ux.then(g));
                queue.push_back(y);
            }
        }
    }
    trans
}

pub fn is_transitive(gens: &[Permutation], n: usize) -> bool {
    n == 0 || orbit_with_transversal(gens, 0, n).iter().all(Option::is_some)
}

/// Enumerates the generated group, giving up beyond `limit` elements.
///
/// Only meant for small groups and cross-checks; the algorithms in this crate
/// work from generators.
pub fn enumerate_group(gens: &[Permutation], n: usize, limit: usize) -> Option<Vec<Permutation>> {
    let id = Permutation::identity(n);
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    let mut out = Vec::new();
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.then(g);
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return None;
                }
                queue.push_back(y);
            }
        }
        out.push(x);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_acts_on_the_right() {
        let g = Permutation::parse_cycles(3, "(1 2)").unwrap();
        let h = Permutation::parse_cycles(3, "(2 3)").unwrap();
        // 1 -g-> 2 -h-> 3
        assert_eq!(g.then(&h).apply(0), 2);
        assert_eq!(g.then(&g.inverse()), Permutation::identity(3));
    }

    #[test]
    fn cycle_notation_round_trip() {
        let g = Permutation::parse_cycles(8, "(1 2 3 8)(4)(5 7)(6)").unwrap();
        assert_eq!(g.to_string(), "(1 2 3 8)(5 7)");
        assert_eq!(g.cycle_count(), 4);
        assert_eq!(g.order(), 4);
    }

    #[test]
    fn json_is_one_based() {
        let c = Permutation::cycle(3);
        assert_eq!(serde_json::to_string(&c).unwrap(), "[2,3,1]");
        let back: Permutation = serde_json::from_str("[2,3,1]").unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<Permutation>("[1,1,2]").is_err());
    }

    #[test]
    fn relabel_conjugates() {
        let g = Permutation::parse_cycles(4, "(1 3)").unwrap();
        let label = [2, 0, 3, 1];
        let r = g.relabel(&label);
        assert_eq!(r, Permutation::parse_cycles(4, "(3 4)").unwrap());
    }

    #[test]
    fn dihedral_group_has_order_twelve() {
        let rot = Permutation::cycle(6);
        let refl = Permutation::from_images(vec![0, 5, 4, 3, 2, 1]).unwrap();
        let g = enumerate_group(&[rot, refl], 6, 1000).unwrap();
        assert_eq!(g.len(), 12);
    }

    #[test]
    fn transitivity() {
        assert!(is_transitive(&[Permutation::cycle(5)], 5));
        let g = Permutation::parse_cycles(4, "(1 2)(3 4)").unwrap();
        assert!(!is_transitive(&[g], 4));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn perm(n: usize) -> impl Strategy<Value = Permutation> {
            Just((0..n).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(|v| Permutation::from_images(v).unwrap())
        }

        fn triple() -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
            (1usize..12).prop_flat_map(|n| (perm(n), perm(n), perm(n)))
        }

        proptest! {
            #[test]
            fn group_laws((g, h, k) in triple()) {
                prop_assert_eq!(g.then(&h).then(&k), g.then(&h.then(&k)));
                prop_assert!(g.then(&g.inverse()).is_identity());
                prop_assert!(g.power(g.order() as i64).is_identity());
                prop_assert_eq!(g.power(-1), g.inverse());
                let cycles = g.cycles();
                let refs: Vec<&[usize]> = cycles.iter().map(|c| c.as_slice()).collect();
                prop_assert_eq!(Permutation::from_cycles(g.degree(), &refs).unwrap(), g.clone());
                prop_assert_eq!(cycles.len(), g.cycle_count());
            }
        }
    }
}

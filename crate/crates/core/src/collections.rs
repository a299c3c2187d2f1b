//! The invariant exceptional collections on `Z_n`, their ordering and counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::core_model::{half_index, CollectionItem, MarkingSet, MAX_N};
use crate::error::{Error, Result};

/// Ordering key of an item. Smaller keys come first; items sharing a key form
/// one level and must be mutually orthogonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    /// Torsion sheaves, keyed by `-(a+b)` so that larger twists come first.
    Torsion(i64),
    /// Line bundles, keyed by `-e`.
    LineBundle(i64),
}

impl Level {
    pub fn of(item: &CollectionItem) -> Level {
        match item {
            CollectionItem::Torsion { a, b, .. } => Level::Torsion(-(a + b)),
            CollectionItem::LineBundle { e, .. } => Level::LineBundle(-(e.len() as i64)),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Torsion(k) => write!(f, "torsion a+b={}", -k),
            Level::LineBundle(k) => write!(f, "line bundle e={}", -k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedCollection {
    pub n: usize,
    pub items: Vec<CollectionItem>,
    pub level: BTreeMap<CollectionItem, Level>,
}

impl OrderedCollection {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn position(&self, item: &CollectionItem) -> Option<usize> {
        self.items.iter().position(|x| x == item)
    }

    pub fn contains(&self, item: &CollectionItem) -> bool {
        self.level.contains_key(item)
    }

    pub fn line_bundles(&self) -> impl Iterator<Item = (MarkingSet, i64)> + '_ {
        self.items.iter().filter_map(|x| match x {
            CollectionItem::LineBundle { e, p } => Some((*e, *p)),
            _ => None,
        })
    }

    pub fn torsion_count(&self) -> usize {
        self.items.iter().filter(|x| x.is_torsion()).count()
    }
}

fn sort_key(item: &CollectionItem) -> (Level, Vec<usize>, i64, i64) {
    match item {
        CollectionItem::LineBundle { e, p } => (Level::of(item), e.members(), *p, 0),
        CollectionItem::Torsion { t, a, b } => (Level::of(item), t.members(), *a, *b),
    }
}

/// Whether `L_{E,p}` belongs to the collection.
pub fn in_line_bundle_range(n: usize, e: &MarkingSet, p: i64) -> bool {
    let k = e.len() as i64;
    if (k + p).rem_euclid(2) != 0 {
        return false;
    }
    let s = half_index(n) as i64;
    let n = n as i64;
    if n % 2 == 1 {
        p.abs() + k.min(n - k) <= s
    } else {
        p.abs() + k.min(n + 1 - k) <= s + 1
    }
}

/// Whether `O_{δ_T}(-a,-b)` belongs to the collection (even `n`).
pub fn in_torsion_range(n: usize, a: i64, b: i64) -> bool {
    if n % 2 == 1 {
        return false;
    }
    let s = half_index(n) as i64;
    let axis = |x: i64| 0 < x && 2 * x < s + 1;
    (1..=s).contains(&a) && (1..=s).contains(&b) || (a == 0 && axis(b)) || (b == 0 && axis(a))
}

/// Twists `(a,b)` of the torsion part for a single `T`.
pub fn torsion_twists(n: usize) -> Vec<(i64, i64)> {
    let s = half_index(n) as i64;
    let mut out = Vec::new();
    for a in 0..=s {
        for b in 0..=s {
            if in_torsion_range(n, a, b) {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn enumerate_collection(n: usize) -> Result<OrderedCollection> {
    if n < 2 {
        return Err(Error::Precondition(format!("collections need n >= 2, got {n}")));
    }
    if n > MAX_N {
        return Err(Error::UnsupportedN(n));
    }
    let mut items = Vec::new();
    if n % 2 == 0 {
        let twists = torsion_twists(n);
        for t in MarkingSet::half_sets(n) {
            for &(a, b) in &twists {
                items.push(CollectionItem::Torsion { t, a, b });
            }
        }
    }
    let pmax = half_index(n) as i64 + 1;
    for e in MarkingSet::all_subsets(n) {
        for p in -pmax..=pmax {
            if in_line_bundle_range(n, &e, p) {
                items.push(CollectionItem::LineBundle { e, p });
            }
        }
    }
    items.sort_by_cached_key(sort_key);
    let level = items.iter().map(|x| (*x, Level::of(x))).collect();
    Ok(OrderedCollection { n, items, level })
}

/// Topological Euler characteristic of `Z_n`.
pub fn euler_characteristic(n: usize) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::Precondition(format!("n >= 2 required, got {n}")));
    }
    let s = half_index(n);
    Ok(if n % 2 == 1 {
        BigUint::from(n) * binomial(n - 1, s)
    } else {
        BigUint::from((s + 1) * (s + 1)) * binomial(n, s + 1)
    })
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let mut r = BigUint::from(1u32);
    for i in 0..k {
        r = r * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    r
}

/// An element of `S₂ × Sₙ`; `perm[i-1] = π(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupElement {
    pub flip: bool,
    pub perm: Vec<usize>,
}

impl GroupElement {
    pub fn new(flip: bool, perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let seen: BTreeSet<usize> = perm.iter().copied().collect();
        if seen.len() != n || seen.iter().any(|&i| i == 0 || i > n) {
            return Err(Error::Precondition(format!("{perm:?} is not a permutation")));
        }
        Ok(Self { flip, perm })
    }

    pub fn identity(n: usize) -> Self {
        Self { flip: false, perm: (1..=n).collect() }
    }

    pub fn flip(n: usize) -> Self {
        Self { flip: true, perm: (1..=n).collect() }
    }

    /// The transposition `(i j)`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.swap(i - 1, j - 1);
        Self { flip: false, perm }
    }

    /// The flip together with the adjacent transpositions.
    pub fn generators(n: usize) -> Vec<Self> {
        let mut g = vec![Self::flip(n)];
        g.extend((1..n).map(|i| Self::transposition(n, i, i + 1)));
        g
    }
}

pub fn act(g: &GroupElement, item: &CollectionItem) -> Result<CollectionItem> {
    let n = item.n();
    if g.perm.len() != n {
        return Err(Error::NMismatch(g.perm.len(), n));
    }
    Ok(match *item {
        CollectionItem::LineBundle { e, p } => {
            let e = e.permuted(&g.perm);
            CollectionItem::LineBundle { e, p: if g.flip { -p } else { p } }
        }
        CollectionItem::Torsion { t, a, b } => {
            let t = t.permuted(&g.perm);
            if g.flip {
                CollectionItem::Torsion { t: t.complement(), a: b, b: a }
            } else {
                CollectionItem::Torsion { t, a, b }
            }
        }
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub n: usize,
    pub generators_checked: usize,
    pub closed: bool,
    pub violations: Vec<String>,
}

/// Closure of the collection under the generators of `S₂ × Sₙ`, and preservation
/// of the ordering keys.
pub fn verify_invariance(n: usize) -> Result<InvarianceReport> {
    let c = enumerate_collection(n)?;
    let gens = GroupElement::generators(n);
    let mut violations = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        for item in &c.items {
            let image = act(g, item)?;
            match c.level.get(&image) {
                None => violations.push(format!("generator {gi}: {item} -> {image} leaves the collection")),
                Some(l) if *l != c.level[item] => {
                    violations.push(format!("generator {gi}: {item} -> {image} changes level"))
                }
                _ => {}
            }
        }
    }
    Ok(InvarianceReport { n, generators_checked: gens.len(), closed: violations.is_empty(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, m: &[usize]) -> MarkingSet {
        MarkingSet::new(n, m).unwrap()
    }

    #[test]
    fn small_examples() {
        let c = enumerate_collection(3).unwrap();
        assert_eq!(c.len(), 6);
        assert!(c.contains(&CollectionItem::LineBundle { e: set(3, &[]), p: 0 }));
        assert!(c.contains(&CollectionItem::LineBundle { e: set(3, &[1, 2, 3]), p: 1 }));
        assert!(c.contains(&CollectionItem::LineBundle { e: set(3, &[1, 2, 3]), p: -1 }));
        let c2 = enumerate_collection(2).unwrap();
        assert_eq!(
            c2.items,
            vec![
                CollectionItem::LineBundle { e: set(2, &[1, 2]), p: 0 },
                CollectionItem::LineBundle { e: set(2, &[]), p: 0 },
            ]
        );
        let c4 = enumerate_collection(4).unwrap();
        assert_eq!(c4.torsion_count(), 6);
        let by_e = |k| c4.line_bundles().filter(|(e, _)| e.len() == k).count();
        assert_eq!([by_e(0), by_e(1), by_e(2), by_e(3), by_e(4)], [3, 8, 6, 0, 1]);
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_characteristic(3).unwrap(), BigUint::from(6u32));
        assert_eq!(euler_characteristic(4).unwrap(), BigUint::from(24u32));
        assert_eq!(euler_characteristic(6).unwrap(), BigUint::from(180u32));
        assert!(euler_characteristic(1).is_err());
        assert!(enumerate_collection(1).is_err());
    }

    #[test]
    fn action_examples() {
        let l = CollectionItem::LineBundle { e: set(4, &[1, 2]), p: 0 };
        assert_eq!(act(&GroupElement::flip(4), &l).unwrap(), l);
        let l = CollectionItem::LineBundle { e: set(3, &[1, 2, 3]), p: 1 };
        assert_eq!(
            act(&GroupElement::flip(3), &l).unwrap(),
            CollectionItem::LineBundle { e: set(3, &[1, 2, 3]), p: -1 }
        );
        let o = CollectionItem::Torsion { t: set(4, &[1, 3]), a: 1, b: 0 };
        assert_eq!(
            act(&GroupElement::transposition(4, 1, 2), &o).unwrap(),
            CollectionItem::Torsion { t: set(4, &[2, 3]), a: 1, b: 0 }
        );
        assert!(GroupElement::new(false, vec![1, 1, 3]).is_err());
    }

    #[test]
    fn ordering_invariants() {
        for n in 2..=9 {
            let c = enumerate_collection(n).unwrap();
            let levels: Vec<Level> = c.items.iter().map(|x| c.level[x]).collect();
            assert!(levels.windows(2).all(|w| w[0] <= w[1]), "n={n}");
            let first_lb = c.items.iter().position(|x| !x.is_torsion()).unwrap();
            assert!(c.items[first_lb..].iter().all(|x| !x.is_torsion()));
        }
    }

    #[test]
    fn invariance_small() {
        for n in 2..=7 {
            let r = verify_invariance(n).unwrap();
            assert!(r.closed, "n={n}: {:?}", r.violations);
        }
    }
}

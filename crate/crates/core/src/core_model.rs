//! Index combinatorics and the divisor-class lattice.
//!
//! Light markings are `1..=n`. For even `n = 2s+2` the exceptional divisors
//! `E_T` of the Kirwan blow-up are indexed by the subsets `T` with `|T| = s+1`;
//! `δ_T` denotes the boundary divisor `δ_{T∪{∞}}`, whose class is `2E_T`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of light markings.
pub const MAX_N: usize = 30;

/// A subset of `{1..n}`, stored as a bit mask (bit `i-1` for marking `i`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "SetRepr", into = "SetRepr")]
pub struct MarkingSet {
    n: u8,
    bits: u32,
}

#[derive(Serialize, Deserialize)]
struct SetRepr {
    n: usize,
    members: Vec<usize>,
}

impl TryFrom<SetRepr> for MarkingSet {
    type Error = Error;
    fn try_from(r: SetRepr) -> Result<Self> {
        MarkingSet::new(r.n, &r.members)
    }
}

impl From<MarkingSet> for SetRepr {
    fn from(m: MarkingSet) -> Self {
        SetRepr { n: m.n(), members: m.members() }
    }
}

impl MarkingSet {
    pub fn new(n: usize, members: &[usize]) -> Result<Self> {
        check_n(n)?;
        let mut bits = 0u32;
        for &i in members {
            if i == 0 || i > n {
                return Err(Error::MarkingOutOfRange { n, index: i });
            }
            bits |= 1 << (i - 1);
        }
        Ok(MarkingSet { n: n as u8, bits })
    }

    pub fn from_bits(n: usize, bits: u32) -> Self {
        assert!(n <= MAX_N && (n == 32 || bits >> n == 0), "bits outside 1..=n");
        MarkingSet { n: n as u8, bits }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_bits(n, 0)
    }

    pub fn full(n: usize) -> Self {
        Self::from_bits(n, full_mask(n))
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= 1 && i <= self.n() && self.bits & (1 << (i - 1)) != 0
    }

    /// Members in increasing order.
    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.n()).filter(move |&i| self.contains(i))
    }

    pub fn complement(&self) -> Self {
        Self::from_bits(self.n(), full_mask(self.n()) & !self.bits)
    }

    pub fn union(&self, o: &Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        Self::from_bits(self.n(), self.bits | o.bits)
    }

    pub fn intersection(&self, o: &Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        Self::from_bits(self.n(), self.bits & o.bits)
    }

    pub fn difference(&self, o: &Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        Self::from_bits(self.n(), self.bits & !o.bits)
    }

    pub fn is_subset(&self, o: &Self) -> bool {
        self.bits & !o.bits == 0
    }

    pub fn is_disjoint(&self, o: &Self) -> bool {
        self.bits & o.bits == 0
    }

    /// Image under a permutation given as `perm[i-1] = π(i)`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut bits = 0u32;
        for i in self.iter() {
            bits |= 1 << (perm[i - 1] - 1);
        }
        Self::from_bits(self.n(), bits)
    }

    /// All subsets of `{1..n}` of size `k`, in lexicographic order of sorted tuples.
    pub fn subsets_of_size(n: usize, k: usize) -> Vec<MarkingSet> {
        let mut out = Vec::new();
        if k > n {
            return out;
        }
        let mut idx: Vec<usize> = (1..=k).collect();
        loop {
            let bits = idx.iter().fold(0u32, |b, &i| b | (1 << (i - 1)));
            out.push(Self::from_bits(n, bits));
            // advance to the next combination
            let mut pos = k;
            while pos > 0 && idx[pos - 1] == n - k + pos {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for q in pos..k {
                idx[q] = idx[q - 1] + 1;
            }
        }
        out
    }

    /// Subsets of this set of size `k`, lexicographic.
    pub fn subsets_within(&self, k: usize) -> Vec<MarkingSet> {
        let m = self.members();
        let n = self.n();
        Self::subsets_of_size(m.len(), k)
            .into_iter()
            .map(|s| {
                let bits = s.iter().fold(0u32, |b, j| b | (1 << (m[j - 1] - 1)));
                Self::from_bits(n, bits)
            })
            .collect()
    }

    /// All `2^n` subsets, ordered by size and then lexicographically.
    pub fn all_subsets(n: usize) -> Vec<MarkingSet> {
        (0..=n).flat_map(|k| Self::subsets_of_size(n, k)).collect()
    }

    /// The sets indexing exceptional divisors: `|T| = n/2`.
    pub fn half_sets(n: usize) -> Vec<MarkingSet> {
        Self::subsets_of_size(n, n / 2)
    }
}

impl Ord for MarkingSet {
    fn cmp(&self, other: &Self) -> Ordering {
        // lexicographic on sorted member lists, decided at the smallest differing marking
        self.n.cmp(&other.n).then_with(|| {
            let d = self.bits ^ other.bits;
            if d == 0 {
                return Ordering::Equal;
            }
            let m = d.trailing_zeros();
            let above = !((2u64 << m) - 1);
            let (mine, theirs) = (self.bits as u64, other.bits as u64);
            if mine >> m & 1 == 1 {
                if theirs & above != 0 { Ordering::Less } else { Ordering::Greater }
            } else if mine & above != 0 {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        })
    }
}

impl PartialOrd for MarkingSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MarkingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        Err(Error::UnsupportedN(n))
    } else {
        Ok(())
    }
}

/// `s` with `n = 2s+1` (odd) or `n = 2s+2` (even).
pub fn half_index(n: usize) -> usize {
    if n % 2 == 1 {
        (n - 1) / 2
    } else {
        (n - 2) / 2
    }
}

/// `|p| + min(e, n-e)`.
pub fn score(n: usize, e: &MarkingSet, p: i64) -> i64 {
    let e = e.len();
    p.abs() + e.min(n - e) as i64
}

fn check_parity(e: &MarkingSet, p: i64) -> Result<()> {
    if (e.len() as i64 + p).rem_euclid(2) != 0 {
        Err(Error::Parity { e: e.len(), p })
    } else {
        Ok(())
    }
}

fn check_half_set(n: usize, t: &MarkingSet) -> Result<()> {
    if n % 2 != 0 {
        return Err(Error::NeedsEvenN(n));
    }
    if t.n() != n {
        return Err(Error::NMismatch(t.n(), n));
    }
    if t.len() != n / 2 {
        return Err(Error::BadSubsetSize { got: t.len(), want: n / 2 });
    }
    Ok(())
}

/// `x_{T,E,p} = |E∩T| - (e-p)/2`.
pub fn x_coeff(n: usize, t: &MarkingSet, e: &MarkingSet, p: i64) -> Result<i64> {
    check_half_set(n, t)?;
    check_parity(e, p)?;
    Ok(x_unchecked(t, e, p))
}

#[inline]
pub(crate) fn x_unchecked(t: &MarkingSet, e: &MarkingSet, p: i64) -> i64 {
    e.intersection(t).len() as i64 - (e.len() as i64 - p) / 2
}

/// `α_{T,E,p} = -|x_{T,E,p}|`.
pub fn alpha_coeff(n: usize, t: &MarkingSet, e: &MarkingSet, p: i64) -> Result<i64> {
    Ok(-x_coeff(n, t, e, p)?.abs())
}

/// A linearized line bundle `O(j̄)(Σ c_T E_T) ⊗ z^p` on `(P¹)ⁿ` or its blow-up.
/// Zero exceptional coefficients are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GitLineBundle {
    pub n: usize,
    pub exponents: Vec<i64>,
    pub exc_coeffs: BTreeMap<MarkingSet, i64>,
    pub character: i64,
}

impl GitLineBundle {
    pub fn trivial(n: usize) -> Self {
        GitLineBundle { n, exponents: vec![0; n], exc_coeffs: BTreeMap::new(), character: 0 }
    }

    pub fn exc(&self, t: &MarkingSet) -> i64 {
        self.exc_coeffs.get(t).copied().unwrap_or(0)
    }

    pub fn set_exc(&mut self, t: MarkingSet, c: i64) {
        if c == 0 {
            self.exc_coeffs.remove(&t);
        } else {
            self.exc_coeffs.insert(t, c);
        }
    }

    pub fn dual(&self) -> Self {
        self.scaled(-1)
    }

    pub fn scaled(&self, k: i64) -> Self {
        GitLineBundle {
            n: self.n,
            exponents: self.exponents.iter().map(|j| k * j).collect(),
            exc_coeffs: self
                .exc_coeffs
                .iter()
                .filter(|(_, &c)| k * c != 0)
                .map(|(t, c)| (*t, k * c))
                .collect(),
            character: k * self.character,
        }
    }

    /// Tensor product.
    pub fn plus(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let mut out = GitLineBundle {
            n: self.n,
            exponents: self.exponents.iter().zip(&o.exponents).map(|(a, b)| a + b).collect(),
            exc_coeffs: self.exc_coeffs.clone(),
            character: self.character + o.character,
        };
        for (t, c) in &o.exc_coeffs {
            let v = out.exc(t) + c;
            out.set_exc(*t, v);
        }
        out
    }

    pub fn minus(&self, o: &Self) -> Self {
        self.plus(&o.dual())
    }

    /// The S₂ swap of 0 and ∞: `E_T ↦ E_{T^c}`, `z ↦ z^{-1}`.
    pub fn flipped(&self) -> Self {
        let mut out = GitLineBundle {
            n: self.n,
            exponents: self.exponents.clone(),
            exc_coeffs: BTreeMap::new(),
            character: -self.character,
        };
        for (t, c) in &self.exc_coeffs {
            out.set_exc(t.complement(), *c);
        }
        out
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut exps = vec![0; self.n];
        for i in 0..self.n {
            exps[perm[i] - 1] = self.exponents[i];
        }
        let mut out = GitLineBundle {
            n: self.n,
            exponents: exps,
            exc_coeffs: BTreeMap::new(),
            character: self.character,
        };
        for (t, c) in &self.exc_coeffs {
            out.set_exc(t.permuted(perm), *c);
        }
        out
    }
}

impl fmt::Display for GitLineBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j: Vec<String> = self.exponents.iter().map(|x| x.to_string()).collect();
        write!(f, "O({})", j.join(","))?;
        if !self.exc_coeffs.is_empty() {
            let e: Vec<String> =
                self.exc_coeffs.iter().map(|(t, c)| format!("{c}E{t}")).collect();
            write!(f, "({})", e.join("+"))?;
        }
        write!(f, "z^{}", self.character)
    }
}

/// Coefficients over `{H_i} ∪ {E_T} ∪ {z}`.
pub type DivisorClass = GitLineBundle;

/// A member of an exceptional collection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CollectionItem {
    /// `L_{E,p}`.
    LineBundle { e: MarkingSet, p: i64 },
    /// `O_{δ_T}(-a,-b)`.
    Torsion { t: MarkingSet, a: i64, b: i64 },
}

impl CollectionItem {
    pub fn line_bundle(e: MarkingSet, p: i64) -> Result<Self> {
        check_parity(&e, p)?;
        Ok(CollectionItem::LineBundle { e, p })
    }

    pub fn torsion(t: MarkingSet, a: i64, b: i64) -> Result<Self> {
        check_half_set(t.n(), &t)?;
        if a < 0 || b < 0 {
            return Err(Error::Precondition(format!("torsion twist (-{a},-{b}) needs a,b >= 0")));
        }
        Ok(CollectionItem::Torsion { t, a, b })
    }

    pub fn n(&self) -> usize {
        match self {
            CollectionItem::LineBundle { e, .. } => e.n(),
            CollectionItem::Torsion { t, .. } => t.n(),
        }
    }

    pub fn is_torsion(&self) -> bool {
        matches!(self, CollectionItem::Torsion { .. })
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CollectionItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollectionItem::LineBundle { e, p } => write!(f, "L[{e};{p}]"),
            CollectionItem::Torsion { t, a, b } => write!(f, "O_d{t}(-{a},-{b})"),
        }
    }
}

/// Generators of the tautological lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TautSymbol {
    Psi0,
    PsiInf,
    Psi(usize),
    Delta0(usize),
    DeltaInf(usize),
    /// `δ_{T∪{∞}}`, even `n` only.
    DeltaT(MarkingSet),
}

impl fmt::Display for TautSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TautSymbol::Psi0 => write!(f, "psi_0"),
            TautSymbol::PsiInf => write!(f, "psi_inf"),
            TautSymbol::Psi(i) => write!(f, "psi_{i}"),
            TautSymbol::Delta0(i) => write!(f, "delta_{i}0"),
            TautSymbol::DeltaInf(i) => write!(f, "delta_{i}inf"),
            TautSymbol::DeltaT(t) => write!(f, "delta_{t}inf"),
        }
    }
}

/// A formal integer combination of tautological symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TautClass {
    pub terms: BTreeMap<TautSymbol, i64>,
}

impl TautClass {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn symbol(sym: TautSymbol) -> Self {
        let mut c = Self::new();
        c.add(sym, 1);
        c
    }

    pub fn add(&mut self, sym: TautSymbol, k: i64) {
        let v = self.terms.get(&sym).copied().unwrap_or(0) + k;
        if v == 0 {
            self.terms.remove(&sym);
        } else {
            self.terms.insert(sym, v);
        }
    }

    pub fn with(mut self, sym: TautSymbol, k: i64) -> Self {
        self.add(sym, k);
        self
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (s, k) in &o.terms {
            out.add(*s, *k);
        }
        out
    }

    pub fn scaled(&self, k: i64) -> Self {
        let mut out = Self::new();
        for (s, c) in &self.terms {
            out.add(*s, k * c);
        }
        out
    }
}

fn check_symbol(sym: &TautSymbol, n: usize) -> Result<()> {
    let ok = match sym {
        TautSymbol::Psi0 | TautSymbol::PsiInf => true,
        TautSymbol::Psi(i) | TautSymbol::Delta0(i) | TautSymbol::DeltaInf(i) => *i >= 1 && *i <= n,
        TautSymbol::DeltaT(t) => n % 2 == 0 && t.n() == n && t.len() == n / 2,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSymbol(sym.to_string(), n))
    }
}

/// Adds `k` times the image of one generator under the dictionary.
fn add_image(sym: &TautSymbol, k: i64, halves: &[MarkingSet], acc: &mut (Vec<i64>, i64, BTreeMap<MarkingSet, i64>)) {
    let (exps, ch, exc) = acc;
    let mut bump = |t: MarkingSet, c: i64| *exc.entry(t).or_insert(0) += c * k;
    match *sym {
        TautSymbol::Delta0(i) => {
            exps[i - 1] += k;
            *ch += k;
            halves.iter().filter(|t| !t.contains(i)).for_each(|t| bump(*t, -1));
        }
        TautSymbol::DeltaInf(i) => {
            exps[i - 1] += k;
            *ch -= k;
            halves.iter().filter(|t| t.contains(i)).for_each(|t| bump(*t, -1));
        }
        TautSymbol::Psi0 => {
            *ch -= 2 * k;
            halves.iter().for_each(|t| bump(*t, 1));
        }
        TautSymbol::PsiInf => {
            *ch += 2 * k;
            halves.iter().for_each(|t| bump(*t, 1));
        }
        TautSymbol::Psi(i) => {
            exps[i - 1] -= 2 * k;
            halves.iter().for_each(|t| bump(*t, 1));
        }
        TautSymbol::DeltaT(t) => bump(t, 2),
    }
}

fn dictionary(sym: &TautSymbol, n: usize) -> DivisorClass {
    taut_to_git(&TautClass::symbol(*sym), n).expect("checked symbol")
}

/// The dictionary from tautological classes to linearized bundles (additive).
pub fn taut_to_git(c: &TautClass, n: usize) -> Result<DivisorClass> {
    if n < 2 {
        return Err(Error::UnsupportedN(n));
    }
    let halves = if n % 2 == 0 { MarkingSet::half_sets(n) } else { Vec::new() };
    let mut acc = (vec![0; n], 0, BTreeMap::new());
    for (sym, k) in &c.terms {
        check_symbol(sym, n)?;
        add_image(sym, *k, &halves, &mut acc);
    }
    let mut out = GitLineBundle::trivial(n);
    out.exponents = acc.0;
    out.character = acc.1;
    for (t, v) in acc.2 {
        out.set_exc(t, v);
    }
    Ok(out)
}

/// The four line-bundle families used by the generation arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BundleKind {
    L,
    R,
    Q,
    V,
}

impl fmt::Display for BundleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            BundleKind::L => "L",
            BundleKind::R => "R",
            BundleKind::Q => "Q",
            BundleKind::V => "V",
        };
        write!(f, "{c}")
    }
}

/// `O(-E)(Σ c_T E_T) ⊗ z^p` with `c_T` determined by `kind` from `x_T`:
/// L: `-|x|`, R: `x`, Q: `-x`, V: `|x|`. For odd `n` all kinds agree.
pub fn git_form(kind: BundleKind, n: usize, e: &MarkingSet, p: i64) -> Result<GitLineBundle> {
    check_n(n)?;
    if e.n() != n {
        return Err(Error::NMismatch(e.n(), n));
    }
    check_parity(e, p)?;
    let mut b = GitLineBundle::trivial(n);
    for i in e.iter() {
        b.exponents[i - 1] = -1;
    }
    b.character = p;
    if n % 2 == 0 {
        for t in MarkingSet::half_sets(n) {
            let x = x_unchecked(&t, e, p);
            let c = match kind {
                BundleKind::L => -x.abs(),
                BundleKind::R => x,
                BundleKind::Q => -x,
                BundleKind::V => x.abs(),
            };
            b.set_exc(t, c);
        }
    }
    Ok(b)
}

/// `L_{E,p}` as a linearized bundle.
pub fn git_form_of_l(n: usize, e: &MarkingSet, p: i64) -> Result<GitLineBundle> {
    git_form(BundleKind::L, n, e, p)
}

/// Tautological expressions of `L, R, Q, V` (the defining formulas).
pub fn taut_form(kind: BundleKind, n: usize, e: &MarkingSet, p: i64) -> Result<TautClass> {
    check_n(n)?;
    check_parity(e, p)?;
    let ee = e.len() as i64;
    let mut c = TautClass::new();
    let xs: Vec<(MarkingSet, i64)> = if n % 2 == 0 {
        MarkingSet::half_sets(n).into_iter().map(|t| (t, x_unchecked(&t, e, p))).collect()
    } else {
        Vec::new()
    };
    match kind {
        BundleKind::L | BundleKind::R | BundleKind::V => {
            c.add(TautSymbol::PsiInf, -(ee - p) / 2);
            for i in e.iter() {
                c.add(TautSymbol::DeltaInf(i), -1);
            }
            for (t, x) in &xs {
                match kind {
                    BundleKind::L if *x > 0 => c.add(TautSymbol::DeltaT(*t), -x),
                    BundleKind::V if *x < 0 => c.add(TautSymbol::DeltaT(*t), -x),
                    _ => {}
                }
            }
        }
        BundleKind::Q => {
            c.add(TautSymbol::Psi0, -(ee + p) / 2);
            for i in e.iter() {
                c.add(TautSymbol::Delta0(i), -1);
            }
        }
    }
    Ok(c)
}

/// Expansion of a descending bundle in the boundary divisors
/// `δ_{i0}`, `δ_{i∞}` and (even n) `δ_T`. Unique up to linear equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryExpansion {
    pub d0: Vec<i64>,
    pub dinf: Vec<i64>,
    /// Indexed like `MarkingSet::half_sets(n)`; empty for odd n.
    pub dt: Vec<i64>,
}

/// Whether `−1 ∈ G_m` and the finite stabilizers act trivially, i.e. the bundle
/// is a line bundle on the quotient. Checked through integrality of the
/// boundary expansion.
pub fn boundary_expansion(b: &GitLineBundle) -> Result<BoundaryExpansion> {
    let n = b.n;
    let sum_j: i64 = b.exponents.iter().sum();
    if (sum_j + b.character).rem_euclid(2) != 0 {
        return Err(Error::NoDescent(format!("{b}: sum of exponents plus character is odd")));
    }
    let mut d0 = vec![0; n];
    d0[0] = (sum_j + b.character) / 2;
    let dinf: Vec<i64> = (0..n).map(|i| b.exponents[i] - d0[i]).collect();
    let mut dt = Vec::new();
    if n % 2 == 0 {
        for t in MarkingSet::half_sets(n) {
            let mut r = b.exc(&t);
            for i in 1..=n {
                if t.contains(i) {
                    r += dinf[i - 1];
                } else {
                    r += d0[i - 1];
                }
            }
            if r.rem_euclid(2) != 0 {
                return Err(Error::NoDescent(format!("{b}: fails at T={t}")));
            }
            dt.push(r / 2);
        }
    } else if !b.exc_coeffs.is_empty() {
        return Err(Error::NoDescent("exceptional coefficients for odd n".into()));
    }
    Ok(BoundaryExpansion { d0, dinf, dt })
}

/// Bidegree of a tautological class on `δ_T ≅ P^s × P^s` (first entry: ∞ side).
pub fn restrict_taut_to_boundary(c: &TautClass, n: usize, t: &MarkingSet) -> Result<(i64, i64)> {
    check_half_set(n, t)?;
    // ψ_i is not in the table; it is routed through the dictionary.
    let mut acc = (0i64, 0i64);
    for (sym, k) in &c.terms {
        check_symbol(sym, n)?;
        let (a, b) = match sym {
            TautSymbol::PsiInf => (-1, 0),
            TautSymbol::Psi0 => (0, -1),
            TautSymbol::DeltaInf(i) => {
                if t.contains(*i) {
                    (1, 0)
                } else {
                    (0, 0)
                }
            }
            TautSymbol::Delta0(i) => {
                if t.contains(*i) {
                    (0, 0)
                } else {
                    (0, 1)
                }
            }
            TautSymbol::DeltaT(u) => {
                if u == t {
                    (-1, -1)
                } else {
                    (0, 0)
                }
            }
            TautSymbol::Psi(_) => restrict_to_boundary(&dictionary(sym, n), t)?,
        };
        acc.0 += k * a;
        acc.1 += k * b;
    }
    Ok(acc)
}

/// Bidegree of a descending bundle on `δ_T ≅ P^s × P^s` (first entry: ∞ side).
pub fn restrict_to_boundary(b: &GitLineBundle, t: &MarkingSet) -> Result<(i64, i64)> {
    check_half_set(b.n, t)?;
    let ex = boundary_expansion(b)?;
    let idx = MarkingSet::half_sets(b.n).iter().position(|u| u == t).expect("half set");
    let mut a = 0;
    let mut c = 0;
    for i in 1..=b.n {
        if t.contains(i) {
            a += ex.dinf[i - 1];
        } else {
            c += ex.d0[i - 1];
        }
    }
    Ok((a - ex.dt[idx], c - ex.dt[idx]))
}

/// The relations that must map to zero: the P¹-bundle identities (odd n) or the
/// three boundary relations (even n), one instance per marking.
pub fn relations(n: usize) -> Vec<(String, TautClass)> {
    let mut out = Vec::new();
    let even = n % 2 == 0;
    let halves = if even { MarkingSet::half_sets(n) } else { Vec::new() };
    if even {
        let mut c = TautClass::new().with(TautSymbol::Psi0, 1).with(TautSymbol::PsiInf, 1);
        for t in &halves {
            c.add(TautSymbol::DeltaT(*t), -1);
        }
        out.push(("psi_0 + psi_inf = sum delta_T".to_string(), c));
    } else {
        out.push((
            "psi_0 = -psi_inf".to_string(),
            TautClass::new().with(TautSymbol::Psi0, 1).with(TautSymbol::PsiInf, 1),
        ));
    }
    for i in 1..=n {
        let mut r0 = TautClass::new()
            .with(TautSymbol::Psi0, 1)
            .with(TautSymbol::DeltaInf(i), -1)
            .with(TautSymbol::Delta0(i), 1);
        let mut rinf = TautClass::new()
            .with(TautSymbol::PsiInf, 1)
            .with(TautSymbol::Delta0(i), -1)
            .with(TautSymbol::DeltaInf(i), 1);
        let ri = TautClass::new()
            .with(TautSymbol::Psi(i), 1)
            .with(TautSymbol::Delta0(i), 1)
            .with(TautSymbol::DeltaInf(i), 1);
        for t in &halves {
            if t.contains(i) {
                r0.add(TautSymbol::DeltaT(*t), -1);
            } else {
                rinf.add(TautSymbol::DeltaT(*t), -1);
            }
        }
        out.push((format!("psi_0 = delta_{i}inf - delta_{i}0 + sum_(T∋{i}) delta_T"), r0));
        out.push((format!("psi_inf = delta_{i}0 - delta_{i}inf + sum_(T∌{i}) delta_T"), rinf));
        out.push((format!("psi_{i} = -delta_{i}0 - delta_{i}inf"), ri));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(n: usize, m: &[usize]) -> MarkingSet {
        MarkingSet::new(n, m).unwrap()
    }

    #[test]
    fn score_examples() {
        assert_eq!(score(5, &ms(5, &[1, 2]), 0), 2);
        assert_eq!(score(3, &ms(3, &[]), 0), 0);
        assert_eq!(score(4, &ms(4, &[1, 2, 3, 4]), 2), 2);
    }

    #[test]
    fn x_and_alpha_examples() {
        let e = ms(4, &[1, 2]);
        assert_eq!(x_coeff(4, &ms(4, &[1, 2]), &e, 0).unwrap(), 1);
        assert_eq!(x_coeff(4, &ms(4, &[3, 4]), &e, 0).unwrap(), -1);
        assert_eq!(x_coeff(4, &ms(4, &[1, 3]), &e, 0).unwrap(), 0);
        assert_eq!(alpha_coeff(4, &ms(4, &[1, 2]), &e, 0).unwrap(), -1);
        assert_eq!(alpha_coeff(4, &ms(4, &[1, 3]), &e, 0).unwrap(), 0);
        assert_eq!(alpha_coeff(6, &ms(6, &[1, 2, 3]), &ms(6, &[1, 2, 3, 4]), 0).unwrap(), -1);
        assert!(matches!(
            x_coeff(6, &ms(6, &[1, 2, 3]), &ms(6, &[1, 2, 3]), 0),
            Err(Error::Parity { .. })
        ));
        assert!(x_coeff(5, &ms(5, &[1, 2]), &e, 0).is_err());
    }

    #[test]
    fn subsets_are_lexicographic() {
        let s = MarkingSet::subsets_of_size(4, 2);
        let m: Vec<Vec<usize>> = s.iter().map(|x| x.members()).collect();
        assert_eq!(m, vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]);
        assert_eq!(MarkingSet::all_subsets(5).len(), 32);
        assert_eq!(ms(5, &[2, 4, 5]).subsets_within(2).len(), 3);
        assert!(ms(3, &[1, 3]) < ms(3, &[2]));
    }

    #[test]
    fn git_form_examples() {
        let b = git_form_of_l(3, &ms(3, &[1, 2]), 0).unwrap();
        assert_eq!(b.exponents, vec![-1, -1, 0]);
        assert!(b.exc_coeffs.is_empty());
        assert_eq!(git_form_of_l(2, &ms(2, &[]), 0).unwrap(), GitLineBundle::trivial(2));
        let b = git_form_of_l(4, &ms(4, &[1, 2]), 0).unwrap();
        assert_eq!(b.exponents, vec![-1, -1, 0, 0]);
        assert_eq!(b.exc(&ms(4, &[1, 2])), -1);
        assert_eq!(b.exc(&ms(4, &[3, 4])), -1);
        for t in [[1, 3], [1, 4], [2, 3], [2, 4]] {
            assert_eq!(b.exc(&ms(4, &t)), 0);
        }
        assert_eq!(b.character, 0);
    }

    #[test]
    fn dictionary_kills_examples() {
        let z = TautClass::new().with(TautSymbol::Psi0, 1).with(TautSymbol::PsiInf, 1);
        assert_eq!(taut_to_git(&z, 3).unwrap(), GitLineBundle::trivial(3));
        let mut r = z.clone();
        for t in MarkingSet::half_sets(4) {
            r.add(TautSymbol::DeltaT(t), -1);
        }
        assert_eq!(taut_to_git(&r, 4).unwrap(), GitLineBundle::trivial(4));
        let p = TautClass::new()
            .with(TautSymbol::Psi(1), 1)
            .with(TautSymbol::Delta0(1), 1)
            .with(TautSymbol::DeltaInf(1), 1);
        assert_eq!(taut_to_git(&p, 3).unwrap(), GitLineBundle::trivial(3));
        let bad = TautClass::symbol(TautSymbol::DeltaT(ms(4, &[1, 2])));
        assert!(taut_to_git(&bad, 5).is_err());
    }

    #[test]
    fn restriction_examples() {
        let t = ms(4, &[1, 2]);
        let psi = TautClass::symbol(TautSymbol::PsiInf);
        assert_eq!(restrict_taut_to_boundary(&psi, 4, &t).unwrap(), (-1, 0));
        let d = TautClass::symbol(TautSymbol::DeltaT(t));
        assert_eq!(restrict_taut_to_boundary(&d, 4, &t).unwrap(), (-1, -1));
        let l = git_form_of_l(4, &t, 0).unwrap();
        // L|_δ = O(0, -α_T) and its dual restricts to O(0, α_T) = O(0,-1).
        assert_eq!(restrict_to_boundary(&l, &t).unwrap(), (0, 1));
        assert_eq!(restrict_to_boundary(&l.dual(), &t).unwrap(), (0, -1));
        let lt = taut_form(BundleKind::L, 4, &t, 0).unwrap();
        assert_eq!(restrict_taut_to_boundary(&lt, 4, &t).unwrap(), (0, 1));
    }

    #[test]
    fn flip_exchanges_l() {
        let n = 6;
        for e in MarkingSet::all_subsets(n) {
            for p in -4i64..=4 {
                if (e.len() as i64 + p) % 2 != 0 {
                    continue;
                }
                let l = git_form_of_l(n, &e, p).unwrap();
                assert_eq!(l.flipped(), git_form_of_l(n, &e, -p).unwrap());
                let r = git_form(BundleKind::R, n, &e, p).unwrap();
                assert_eq!(r.flipped(), git_form(BundleKind::Q, n, &e, -p).unwrap());
            }
        }
    }
}

//! Pairwise `RHom` verdicts for the collection and the Euler-pairing Gram matrix.
//!
//! Throughout, a [`PairVerdict`] describes `RHom(later, earlier)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blowup_even::{analyze_difference, descends, Outcome};
use crate::cohomology::{euler_weight, kunneth, proj_product_cohomology, proj_product_euler};
use crate::collections::{enumerate_collection, Level};
use crate::core_model::{git_form_of_l, half_index, restrict_to_boundary, CollectionItem, GitLineBundle, MarkingSet};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rhom {
    Zero,
    ScalarIdentity,
    Nonzero(String),
    /// The available certificate neither proves vanishing nor exhibits a class.
    Indeterminate(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    OddWeightPart,
    EvenPeeling,
    TorsionCriterion,
    RestrictionAcyclicity,
    DisjointSupport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub later: CollectionItem,
    pub earlier: CollectionItem,
    pub rhom: Rhom,
    pub method: Method,
}

fn exponent_difference(n: usize, e1: &MarkingSet, e2: &MarkingSet) -> Vec<i64> {
    (1..=n).map(|i| e1.contains(i) as i64 - e2.contains(i) as i64).collect()
}

fn describe_degrees(js: &[i64], w: i64) -> String {
    let k = kunneth(js);
    let parts: Vec<String> = k
        .degrees
        .iter()
        .filter_map(|(d, m)| m.get(&w).map(|c| format!("H^{d} dim {c}")))
        .collect();
    format!("weight {w}: {}", parts.join(", "))
}

/// `RHom(L_{E1,p1}, L_{E2,p2})` for odd `n`.
pub fn rhom_odd_pair(n: usize, (e1, p1): (MarkingSet, i64), (e2, p2): (MarkingSet, i64)) -> Result<PairVerdict> {
    if n % 2 == 0 {
        return Err(Error::NeedsOddN(n));
    }
    let later = CollectionItem::line_bundle(e1, p1)?;
    let earlier = CollectionItem::line_bundle(e2, p2)?;
    let js = exponent_difference(n, &e1, &e2);
    let w = p1 - p2;
    let k = kunneth(&js);
    let rhom = if e1 == e2 && p1 == p2 {
        Rhom::ScalarIdentity
    } else if k.weight_total(w) == 0 {
        Rhom::Zero
    } else {
        Rhom::Nonzero(describe_degrees(&js, w))
    };
    Ok(PairVerdict { later, earlier, rhom, method: Method::OddWeightPart })
}

fn outcome_to_rhom(o: &Outcome) -> Rhom {
    match o {
        Outcome::CertifiedZero => Rhom::Zero,
        Outcome::IdentityScalar => Rhom::ScalarIdentity,
        Outcome::NonzeroWitness { weight, degrees, euler } => {
            Rhom::Nonzero(format!("weight {weight}: base degrees {degrees:?}, euler {euler}"))
        }
        Outcome::Indeterminate => Rhom::Indeterminate("a peeled piece meets the target weight".into()),
    }
}

/// The four conditions under which `{O_δ(-a,-b), O_δ(-a',-b')}` fails to be exceptional.
pub fn torsion_lemma_listed(s: i64, (a, b): (i64, i64), (a2, b2): (i64, i64)) -> bool {
    (a2 >= a && b2 >= b)
        || (a2 == 0 && a == s && b2 > b)
        || (b2 == 0 && b == s && a2 > a)
        || (a2 == 0 && b2 == 0 && a == s && b == s)
}

/// Whether `H*(O_δ(a'-a, b'-b))` or `H*(O_δ(a'-a-1, b'-b-1))` is nonzero.
pub fn torsion_cohomological(s: i64, (a, b): (i64, i64), (a2, b2): (i64, i64)) -> bool {
    let m = s as usize;
    proj_product_cohomology(m, a2 - a, b2 - b).is_some()
        || proj_product_cohomology(m, a2 - a - 1, b2 - b - 1).is_some()
}

/// `RHom(O_{δ_T'}(-a',-b'), O_{δ_T}(-a,-b))`, the first argument being the earlier item.
pub fn torsion_pair_verdict(
    n: usize,
    (t, a, b): (MarkingSet, i64, i64),
    (t2, a2, b2): (MarkingSet, i64, i64),
) -> Result<PairVerdict> {
    let earlier = CollectionItem::torsion(t, a, b)?;
    let later = CollectionItem::torsion(t2, a2, b2)?;
    if t.n() != n || t2.n() != n {
        return Err(Error::NMismatch(t.n(), n));
    }
    if t != t2 {
        return Ok(PairVerdict { later, earlier, rhom: Rhom::Zero, method: Method::DisjointSupport });
    }
    let s = half_index(n) as i64;
    if [a, b, a2, b2].iter().any(|&x| x > s) {
        return Err(Error::Precondition(format!("torsion twists must lie in [0,{s}]")));
    }
    let listed = torsion_lemma_listed(s, (a, b), (a2, b2));
    let cohom = torsion_cohomological(s, (a, b), (a2, b2));
    let rhom = if listed != cohom {
        Rhom::Indeterminate("listed conditions and cohomology disagree".into())
    } else if (a, b) == (a2, b2) {
        Rhom::ScalarIdentity
    } else if listed {
        Rhom::Nonzero(format!("O({},{}) or O({},{}) has cohomology", a2 - a, b2 - b, a2 - a - 1, b2 - b - 1))
    } else {
        Rhom::Zero
    };
    Ok(PairVerdict { later, earlier, rhom, method: Method::TorsionCriterion })
}

fn product_rhom(s: usize, x: i64, y: i64) -> Rhom {
    match proj_product_cohomology(s, x, y) {
        None => Rhom::Zero,
        Some((d, dim)) => Rhom::Nonzero(format!("O({x},{y}) has H^{d} of dim {dim}")),
    }
}

/// `RHom(L_{E,p}, O_{δ_T}(-a,-b)) = RΓ(L^∨|_δ ⊗ O(-a,-b))`.
pub fn torsion_vs_linebundle(n: usize, (e, p): (MarkingSet, i64), (t, a, b): (MarkingSet, i64, i64)) -> Result<PairVerdict> {
    let later = CollectionItem::line_bundle(e, p)?;
    let earlier = CollectionItem::torsion(t, a, b)?;
    let (l1, l2) = restrict_to_boundary(&git_form_of_l(n, &e, p)?, &t)?;
    let rhom = product_rhom(half_index(n), -l1 - a, -l2 - b);
    Ok(PairVerdict { later, earlier, rhom, method: Method::RestrictionAcyclicity })
}

/// `RHom(O_{δ_T}(-a,-b), L_{E,p}) = RΓ(L|_δ ⊗ O(a-1,b-1))[-1]`.
pub fn linebundle_vs_torsion(n: usize, (t, a, b): (MarkingSet, i64, i64), (e, p): (MarkingSet, i64)) -> Result<PairVerdict> {
    let later = CollectionItem::torsion(t, a, b)?;
    let earlier = CollectionItem::line_bundle(e, p)?;
    let (m1, m2) = restrict_to_boundary(&git_form_of_l(n, &e, p)?, &t)?;
    let rhom = product_rhom(half_index(n), m1 + a - 1, m2 + b - 1);
    Ok(PairVerdict { later, earlier, rhom, method: Method::RestrictionAcyclicity })
}

/// Precomputed data for a whole collection.
struct Prepared {
    n: usize,
    s: usize,
    items: Vec<CollectionItem>,
    levels: Vec<Level>,
    bundles: Vec<Option<GitLineBundle>>,
    /// Restriction bidegrees of line bundles, indexed by the position of `T` in `half_sets`.
    restrictions: Vec<Vec<(i64, i64)>>,
    half_sets: Vec<MarkingSet>,
}

impl Prepared {
    fn new(n: usize, items: Vec<CollectionItem>, levels: Vec<Level>) -> Result<Self> {
        let half_sets = if n % 2 == 0 { MarkingSet::half_sets(n) } else { Vec::new() };
        let mut bundles = Vec::with_capacity(items.len());
        let mut restrictions = Vec::with_capacity(items.len());
        for it in &items {
            match it {
                CollectionItem::LineBundle { e, p } => {
                    let b = git_form_of_l(n, e, *p)?;
                    if !descends(&b) {
                        return Err(Error::NoDescent(b.to_string()));
                    }
                    let r = half_sets.iter().map(|t| restrict_to_boundary(&b, t)).collect::<Result<Vec<_>>>()?;
                    bundles.push(Some(b));
                    restrictions.push(r);
                }
                CollectionItem::Torsion { .. } => {
                    bundles.push(None);
                    restrictions.push(Vec::new());
                }
            }
        }
        Ok(Self { n, s: half_index(n), items, levels, bundles, restrictions, half_sets })
    }

    fn t_index(&self, t: &MarkingSet) -> usize {
        self.half_sets.iter().position(|u| u == t).expect("half set")
    }

    /// `χ(RHom(items[i], items[j]))` and, when `want_verdict`, the verdict.
    fn analyze(&self, i: usize, j: usize, want_verdict: bool) -> Result<(i64, Option<PairVerdict>)> {
        let (x, y) = (self.items[i], self.items[j]);
        let s = self.s;
        let verdict = |rhom, method| PairVerdict { later: x, earlier: y, rhom, method };
        match (x, y) {
            (CollectionItem::LineBundle { e: e1, p: p1 }, CollectionItem::LineBundle { e: e2, p: p2 }) => {
                if self.n % 2 == 1 {
                    let js = exponent_difference(self.n, &e1, &e2);
                    let chi = euler_weight(&js, p1 - p2);
                    let v = if want_verdict { Some(rhom_odd_pair(self.n, (e1, p1), (e2, p2))?) } else { None };
                    Ok((chi, v))
                } else {
                    let (l1, l2) = (self.bundles[i].as_ref().unwrap(), self.bundles[j].as_ref().unwrap());
                    let (pv, chi) = analyze_difference(&l2.minus(l1), i == j, 0)?;
                    Ok((chi, want_verdict.then(|| verdict(outcome_to_rhom(&pv.outcome), Method::EvenPeeling))))
                }
            }
            (CollectionItem::Torsion { t: t1, a: a1, b: b1 }, CollectionItem::Torsion { t: t2, a: a2, b: b2 }) => {
                // RHom(O(-a1,-b1), O(-a2,-b2)) = RHom(O_δ, O_δ(a1-a2, b1-b2))
                let chi = if t1 == t2 {
                    let (u, v) = (a1 - a2, b1 - b2);
                    (proj_product_euler(s, u, v) - proj_product_euler(s, u - 1, v - 1)) as i64
                } else {
                    0
                };
                let v = if want_verdict {
                    Some(torsion_pair_verdict(self.n, (t2, a2, b2), (t1, a1, b1))?)
                } else {
                    None
                };
                Ok((chi, v))
            }
            (CollectionItem::LineBundle { .. }, CollectionItem::Torsion { t, a, b }) => {
                let (l1, l2) = self.restrictions[i][self.t_index(&t)];
                let (u, v) = (-l1 - a, -l2 - b);
                let chi = proj_product_euler(s, u, v) as i64;
                Ok((chi, want_verdict.then(|| verdict(product_rhom(s, u, v), Method::RestrictionAcyclicity))))
            }
            (CollectionItem::Torsion { t, a, b }, CollectionItem::LineBundle { .. }) => {
                let (m1, m2) = self.restrictions[j][self.t_index(&t)];
                let (u, v) = (m1 + a - 1, m2 + b - 1);
                let chi = -(proj_product_euler(s, u, v) as i64);
                Ok((chi, want_verdict.then(|| verdict(product_rhom(s, u, v), Method::RestrictionAcyclicity))))
            }
        }
    }
}

/// `χ(RHom(item1, item2))` for items of the collection (or within its ranges).
pub fn euler_pairing(item1: &CollectionItem, item2: &CollectionItem) -> Result<i64> {
    let n = item1.n();
    if item2.n() != n {
        return Err(Error::NMismatch(n, item2.n()));
    }
    let items = vec![*item1, *item2];
    let levels = items.iter().map(Level::of).collect();
    Ok(Prepared::new(n, items, levels)?.analyze(0, 1, false)?.0)
}

/// `RHom(later, earlier)` by the method appropriate to the pair.
pub fn pair_verdict(later: &CollectionItem, earlier: &CollectionItem) -> Result<PairVerdict> {
    let n = later.n();
    if earlier.n() != n {
        return Err(Error::NMismatch(n, earlier.n()));
    }
    let items = vec![*later, *earlier];
    let levels = items.iter().map(Level::of).collect();
    let i = if later == earlier { 0 } else { 1 };
    Ok(Prepared::new(n, items, levels)?.analyze(0, i, true)?.1.expect("verdict requested"))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub labels: Vec<String>,
    /// `entries[i][j] = χ(c_i, c_j)`.
    pub entries: Vec<Vec<i64>>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(i, row)| row[i] == 1 && row[..i].iter().all(|&x| x == 0))
    }

    /// Exact determinant: the diagonal product when triangular, fraction-free
    /// elimination otherwise.
    pub fn determinant(&self) -> BigInt {
        if self.entries.iter().enumerate().all(|(i, row)| row[..i].iter().all(|&x| x == 0)) {
            return self.entries.iter().enumerate().map(|(i, row)| BigInt::from(row[i])).product();
        }
        bareiss_determinant(&self.entries)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("item");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.entries) {
            out.push_str(l);
            for x in row {
                out.push(',');
                out.push_str(&x.to_string());
            }
            out.push('\n');
        }
        out
    }
}

pub fn bareiss_determinant(m: &[Vec<i64>]) -> BigInt {
    let k = m.len();
    if k == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for c in 0..k - 1 {
        if a[c][c].is_zero() {
            match (c + 1..k).find(|&r| !a[r][c].is_zero()) {
                Some(r) => {
                    a.swap(c, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for r in c + 1..k {
            for col in c + 1..k {
                let v = (&a[r][col] * &a[c][c] - &a[r][c] * &a[c][col]) / &prev;
                a[r][col] = v;
            }
        }
        prev = a[c][c].clone();
    }
    sign * &a[k - 1][k - 1]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalityReport {
    pub n: usize,
    pub items: usize,
    pub pairs_checked: usize,
    pub method_counts: BTreeMap<String, usize>,
    pub failures: Vec<String>,
    pub gram_unitriangular: bool,
    pub determinant: String,
    /// Torsion-to-line-bundle pairs with nonzero Euler pairing (not required to vanish).
    pub torsion_to_line_bundle_nonzero: usize,
    #[serde(skip)]
    pub gram: GramMatrix,
}

impl ExceptionalityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.gram_unitriangular && self.determinant.trim_start_matches('-') == "1"
    }
}

/// Checks `RHom(later, earlier) = 0` for all required pairs (both directions
/// within a level), the diagonal, and the Gram matrix.
pub fn verify_collection_exceptional(n: usize) -> Result<ExceptionalityReport> {
    let c = enumerate_collection(n)?;
    let levels: Vec<Level> = c.items.iter().map(|x| c.level[x]).collect();
    let prep = Prepared::new(n, c.items.clone(), levels)?;
    let k = prep.items.len();
    type Row = (Vec<i64>, Vec<String>, Vec<Method>, usize);
    let rows: Vec<Row> = (0..k)
        .into_par_iter()
        .map(|i| -> Result<Row> {
            let mut row = Vec::with_capacity(k);
            let mut fails = Vec::new();
            let mut methods = Vec::new();
            let mut t2l = 0;
            for j in 0..k {
                let required = i >= j || prep.levels[i] == prep.levels[j];
                let (chi, v) = prep.analyze(i, j, required)?;
                row.push(chi);
                if prep.items[i].is_torsion() && !prep.items[j].is_torsion() && chi != 0 {
                    t2l += 1;
                }
                if let Some(v) = v {
                    methods.push(v.method);
                    let ok = if i == j { v.rhom == Rhom::ScalarIdentity } else { v.rhom == Rhom::Zero };
                    if !ok {
                        fails.push(format!("RHom({}, {}) = {:?} via {:?}", v.later, v.earlier, v.rhom, v.method));
                    }
                }
            }
            Ok((row, fails, methods, t2l))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::with_capacity(k);
    let mut failures = Vec::new();
    let mut method_counts = BTreeMap::new();
    let mut pairs_checked = 0;
    let mut t2l = 0;
    for (row, fails, methods, t) in rows {
        entries.push(row);
        failures.extend(fails);
        pairs_checked += methods.len();
        for m in methods {
            *method_counts.entry(format!("{m:?}")).or_insert(0) += 1;
        }
        t2l += t;
    }
    let gram = GramMatrix { labels: prep.items.iter().map(|x| x.label()).collect(), entries };
    Ok(ExceptionalityReport {
        n,
        items: k,
        pairs_checked,
        method_counts,
        failures,
        gram_unitriangular: gram.is_upper_unitriangular(),
        determinant: gram.determinant().to_string(),
        torsion_to_line_bundle_nonzero: t2l,
        gram,
    })
}

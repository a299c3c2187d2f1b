//! Fullness via generation certificates.
//!
//! A certificate is a DAG of short exact sequences (Koszul resolutions, chains of
//! elementary modifications along boundary divisors, Koszul complexes on one
//! factor of a boundary divisor) and `S₂` relabelings. Each node produces its
//! target from collection members and targets of earlier nodes. The verifier
//! recomputes every term list and checks exactness in K-theory through the
//! Euler pairing against the collection.

mod generate;
mod kclass;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::collections::{enumerate_collection, in_line_bundle_range, in_torsion_range};
use crate::core_model::{half_index, x_unchecked, BundleKind, CollectionItem, MarkingSet};
use crate::error::{Error, Result};

pub use generate::{generate_even, generate_odd, Generator};
pub use kclass::KPairing;

pub const CERTIFICATE_SCHEMA: &str = "zn-certificate/1";

/// A sheaf appearing in a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tag {
    /// `L, R, Q` or `V` at `(E, p)`. For odd `n` only `L` is used.
    Line { kind: BundleKind, e: MarkingSet, p: i64 },
    /// `O_{δ_T}(u, v)`, first entry on the `∞` side.
    Torsion { t: MarkingSet, u: i64, v: i64 },
}

impl Tag {
    pub fn line(kind: BundleKind, e: MarkingSet, p: i64) -> Self {
        Tag::Line { kind, e, p }
    }

    pub fn l(e: MarkingSet, p: i64) -> Self {
        Tag::Line { kind: BundleKind::L, e, p }
    }

    pub fn torsion(t: MarkingSet, u: i64, v: i64) -> Self {
        Tag::Torsion { t, u, v }
    }

    pub fn n(&self) -> usize {
        match self {
            Tag::Line { e, .. } => e.n(),
            Tag::Torsion { t, .. } => t.n(),
        }
    }

    /// Image under the `S₂` flip.
    pub fn flipped(&self) -> Tag {
        match *self {
            Tag::Line { kind, e, p } => {
                let kind = match kind {
                    BundleKind::R => BundleKind::Q,
                    BundleKind::Q => BundleKind::R,
                    k => k,
                };
                Tag::Line { kind, e, p: -p }
            }
            Tag::Torsion { t, u, v } => Tag::Torsion { t: t.complement(), u: v, v: u },
        }
    }

    /// The collection member this tag names, if any.
    pub fn collection_item(&self) -> Option<CollectionItem> {
        let n = self.n();
        match *self {
            Tag::Line { kind: BundleKind::L, e, p } if in_line_bundle_range(n, &e, p) => {
                Some(CollectionItem::LineBundle { e, p })
            }
            Tag::Torsion { t, u, v } if in_torsion_range(n, -u, -v) => {
                Some(CollectionItem::Torsion { t, a: -u, b: -v })
            }
            _ => None,
        }
    }

    pub fn from_item(item: &CollectionItem) -> Tag {
        match *item {
            CollectionItem::LineBundle { e, p } => Tag::l(e, p),
            CollectionItem::Torsion { t, a, b } => Tag::torsion(t, -a, -b),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Line { kind, e, p } => write!(f, "{kind}[{e};{p}]"),
            Tag::Torsion { t, u, v } => write!(f, "O_d{t}({u},{v})"),
        }
    }
}

/// One term of an exact complex: `multiplicity` copies of `tag` in `degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term {
    pub tag: Tag,
    pub degree: usize,
    pub multiplicity: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KoszulKind {
    OddType1,
    OddType2,
    EvenK1,
    EvenK2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulStep {
    pub kind: KoszulKind,
    pub i: MarkingSet,
    pub twist_e: MarkingSet,
    pub twist_p: i64,
    pub terms: Vec<Term>,
}

/// The resolution attached to `I` and the twist, one term per `J ⊆ I` in degree `|J|`:
/// `L_{E∪J,p-j}` (odd type 1), `L_{E∪J,p+j}` (odd type 2), `Q_{E∪J,p-j}` (K1),
/// `R_{E∖J,p-j}` (K2).
pub fn koszul_terms(kind: KoszulKind, n: usize, i: &MarkingSet, (e, p): (MarkingSet, i64)) -> Result<KoszulStep> {
    if i.n() != n || e.n() != n {
        return Err(Error::NMismatch(i.n().max(e.n()), n));
    }
    if (e.len() as i64 + p).rem_euclid(2) != 0 {
        return Err(Error::Parity { e: e.len(), p });
    }
    let s = half_index(n);
    if i.len() != s + 1 {
        return Err(Error::BadSubsetSize { got: i.len(), want: s + 1 });
    }
    let odd = n % 2 == 1;
    let ee = e.len();
    let pre = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("{kind:?} with I={i}, E={e}: {what}")))
        }
    };
    match kind {
        KoszulKind::OddType1 | KoszulKind::OddType2 => {
            if !odd {
                return Err(Error::NeedsOddN(n));
            }
            pre(i.is_disjoint(&e), "I must be disjoint from E")?;
        }
        KoszulKind::EvenK1 => {
            if odd {
                return Err(Error::NeedsEvenN(n));
            }
            pre(i.is_disjoint(&e) && ee <= s + 1, "needs I ∩ E = ∅ and e <= s+1")?;
        }
        KoszulKind::EvenK2 => {
            if odd {
                return Err(Error::NeedsEvenN(n));
            }
            pre(i.is_subset(&e) && ee >= s + 1, "needs I ⊆ E and e >= s+1")?;
        }
    }
    let mut terms = Vec::new();
    for k in 0..=s + 1 {
        for j in i.subsets_within(k) {
            let jj = k as i64;
            let tag = match kind {
                KoszulKind::OddType1 => Tag::l(e.union(&j), p - jj),
                KoszulKind::OddType2 => Tag::l(e.union(&j), p + jj),
                KoszulKind::EvenK1 => Tag::line(BundleKind::Q, e.union(&j), p - jj),
                KoszulKind::EvenK2 => Tag::line(BundleKind::R, e.difference(&j), p - jj),
            };
            terms.push(Term { tag, degree: k, multiplicity: 1 });
        }
    }
    Ok(KoszulStep { kind, i: *i, twist_e: e, twist_p: p, terms })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    LtoR,
    LtoQ,
    RtoV,
    QtoV,
}

impl Relation {
    pub fn kinds(self) -> (BundleKind, BundleKind) {
        match self {
            Relation::LtoR => (BundleKind::L, BundleKind::R),
            Relation::LtoQ => (BundleKind::L, BundleKind::Q),
            Relation::RtoV => (BundleKind::R, BundleKind::V),
            Relation::QtoV => (BundleKind::Q, BundleKind::V),
        }
    }
}

/// `from ⊆ to` with successive quotients `O_{δ_T}(u, v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientChainStep {
    pub relation: Relation,
    pub e: MarkingSet,
    pub p: i64,
    pub from: Tag,
    pub to: Tag,
    pub quotients: Vec<(MarkingSet, i64, i64)>,
}

impl QuotientChainStep {
    fn terms(&self) -> Vec<Term> {
        let mut out = vec![
            Term { tag: self.to, degree: 0, multiplicity: 1 },
            Term { tag: self.from, degree: 1, multiplicity: 1 },
        ];
        out.extend(
            self.quotients
                .iter()
                .map(|&(t, u, v)| Term { tag: Tag::torsion(t, u, v), degree: 1, multiplicity: 1 }),
        );
        out
    }
}

pub fn quotient_chain(n: usize, relation: Relation, e: &MarkingSet, p: i64) -> Result<QuotientChainStep> {
    if n % 2 == 1 {
        return Err(Error::NeedsEvenN(n));
    }
    if e.n() != n {
        return Err(Error::NMismatch(e.n(), n));
    }
    if (e.len() as i64 + p).rem_euclid(2) != 0 {
        return Err(Error::Parity { e: e.len(), p });
    }
    let mut quotients = Vec::new();
    for t in MarkingSet::half_sets(n) {
        let x = x_unchecked(&t, e, p);
        match relation {
            Relation::LtoR if x > 0 => quotients.extend((0..x).map(|i| (t, -x + i, i))),
            Relation::LtoQ if x < 0 => quotients.extend((0..-x).map(|i| (t, i, x + i))),
            Relation::RtoV if x < 0 => quotients.extend((1..=-x).map(|i| (t, -x - i, -i))),
            Relation::QtoV if x > 0 => quotients.extend((1..=x).map(|i| (t, -i, x - i))),
            _ => {}
        }
    }
    let (a, b) = relation.kinds();
    Ok(QuotientChainStep { relation, e: *e, p, from: Tag::line(a, *e, p), to: Tag::line(b, *e, p), quotients })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    First,
    Second,
}

/// Koszul complex of one factor of `δ_T ≅ P^s × P^s`:
/// `O(u-k, v)` (or `O(u, v-k)`) with multiplicity `C(s+1, k)` in degree `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberKoszulStep {
    pub t: MarkingSet,
    pub axis: Axis,
    pub top: (i64, i64),
    pub terms: Vec<Term>,
}

pub fn fiber_koszul(n: usize, t: &MarkingSet, axis: Axis, top: (i64, i64)) -> Result<FiberKoszulStep> {
    if n % 2 == 1 {
        return Err(Error::NeedsEvenN(n));
    }
    if t.n() != n || 2 * t.len() != n {
        return Err(Error::BadSubsetSize { got: t.len(), want: n / 2 });
    }
    let s = half_index(n) as u64;
    let mut terms = Vec::new();
    let mut c: u64 = 1;
    for k in 0..=s + 1 {
        let (u, v) = match axis {
            Axis::First => (top.0 - k as i64, top.1),
            Axis::Second => (top.0, top.1 - k as i64),
        };
        terms.push(Term { tag: Tag::torsion(*t, u, v), degree: k as usize, multiplicity: c });
        c = c * (s + 1 - k) / (k + 1);
    }
    Ok(FiberKoszulStep { t: *t, axis, top, terms })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    Koszul(KoszulStep),
    Quotient(QuotientChainStep),
    Fiber(FiberKoszulStep),
    /// The target is the flip of `source`.
    Relabel { source: Tag },
}

impl Step {
    /// Terms of the exact complex; empty for a relabeling.
    pub fn terms(&self) -> Vec<Term> {
        match self {
            Step::Koszul(k) => k.terms.clone(),
            Step::Quotient(q) => q.terms(),
            Step::Fiber(f) => f.terms.clone(),
            Step::Relabel { .. } => Vec::new(),
        }
    }

    /// Tags needed to produce `target`.
    pub fn inputs(&self, target: &Tag) -> Vec<Tag> {
        match self {
            Step::Relabel { source } => vec![*source],
            _ => {
                let mut seen = BTreeSet::new();
                self.terms().into_iter().map(|t| t.tag).filter(|t| t != target && seen.insert(*t)).collect()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Step::Koszul(_) => "koszul",
            Step::Quotient(_) => "quotient-chain",
            Step::Fiber(_) => "fiber-koszul",
            Step::Relabel { .. } => "relabel",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub target: Tag,
    pub step: Step,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationCertificate {
    pub schema: String,
    pub n: usize,
    pub target: Tag,
    pub nodes: Vec<Node>,
    pub leaves: Vec<CollectionItem>,
}

impl GenerationCertificate {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s).map_err(|e| Error::Io(e.to_string()))?;
        if c.schema != CERTIFICATE_SCHEMA {
            return Err(Error::Config(format!("unknown certificate schema {}", c.schema)));
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckFailure {
    /// One of `a` (DAG), `b` (leaves), `c` (closed forms), `d` (exactness).
    pub check: char,
    pub node: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub nodes: usize,
    pub leaves: usize,
    pub failures: Vec<CheckFailure>,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed(&self, check: char) -> bool {
        self.failures.iter().any(|f| f.check == check)
    }
}

pub fn verify_certificate(cert: &GenerationCertificate) -> Result<CertificateCheck> {
    let mut k = KPairing::new(cert.n)?;
    verify_with(cert, &mut k)
}

/// Verification against a shared pairing cache.
pub fn verify_with(cert: &GenerationCertificate, k: &mut KPairing) -> Result<CertificateCheck> {
    if k.n() != cert.n {
        return Err(Error::NMismatch(k.n(), cert.n));
    }
    let n = cert.n;
    let mut out = CertificateCheck { nodes: cert.nodes.len(), leaves: cert.leaves.len(), failures: Vec::new() };
    let mut fail = |check: char, node: Option<usize>, message: String| {
        out.failures.push(CheckFailure { check, node, message });
    };
    let collection = enumerate_collection(n)?;
    let listed: BTreeSet<CollectionItem> = cert.leaves.iter().copied().collect();

    // (a) ordering and shape
    let mut produced: HashMap<Tag, usize> = HashMap::new();
    for (pos, node) in cert.nodes.iter().enumerate() {
        if node.id != pos {
            fail('a', Some(node.id), format!("node id {} at position {pos}", node.id));
        }
        if produced.insert(node.target, pos).is_some() {
            fail('a', Some(pos), format!("{} produced twice", node.target));
        }
    }
    let mut used_leaves = BTreeSet::new();
    for (pos, node) in cert.nodes.iter().enumerate() {
        let any_n = node.step.terms().iter().any(|t| t.tag.n() != n) || node.target.n() != n;
        if any_n {
            fail('a', Some(pos), "term with the wrong number of markings".into());
            continue;
        }
        if !matches!(node.step, Step::Relabel { .. }) && !node.step.terms().iter().any(|t| t.tag == node.target) {
            fail('a', Some(pos), format!("target {} is not a term", node.target));
        }
        for input in node.step.inputs(&node.target) {
            match produced.get(&input) {
                Some(&q) if q < pos => {}
                Some(&q) => fail('a', Some(pos), format!("input {input} is produced later, by node {q}")),
                None => {
                    used_leaves.insert(input);
                }
            }
        }
    }
    match cert.nodes.last() {
        Some(last) if last.target != cert.target => {
            fail('a', None, format!("last node produces {}, not {}", last.target, cert.target))
        }
        None => {
            used_leaves.insert(cert.target);
        }
        _ => {}
    }

    // (b) leaves
    for tag in &used_leaves {
        match tag.collection_item() {
            Some(item) if collection.contains(&item) && listed.contains(&item) => {}
            Some(item) if collection.contains(&item) => fail('b', None, format!("leaf {item} is not listed")),
            _ => fail('b', None, format!("leaf {tag} is not a collection member")),
        }
    }
    for item in &cert.leaves {
        if !collection.contains(item) {
            fail('b', None, format!("listed leaf {item} is not a collection member"));
        }
    }

    // (c) closed forms
    for (pos, node) in cert.nodes.iter().enumerate() {
        let ok = match &node.step {
            Step::Koszul(st) => koszul_terms(st.kind, n, &st.i, (st.twist_e, st.twist_p)).map(|r| r == *st),
            Step::Quotient(st) => quotient_chain(n, st.relation, &st.e, st.p).map(|r| r == *st),
            Step::Fiber(st) => fiber_koszul(n, &st.t, st.axis, st.top).map(|r| r == *st),
            Step::Relabel { source } => Ok(source.flipped() == node.target),
        };
        match ok {
            Ok(true) => {}
            Ok(false) => fail('c', Some(pos), format!("{} step differs from its closed form", node.step.name())),
            Err(e) => fail('c', Some(pos), format!("closed form unavailable: {e}")),
        }
    }

    // (d) exactness in K-theory
    for (pos, node) in cert.nodes.iter().enumerate() {
        match k.node_defect(node) {
            Ok(None) => {}
            Ok(Some(msg)) => fail('d', Some(pos), msg),
            Err(e) => fail('d', Some(pos), format!("pairing unavailable: {e}")),
        }
    }
    Ok(out)
}

/// The objects whose generation implies fullness: pushforwards from the
/// blow-up together with the torsion sheaves `O_{δ_T}(-a,-b)`, `0 < a,b <= s`.
pub fn pushforward_targets(n: usize) -> Result<Vec<Tag>> {
    if n < 2 {
        return Err(Error::Precondition(format!("n >= 2 required, got {n}")));
    }
    let mut out = vec![Tag::l(MarkingSet::empty(n), 0)];
    for e in MarkingSet::all_subsets(n) {
        let k = e.len() as i64;
        if k < 2 {
            continue;
        }
        if n % 2 == 1 {
            out.extend((-(k - 2)..=k - 2).step_by(2).map(|p| Tag::l(e, p)));
        } else {
            out.extend((1..k).map(|a| Tag::line(BundleKind::V, e, 2 * a - k)));
        }
    }
    if n % 2 == 0 {
        let s = half_index(n) as i64;
        for t in MarkingSet::half_sets(n) {
            for a in 1..=s {
                for b in 1..=s {
                    out.push(Tag::torsion(t, -a, -b));
                }
            }
        }
    }
    Ok(out)
}

/// Every `L_{E,p}` with `|p| <= max_p`.
pub fn line_bundle_targets(n: usize, max_p: i64) -> Vec<Tag> {
    let mut out = Vec::new();
    for e in MarkingSet::all_subsets(n) {
        for p in -max_p..=max_p {
            if (e.len() as i64 + p).rem_euclid(2) == 0 {
                out.push(Tag::l(e, p));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetReport {
    pub target: String,
    pub nodes: usize,
    pub leaves: usize,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullnessReport {
    pub n: usize,
    pub collection_size: usize,
    pub targets: Vec<TargetReport>,
    pub total_nodes: usize,
}

impl FullnessReport {
    pub fn passed(&self) -> bool {
        self.targets.iter().all(|t| t.passed)
    }
}

/// Certificates for the pushforward targets, plus every `L_{E,p}` with `|p| <= max_p`.
pub fn verify_fullness_with(n: usize, max_p: Option<i64>) -> Result<FullnessReport> {
    let mut targets = pushforward_targets(n)?;
    if let Some(m) = max_p {
        let seen: BTreeSet<Tag> = targets.iter().copied().collect();
        targets.extend(line_bundle_targets(n, m).into_iter().filter(|t| !seen.contains(t)));
    }
    verify_targets(n, &targets)
}

pub fn verify_fullness(n: usize) -> Result<FullnessReport> {
    verify_fullness_with(n, None)
}

pub fn verify_targets(n: usize, targets: &[Tag]) -> Result<FullnessReport> {
    let collection_size = enumerate_collection(n)?.len();
    let mut g = Generator::new(n)?;
    let mut k = KPairing::new(n)?;
    let mut out = Vec::new();
    for target in targets {
        let report = match g.certificate(target) {
            Ok(cert) => {
                let check = verify_with(&cert, &mut k)?;
                TargetReport {
                    target: target.to_string(),
                    nodes: check.nodes,
                    leaves: check.leaves,
                    passed: check.passed(),
                    failures: check
                        .failures
                        .iter()
                        .map(|f| format!("({}) node {:?}: {}", f.check, f.node, f.message))
                        .collect(),
                }
            }
            Err(e) => TargetReport {
                target: target.to_string(),
                nodes: 0,
                leaves: 0,
                passed: false,
                failures: vec![e.to_string()],
            },
        };
        out.push(report);
    }
    Ok(FullnessReport { n, collection_size, targets: out, total_nodes: g.len() })
}

#[cfg(test)]
mod tests;

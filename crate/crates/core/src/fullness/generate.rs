//! The inductions on the score, run as memoized searches that record one node
//! per generated object.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::core_model::{half_index, BundleKind, MarkingSet};
use crate::error::{Error, Result};

use super::{
    fiber_koszul, koszul_terms, quotient_chain, Axis, GenerationCertificate, KoszulKind, Node, Relation, Step, Tag,
    CERTIFICATE_SCHEMA,
};

const MAX_DEPTH: usize = 4096;

/// Shared state of the induction for one `n`.
pub struct Generator {
    n: usize,
    s: i64,
    nodes: Vec<Node>,
    made: HashMap<Tag, usize>,
    active: HashSet<Tag>,
}

impl Generator {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(format!("n >= 2 required, got {n}")));
        }
        crate::collections::enumerate_collection(n)?;
        Ok(Self { n, s: half_index(n) as i64, nodes: Vec::new(), made: HashMap::new(), active: HashSet::new() })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Produces `tag`, returning the node index or `None` for a collection member.
    pub fn obtain(&mut self, tag: &Tag) -> Result<Option<usize>> {
        if tag.n() != self.n {
            return Err(Error::NMismatch(tag.n(), self.n));
        }
        if tag.collection_item().is_some() {
            return Ok(None);
        }
        if let Some(&i) = self.made.get(tag) {
            return Ok(Some(i));
        }
        if self.active.len() > MAX_DEPTH || !self.active.insert(*tag) {
            return Err(Error::Generation(format!("{tag} depends on itself")));
        }
        let result = self.build(tag);
        self.active.remove(tag);
        let step = result?;
        let id = self.nodes.len();
        self.nodes.push(Node { id, target: *tag, step });
        self.made.insert(*tag, id);
        Ok(Some(id))
    }

    fn build(&mut self, tag: &Tag) -> Result<Step> {
        let step = if self.n % 2 == 1 { self.plan_odd(tag)? } else { self.plan_even(tag)? };
        for input in step.inputs(tag) {
            self.obtain(&input)?;
        }
        Ok(step)
    }

    fn first_subset(&self, within: &MarkingSet) -> MarkingSet {
        within.subsets_within(self.s as usize + 1)[0]
    }

    fn plan_odd(&mut self, tag: &Tag) -> Result<Step> {
        let Tag::Line { kind: BundleKind::L, e, p } = *tag else {
            return Err(Error::Generation(format!("{tag} is not an L-tag")));
        };
        if p < 0 {
            return Ok(Step::Relabel { source: Tag::l(e, -p) });
        }
        let s = self.s as usize;
        let step = if e.len() <= s {
            let i = self.first_subset(&e.complement());
            koszul_terms(KoszulKind::OddType1, self.n, &i, (e, p))?
        } else {
            let i = self.first_subset(&e);
            koszul_terms(KoszulKind::OddType2, self.n, &i, (e.difference(&i), p - self.s - 1))?
        };
        Ok(Step::Koszul(step))
    }

    fn chain(&self, rel: Relation, e: MarkingSet, p: i64) -> Result<Step> {
        Ok(Step::Quotient(quotient_chain(self.n, rel, &e, p)?))
    }

    fn plan_even(&mut self, tag: &Tag) -> Result<Step> {
        let s = self.s;
        let n = self.n;
        match *tag {
            Tag::Line { kind, e, p } => {
                let k = e.len() as i64;
                let in_collection = Tag::l(e, p).collection_item().is_some();
                match kind {
                    BundleKind::L => {
                        if p < 0 {
                            Ok(Step::Relabel { source: tag.flipped() })
                        } else if k >= s + 1 {
                            self.chain(Relation::LtoR, e, p)
                        } else {
                            self.chain(Relation::LtoQ, e, p)
                        }
                    }
                    BundleKind::R => {
                        if p < 0 {
                            Ok(Step::Relabel { source: tag.flipped() })
                        } else if s % 2 == 1 && k == s + 1 && p == 0 {
                            Ok(Step::Koszul(koszul_terms(KoszulKind::EvenK2, n, &e, (e, 0))?))
                        } else if in_collection || k < s + 1 {
                            self.chain(Relation::LtoR, e, p)
                        } else {
                            let i = self.first_subset(&e);
                            Ok(Step::Koszul(koszul_terms(KoszulKind::EvenK2, n, &i, (e, p))?))
                        }
                    }
                    BundleKind::Q => {
                        if p < 0 || (s % 2 == 1 && k == s + 1 && p == 0) {
                            Ok(Step::Relabel { source: tag.flipped() })
                        } else if in_collection || k > s + 1 {
                            self.chain(Relation::LtoQ, e, p)
                        } else {
                            let i = self.first_subset(&e.complement());
                            Ok(Step::Koszul(koszul_terms(KoszulKind::EvenK1, n, &i, (e, p))?))
                        }
                    }
                    BundleKind::V => {
                        if p < 0 {
                            Ok(Step::Relabel { source: tag.flipped() })
                        } else if k >= s + 1 {
                            self.chain(Relation::RtoV, e, p)
                        } else {
                            self.chain(Relation::QtoV, e, p)
                        }
                    }
                }
            }
            Tag::Torsion { t, u, v } => {
                let fiber = |axis, top| -> Result<Step> { Ok(Step::Fiber(fiber_koszul(n, &t, axis, top)?)) };
                if (u, v) == (0, 0) {
                    fiber(Axis::Second, (0, 0))
                } else if u > 0 {
                    fiber(if v != 0 { Axis::First } else { Axis::Second }, (u, v))
                } else if v > 0 {
                    fiber(if u != 0 { Axis::Second } else { Axis::First }, (u, v))
                } else if u < -s && v != 0 {
                    fiber(Axis::First, (u + s + 1, v))
                } else if v < -s && u != 0 {
                    fiber(Axis::Second, (u, v + s + 1))
                } else if v == 0 {
                    self.next_torsion(t, -u)
                } else if u == 0 {
                    Ok(Step::Relabel { source: tag.flipped() })
                } else {
                    Err(Error::Generation(format!("{tag} lies in the box but is not a collection member")))
                }
            }
        }
    }

    /// `O_{δ_T}(-a, 0)` outside the collection, introduced in increasing `a`.
    fn next_torsion(&mut self, t: MarkingSet, a: i64) -> Result<Step> {
        let s = self.s;
        for lower in 1..a {
            self.obtain(&Tag::torsion(t, -lower, 0))?;
        }
        let q = a - s / 2;
        if s % 2 == 1 && q == 1 {
            return self.chain(Relation::LtoR, t, 0);
        }
        let p = if s % 2 == 0 { 2 * q - 1 } else { 2 * q - 2 };
        self.chain(Relation::QtoV, t, p)
    }

    /// The sub-DAG producing `target`, renumbered in creation order.
    pub fn certificate(&mut self, target: &Tag) -> Result<GenerationCertificate> {
        self.obtain(target)?;
        let mut keep = BTreeSet::new();
        let mut leaves = BTreeSet::new();
        let mut stack = vec![*target];
        while let Some(tag) = stack.pop() {
            if let Some(item) = tag.collection_item() {
                leaves.insert(item);
                continue;
            }
            let id = self.made[&tag];
            if keep.insert(id) {
                let node = &self.nodes[id];
                stack.extend(node.step.inputs(&node.target));
            }
        }
        let nodes = keep
            .into_iter()
            .enumerate()
            .map(|(new, old)| Node { id: new, ..self.nodes[old].clone() })
            .collect();
        Ok(GenerationCertificate {
            schema: CERTIFICATE_SCHEMA.to_string(),
            n: self.n,
            target: *target,
            nodes,
            leaves: leaves.into_iter().collect(),
        })
    }
}

pub fn generate_odd(n: usize, e: &MarkingSet, p: i64) -> Result<GenerationCertificate> {
    if n % 2 == 0 {
        return Err(Error::NeedsOddN(n));
    }
    if (e.len() as i64 + p).rem_euclid(2) != 0 {
        return Err(Error::Parity { e: e.len(), p });
    }
    Generator::new(n)?.certificate(&Tag::l(*e, p))
}

pub fn generate_even(n: usize, target: &Tag) -> Result<GenerationCertificate> {
    if n % 2 == 1 {
        return Err(Error::NeedsEvenN(n));
    }
    if let Tag::Line { e, p, .. } = target {
        if (e.len() as i64 + p).rem_euclid(2) != 0 {
            return Err(Error::Parity { e: e.len(), p: *p });
        }
    }
    Generator::new(n)?.certificate(target)
}

//! Euler pairings `χ(c, X)` of collection members `c` against arbitrary tags.

use std::collections::HashMap;

use crate::cohomology::proj_product_euler;
use crate::cohomology::toric::chi_zn;
use crate::collections::enumerate_collection;
use crate::core_model::{git_form, BundleKind, half_index, restrict_to_boundary, CollectionItem, GitLineBundle};
use crate::error::{Error, Result};

use super::{Node, Step, Tag};

/// Caches the vector `(χ(c_k, X))_k` over the collection for each tag `X`.
pub struct KPairing {
    n: usize,
    s: usize,
    items: Vec<CollectionItem>,
    bundles: Vec<Option<GitLineBundle>>,
    flip: Vec<usize>,
    cache: HashMap<Tag, Vec<i128>>,
}

impl KPairing {
    pub fn new(n: usize) -> Result<Self> {
        let c = enumerate_collection(n)?;
        let items = c.items.clone();
        let bundles = items
            .iter()
            .map(|it| match it {
                CollectionItem::LineBundle { e, p } => git_form(BundleKind::L, n, e, *p).map(Some),
                CollectionItem::Torsion { .. } => Ok(None),
            })
            .collect::<Result<Vec<_>>>()?;
        let index: HashMap<Tag, usize> = items.iter().enumerate().map(|(i, it)| (Tag::from_item(it), i)).collect();
        let flip = items
            .iter()
            .map(|it| {
                index
                    .get(&Tag::from_item(it).flipped())
                    .copied()
                    .ok_or_else(|| Error::Precondition(format!("collection not flip invariant at {it}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, s: half_index(n), items, bundles, flip, cache: HashMap::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn items(&self) -> &[CollectionItem] {
        &self.items
    }

    fn line(&self, tag: &Tag) -> Result<GitLineBundle> {
        match tag {
            Tag::Line { kind, e, p } => git_form(*kind, self.n, e, *p),
            Tag::Torsion { .. } => unreachable!("line() on a torsion tag"),
        }
    }

    fn compute(&self, tag: &Tag) -> Result<Vec<i128>> {
        let s = self.s;
        let mut out = Vec::with_capacity(self.items.len());
        match *tag {
            Tag::Line { .. } => {
                let x = self.line(tag)?;
                for (it, b) in self.items.iter().zip(&self.bundles) {
                    out.push(match (it, b) {
                        (_, Some(c)) => chi_zn(&x.minus(c))? as i128,
                        (CollectionItem::Torsion { t, a, b }, None) => {
                            let (m1, m2) = restrict_to_boundary(&x, t)?;
                            -proj_product_euler(s, m1 + a - 1, m2 + b - 1)
                        }
                        _ => unreachable!("line bundles carry their linearization"),
                    });
                }
            }
            Tag::Torsion { t, u, v } => {
                if self.n % 2 == 1 {
                    return Err(Error::NeedsEvenN(self.n));
                }
                for (it, b) in self.items.iter().zip(&self.bundles) {
                    out.push(match (it, b) {
                        (_, Some(c)) => {
                            let (l1, l2) = restrict_to_boundary(c, &t)?;
                            proj_product_euler(s, u - l1, v - l2)
                        }
                        (CollectionItem::Torsion { t: t2, a, b }, None) if *t2 == t => {
                            proj_product_euler(s, u + a, v + b) - proj_product_euler(s, u + a - 1, v + b - 1)
                        }
                        _ => 0,
                    });
                }
            }
        }
        Ok(out)
    }

    /// `(χ(c_k, X))_k`.
    pub fn vector(&mut self, tag: &Tag) -> Result<&[i128]> {
        if tag.n() != self.n {
            return Err(Error::NMismatch(tag.n(), self.n));
        }
        if !self.cache.contains_key(tag) {
            let v = self.compute(tag)?;
            self.cache.insert(*tag, v);
        }
        Ok(&self.cache[tag])
    }

    /// `None` if the node is exact in K-theory, otherwise a description.
    pub fn node_defect(&mut self, node: &Node) -> Result<Option<String>> {
        if let Step::Relabel { source } = &node.step {
            let src = self.vector(source)?.to_vec();
            let tgt = self.vector(&node.target)?.to_vec();
            // χ(c, σX) = χ(σc, X) for the involution σ
            let bad = (0..src.len()).find(|&k| tgt[k] != src[self.flip[k]]);
            return Ok(bad.map(|k| format!("relabeling fails against {}", self.items[k])));
        }
        let mut acc = vec![0i128; self.items.len()];
        for term in node.step.terms() {
            let sign = if term.degree % 2 == 0 { 1 } else { -1 };
            let m = sign * term.multiplicity as i128;
            for (a, x) in acc.iter_mut().zip(self.vector(&term.tag)?) {
                *a += m * x;
            }
        }
        Ok(acc
            .iter()
            .position(|x| *x != 0)
            .map(|k| format!("alternating sum pairs to {} with {}", acc[k], self.items[k])))
    }
}

//! Kempf–Ness strata of the unstable locus and window membership of the
//! collection's line bundles.
//!
//! `λ(z) = z` fixes `Z_I` (markings in `I` at `∞`, the rest at `0`), where
//! `O(j̄) ⊗ z^p` has weight `A_I = -Σ_I j + Σ_{I^c} j + p`. The stratum `S'_I` is
//! destabilized by `λ' = λ⁻¹` at the same fixed point, so its weight is `-A_I`.
//! On `E_T`, `O(E_T)` has `λ`-weight `+2` on `Z⁺_T` and `λ'`-weight `+2` on `Z⁻_T`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collections::enumerate_collection;
use crate::core_model::{git_form_of_l, half_index, GitLineBundle, MarkingSet};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StratumKind {
    S,
    SPrime,
    SPlus,
    SMinus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub kind: StratumKind,
    pub index: MarkingSet,
    pub eta: i64,
    /// Left end of the window chosen in the source.
    pub printed_anchor: i64,
}

impl Stratum {
    pub fn label(&self) -> String {
        let k = match self.kind {
            StratumKind::S => "S",
            StratumKind::SPrime => "S'",
            StratumKind::SPlus => "S+",
            StratumKind::SMinus => "S-",
        };
        format!("{k}_{}", self.index)
    }
}

fn anchors(n: usize) -> (i64, i64) {
    let s = half_index(n) as i64;
    if n % 2 == 1 {
        (-2 * s, 0)
    } else if s % 2 == 1 {
        (-(s + 1), -(n as i64))
    } else {
        (-s, -(n as i64) + 2)
    }
}

pub fn build_strata(n: usize) -> Result<Vec<Stratum>> {
    if n < 2 {
        return Err(Error::Precondition(format!("strata need n >= 2, got {n}")));
    }
    let (w, wt) = anchors(n);
    let mut out = Vec::new();
    for i in MarkingSet::all_subsets(n) {
        let k = i.len();
        if 2 * k > n {
            out.push(Stratum { kind: StratumKind::S, index: i, eta: 2 * k as i64, printed_anchor: w });
        }
    }
    for i in MarkingSet::all_subsets(n) {
        let k = i.len();
        if 2 * k < n {
            out.push(Stratum {
                kind: StratumKind::SPrime,
                index: i,
                eta: 2 * (n - k) as i64,
                printed_anchor: w,
            });
        }
    }
    if n % 2 == 0 {
        for t in MarkingSet::half_sets(n) {
            for kind in [StratumKind::SPlus, StratumKind::SMinus] {
                out.push(Stratum { kind, index: t, eta: 2 * n as i64, printed_anchor: wt });
            }
        }
    }
    Ok(out)
}

fn base_weight(b: &GitLineBundle, i: &MarkingSet) -> i64 {
    let mut w = b.character;
    for (k, j) in b.exponents.iter().enumerate() {
        if i.contains(k + 1) {
            w -= j;
        } else {
            w += j;
        }
    }
    w
}

pub fn weight_at(b: &GitLineBundle, st: &Stratum) -> Result<i64> {
    if st.index.n() != b.n {
        return Err(Error::NMismatch(b.n, st.index.n()));
    }
    let a = base_weight(b, &st.index);
    match st.kind {
        StratumKind::S => Ok(a),
        StratumKind::SPrime => Ok(-a),
        StratumKind::SPlus | StratumKind::SMinus => {
            if b.n % 2 == 1 {
                return Err(Error::NeedsEvenN(b.n));
            }
            let alpha = b.exc(&st.index);
            let sign = if st.kind == StratumKind::SPlus { 1 } else { -1 };
            Ok(sign * a + 2 * alpha)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumAudit {
    pub stratum: String,
    pub eta: i64,
    pub printed_anchor: i64,
    pub min: i64,
    pub max: i64,
    /// `max - min <= η - 1`.
    pub window_exists: bool,
    /// All weights lie in `[printed_anchor, printed_anchor + η)`.
    pub anchor_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowAudit {
    pub n: usize,
    pub strata: Vec<StratumAudit>,
}

impl WindowAudit {
    pub fn existence_pass(&self) -> bool {
        self.strata.iter().all(|s| s.window_exists)
    }

    pub fn anchors_pass(&self) -> bool {
        self.strata.iter().all(|s| s.anchor_ok)
    }
}

/// The collection's line bundles in linearized form.
pub fn collection_bundles(n: usize) -> Result<Vec<GitLineBundle>> {
    enumerate_collection(n)?.line_bundles().map(|(e, p)| git_form_of_l(n, &e, p)).collect()
}

pub fn window_audit(n: usize) -> Result<WindowAudit> {
    let bundles = collection_bundles(n)?;
    let strata = build_strata(n)?;
    let audits = strata
        .par_iter()
        .map(|st| {
            let ws = bundles.iter().map(|b| weight_at(b, st)).collect::<Result<Vec<_>>>()?;
            let min = *ws.iter().min().expect("collection has line bundles");
            let max = *ws.iter().max().expect("collection has line bundles");
            Ok(StratumAudit {
                stratum: st.label(),
                eta: st.eta,
                printed_anchor: st.printed_anchor,
                min,
                max,
                window_exists: max - min < st.eta,
                anchor_ok: min >= st.printed_anchor && max < st.printed_anchor + st.eta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WindowAudit { n, strata: audits })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxMinEntry {
    pub index: String,
    pub brute_max: i64,
    pub brute_min: i64,
    pub lemma_max: i64,
    pub lemma_min: i64,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxMinAudit {
    pub n: usize,
    pub entries: Vec<MaxMinEntry>,
}

impl MaxMinAudit {
    pub fn mismatches(&self) -> impl Iterator<Item = &MaxMinEntry> {
        self.entries.iter().filter(|e| !e.agrees)
    }
}

/// Brute-force extremes of `|E∩I| - |E∩I^c| + p` against the closed forms.
pub fn maxmin_audit(n: usize) -> Result<MaxMinAudit> {
    if n % 2 == 1 || n < 2 {
        return Err(Error::NeedsEvenN(n));
    }
    let s = half_index(n) as i64;
    let m = (n / 4) as i64;
    let pairs: Vec<(MarkingSet, i64)> = enumerate_collection(n)?.line_bundles().collect();
    let value = |i: &MarkingSet, e: &MarkingSet, p: i64| {
        let inside = e.intersection(i).len() as i64;
        inside - (e.len() as i64 - inside) + p
    };
    let mut entries = Vec::new();
    for i in MarkingSet::all_subsets(n) {
        let k = i.len() as i64;
        let (lmax, lmin) = if k > s + 1 {
            if s % 2 == 1 {
                (2 * k - (s + 3), -(s + 1))
            } else {
                (2 * k - (s + 2), -s)
            }
        } else if k == s + 1 {
            (2 * m, -2 * m)
        } else {
            continue;
        };
        let vals: Vec<i64> = pairs.iter().map(|(e, p)| value(&i, e, *p)).collect();
        let bmax = *vals.iter().max().expect("nonempty");
        let bmin = *vals.iter().min().expect("nonempty");
        entries.push(MaxMinEntry {
            index: i.to_string(),
            brute_max: bmax,
            brute_min: bmin,
            lemma_max: lmax,
            lemma_min: lmin,
            agrees: bmax == lmax && bmin == lmin,
        });
    }
    Ok(MaxMinAudit { n, entries })
}

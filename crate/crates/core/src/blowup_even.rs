//! Line bundles on the blow-up `W_n` of `(P¹)ⁿ` at the points `p_T` (even `n`):
//! descent, cohomology of the exceptional restrictions and the peeling argument.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cohomology::{binom, euler_weight, kunneth};
use crate::core_model::{half_index, GitLineBundle, MarkingSet};
use crate::error::{Error, Result};

/// Fiber weight of `O(j̄) ⊗ z^p` at the fixed point with `I` at `∞`.
pub fn fixed_point_weight(b: &GitLineBundle, i: &MarkingSet) -> i64 {
    b.exponents
        .iter()
        .enumerate()
        .map(|(k, j)| if i.contains(k + 1) { -j } else { *j })
        .sum::<i64>()
        + b.character
}

/// Kempf descent to the quotient. For odd `n` only the parity conditions apply
/// and exceptional coefficients are not allowed.
pub fn descends(b: &GitLineBundle) -> bool {
    let n = b.n;
    if n % 2 == 1 && !b.exc_coeffs.is_empty() {
        return false;
    }
    MarkingSet::all_subsets(n).iter().all(|i| {
        let a = fixed_point_weight(b, i);
        if 2 * i.len() == n {
            (a + 2 * b.exc(i)).rem_euclid(4) == 0 && (a - 2 * b.exc(i)).rem_euclid(4) == 0
        } else {
            a.rem_euclid(2) == 0
        }
    })
}

/// Weights of `RΓ(O(-iE_T)|_{E_T})`, all in degree 0.
pub fn exc_restriction_series(n: usize, i: usize) -> Result<BTreeMap<i64, u64>> {
    if n % 2 == 1 || n < 2 {
        return Err(Error::NeedsEvenN(n));
    }
    let s = half_index(n) as u128;
    let mut out = BTreeMap::new();
    for a in 0..=i {
        let b = i - a;
        let m = binom(a as u128 + s, s) * binom(b as u128 + s, s);
        out.insert(2 * a as i64 - 2 * b as i64, m as u64);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeelingStep {
    pub t: MarkingSet,
    pub i: usize,
    pub piece_weights: BTreeMap<i64, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    CertifiedZero,
    IdentityScalar,
    /// A nonzero target-weight contribution: the cohomological degrees where the
    /// base part has it, or the nonzero Euler characteristic of the target part.
    NonzeroWitness { weight: i64, degrees: Vec<usize>, euler: i64 },
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingVerdict {
    pub outcome: Outcome,
    /// Exponent vector of the base part on `(P¹)ⁿ`.
    pub base_exponents: Vec<i64>,
    /// Degrees in which the base part has the target weight.
    pub base_hits: Vec<usize>,
    pub trace: Vec<PeelingStep>,
}

fn check_pair(l1: &GitLineBundle, l2: &GitLineBundle) -> Result<GitLineBundle> {
    if l1.n != l2.n {
        return Err(Error::NMismatch(l1.n, l2.n));
    }
    if l1.n % 2 == 1 {
        return Err(Error::NeedsEvenN(l1.n));
    }
    for b in [l1, l2] {
        if !descends(b) {
            return Err(Error::NoDescent(b.to_string()));
        }
    }
    Ok(l2.minus(l1))
}

fn peel(d: &GitLineBundle) -> Result<Vec<PeelingStep>> {
    let bound = d.n as i64 - 2;
    if let Some(c) = d.exc_coeffs.values().find(|c| c.abs() > bound) {
        return Err(Error::AbsorptionBound { coeff: *c, n: d.n });
    }
    let mut steps = Vec::new();
    // exc_coeffs iterates in lexicographic order of T
    for (t, c) in &d.exc_coeffs {
        if *c >= 0 {
            continue;
        }
        let fiber = fixed_point_weight(d, t);
        for i in 0..(-c) as usize {
            let piece_weights =
                exc_restriction_series(d.n, i)?.into_iter().map(|(w, m)| (w + fiber, m)).collect();
            steps.push(PeelingStep { t: *t, i, piece_weights });
        }
    }
    Ok(steps)
}

/// Verdict and target-weight Euler characteristic for `RΓ(W_n, D)`, where `D`
/// is a difference of two descending bundles; `identical` marks `L1 = L2`.
pub(crate) fn analyze_difference(
    d: &GitLineBundle,
    identical: bool,
    target: i64,
) -> Result<(VanishingVerdict, i64)> {
    let trace = peel(d)?;
    let euler = euler_from_parts(d, &trace, target);
    let base = kunneth(&d.exponents);
    let base_hits = base.degrees_with_weight(target - d.character);
    let outcome = if identical && target == 0 {
        Outcome::IdentityScalar
    } else {
        let piece_hit = trace.iter().any(|st| st.piece_weights.contains_key(&target));
        if base_hits.is_empty() && !piece_hit {
            Outcome::CertifiedZero
        } else if trace.is_empty() || euler != 0 {
            Outcome::NonzeroWitness { weight: target, degrees: base_hits.clone(), euler }
        } else {
            Outcome::Indeterminate
        }
    };
    let verdict = VanishingVerdict { outcome, base_exponents: d.exponents.clone(), base_hits, trace };
    Ok((verdict, euler))
}

/// Target-weight part of `RΓ(W_n, L1^∨ ⊗ L2)`.
pub fn peel_vanishing(l1: &GitLineBundle, l2: &GitLineBundle, target: i64) -> Result<VanishingVerdict> {
    let d = check_pair(l1, l2)?;
    Ok(analyze_difference(&d, l1 == l2, target)?.0)
}

fn euler_from_parts(d: &GitLineBundle, trace: &[PeelingStep], target: i64) -> i64 {
    let base = euler_weight(&d.exponents, target - d.character);
    let pieces: i64 = trace.iter().map(|st| st.piece_weights.get(&target).copied().unwrap_or(0) as i64).sum();
    base - pieces
}

/// Equivariant Euler characteristic of the target-weight part of
/// `RΓ(W_n, L1^∨ ⊗ L2)`, from the base part and the peeled pieces.
pub fn peel_euler(l1: &GitLineBundle, l2: &GitLineBundle, target: i64) -> Result<i64> {
    let d = check_pair(l1, l2)?;
    let trace = peel(&d)?;
    Ok(euler_from_parts(&d, &trace, target))
}

/// Whether none of `±α ± α'` lies in `[-(β-1), β-1]`, `β = α - α'`.
pub fn interval_claim(alpha: i64, alpha_prime: i64) -> Result<bool> {
    if alpha > 0 || alpha_prime > 0 || alpha <= alpha_prime {
        return Err(Error::Precondition(format!(
            "need 0 >= alpha > alpha_prime, got ({alpha}, {alpha_prime})"
        )));
    }
    let beta = alpha - alpha_prime;
    let vals = [alpha + alpha_prime, alpha - alpha_prime, -alpha + alpha_prime, -alpha - alpha_prime];
    Ok(vals.iter().all(|v| v.abs() > beta - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_model::git_form_of_l;

    fn l(n: usize, e: &[usize], p: i64) -> GitLineBundle {
        git_form_of_l(n, &MarkingSet::new(n, e).unwrap(), p).unwrap()
    }

    #[test]
    fn descent_examples() {
        assert!(descends(&l(4, &[1, 2], 0)));
        assert!(descends(&GitLineBundle::trivial(4)));
        let mut b = GitLineBundle::trivial(4);
        b.exponents[0] = -1;
        b.character = 0;
        assert!(!descends(&b));
    }

    #[test]
    fn series_examples() {
        assert_eq!(exc_restriction_series(4, 0).unwrap(), BTreeMap::from([(0, 1)]));
        assert_eq!(exc_restriction_series(4, 1).unwrap(), BTreeMap::from([(-2, 2), (2, 2)]));
        assert_eq!(exc_restriction_series(4, 2).unwrap(), BTreeMap::from([(-4, 3), (0, 4), (4, 3)]));
        assert!(exc_restriction_series(5, 1).is_err());
    }

    #[test]
    fn peel_examples() {
        let a = l(4, &[1, 2], 0);
        assert_eq!(peel_vanishing(&a, &a, 0).unwrap().outcome, Outcome::IdentityScalar);
        let b = l(4, &[1, 3], 0);
        let v = peel_vanishing(&a, &b, 0).unwrap();
        assert_eq!(v.outcome, Outcome::CertifiedZero);
        assert_eq!(v.base_exponents, vec![0, 1, -1, 0]);
        let ts: Vec<(String, usize, Vec<i64>)> = v
            .trace
            .iter()
            .map(|s| (s.t.to_string(), s.i, s.piece_weights.keys().copied().collect()))
            .collect();
        assert_eq!(
            ts,
            vec![("{1,3}".to_string(), 0, vec![2]), ("{2,4}".to_string(), 0, vec![-2])]
        );
    }

    #[test]
    fn absorption_bound_enforced() {
        let mut b = GitLineBundle::trivial(4);
        b.set_exc(MarkingSet::new(4, &[1, 2]).unwrap(), 4);
        b.set_exc(MarkingSet::new(4, &[3, 4]).unwrap(), 4);
        assert!(descends(&b));
        assert!(matches!(
            peel_vanishing(&GitLineBundle::trivial(4), &b, 0),
            Err(Error::AbsorptionBound { .. })
        ));
    }

    #[test]
    fn interval_examples() {
        assert!(interval_claim(-1, -2).unwrap());
        assert!(interval_claim(0, -1).unwrap());
        assert!(interval_claim(-1, -3).unwrap());
        assert!(interval_claim(-1, -1).is_err());
    }

    #[test]
    fn peel_euler_matches_toric_euler() {
        use crate::cohomology::toric::chi_zn;
        use crate::windows::collection_bundles;
        for n in [2usize, 4, 6] {
            let bs = collection_bundles(n).unwrap();
            for a in &bs {
                for b in &bs {
                    let chi = chi_zn(&b.minus(a)).unwrap();
                    assert_eq!(peel_euler(a, b, 0).unwrap(), chi, "n={n} {a} {b}");
                }
            }
        }
    }
}

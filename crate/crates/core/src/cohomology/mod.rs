//! Weight-graded cohomology of linearized line bundles on `(P¹)ⁿ`, cohomology of
//! `O(d)` on projective spaces, and Euler characteristics on the quotients `Z_n`.
//!
//! Weight conventions: on `P¹` the sections `x`, `y` of `O(1)` have weights
//! `-1`, `+1`.

pub mod toric;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Per cohomological degree, a finitely supported map weight → multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedWeightSeries {
    pub degrees: BTreeMap<usize, BTreeMap<i64, u64>>,
}

impl GradedWeightSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.values().all(|m| m.values().all(|&c| c == 0))
    }

    fn insert(&mut self, d: usize, w: i64, k: u64) {
        if k == 0 {
            return;
        }
        *self.degrees.entry(d).or_default().entry(w).or_insert(0) += k;
    }

    /// Multiplicity of weight `w` in degree `d`.
    pub fn get(&self, d: usize, w: i64) -> u64 {
        self.degrees.get(&d).and_then(|m| m.get(&w)).copied().unwrap_or(0)
    }

    /// Total multiplicity of weight `w` over all degrees.
    pub fn weight_total(&self, w: i64) -> u64 {
        self.degrees.values().filter_map(|m| m.get(&w)).sum()
    }

    pub fn total(&self) -> u64 {
        self.degrees.values().flat_map(|m| m.values()).sum()
    }

    /// Degrees in which weight `w` occurs.
    pub fn degrees_with_weight(&self, w: i64) -> Vec<usize> {
        self.degrees
            .iter()
            .filter(|(_, m)| m.get(&w).copied().unwrap_or(0) > 0)
            .map(|(d, _)| *d)
            .collect()
    }

    /// Künneth product: degrees add, weights add, multiplicities multiply.
    pub fn convolve(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (d1, m1) in &self.degrees {
            for (d2, m2) in &o.degrees {
                for (w1, c1) in m1 {
                    for (w2, c2) in m2 {
                        out.insert(d1 + d2, w1 + w2, c1 * c2);
                    }
                }
            }
        }
        out
    }

    /// `Σ_d (-1)^d` times the degree-d weight map.
    pub fn euler(&self) -> BTreeMap<i64, i64> {
        let mut out = BTreeMap::new();
        for (d, m) in &self.degrees {
            let sign = if d % 2 == 0 { 1 } else { -1 };
            for (w, c) in m {
                *out.entry(*w).or_insert(0) += sign * *c as i64;
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    fn unit() -> Self {
        let mut s = Self::zero();
        s.insert(0, 0, 1);
        s
    }
}

/// Equivariant cohomology of `O(j)` on `P¹`.
pub fn p1_cohomology(j: i64) -> GradedWeightSeries {
    let mut s = GradedWeightSeries::zero();
    if j >= 0 {
        for a in 0..=j {
            s.insert(0, j - 2 * a, 1);
        }
    } else if j <= -2 {
        let mut w = j + 2;
        while w <= -j - 2 {
            s.insert(1, w, 1);
            w += 2;
        }
    }
    s
}

/// Künneth product over the factors of `(P¹)ⁿ`.
pub fn kunneth(js: &[i64]) -> GradedWeightSeries {
    if js.contains(&-1) {
        return GradedWeightSeries::zero();
    }
    js.iter().fold(GradedWeightSeries::unit(), |acc, &j| acc.convolve(&p1_cohomology(j)))
}

/// Alternating sum of the Künneth degrees as a signed weight map.
pub fn euler_series(js: &[i64]) -> BTreeMap<i64, i64> {
    let mut acc: BTreeMap<i64, i64> = BTreeMap::from([(0, 1)]);
    for &j in js {
        let f = p1_euler(j);
        if f.is_empty() {
            return BTreeMap::new();
        }
        let mut next = BTreeMap::new();
        for (w1, c1) in &acc {
            for (w2, c2) in &f {
                *next.entry(w1 + w2).or_insert(0) += c1 * c2;
            }
        }
        next.retain(|_, v: &mut i64| *v != 0);
        acc = next;
    }
    acc
}

fn p1_euler(j: i64) -> Vec<(i64, i64)> {
    if j >= 0 {
        (0..=j).map(|a| (j - 2 * a, 1)).collect()
    } else if j == -1 {
        Vec::new()
    } else {
        let mut v = Vec::new();
        let mut w = j + 2;
        while w <= -j - 2 {
            v.push((w, -1));
            w += 2;
        }
        v
    }
}

/// Coefficient of weight `w` in `euler_series(js)`, without building the full map.
pub fn euler_weight(js: &[i64], w: i64) -> i64 {
    euler_series(js).get(&w).copied().unwrap_or(0)
}

/// Nonzero cohomology of `O(d)` on `P^m`: `Some((degree, dimension))` or `None`.
pub fn proj_cohomology(m: usize, d: i64) -> Option<(usize, u128)> {
    let mi = m as i64;
    if d >= 0 {
        Some((0, binom((d + mi) as u128, m as u128)))
    } else if d >= -mi {
        None
    } else {
        Some((m, binom((-d - 1) as u128, m as u128)))
    }
}

/// Cohomology of `O(a,b)` on `P^m × P^m`: `Some((degree, dimension))` or `None`.
pub fn proj_product_cohomology(m: usize, a: i64, b: i64) -> Option<(usize, u128)> {
    let (da, xa) = proj_cohomology(m, a)?;
    let (db, xb) = proj_cohomology(m, b)?;
    Some((da + db, xa * xb))
}

/// `χ(P^m, O(d))` as the polynomial `C(d+m, m)`, valid for all `d`.
pub fn proj_euler(m: usize, d: i64) -> i128 {
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for k in 1..=m as i128 {
        num *= d as i128 + k;
        den *= k;
    }
    num / den
}

/// `χ(P^m × P^m, O(a,b))`.
pub fn proj_product_euler(m: usize, a: i64, b: i64) -> i128 {
    proj_euler(m, a) * proj_euler(m, b)
}

pub(crate) fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

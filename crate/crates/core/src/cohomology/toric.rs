//! Euler characteristics of line bundles on smooth complete toric varieties,
//! applied to `Z_n`.
//!
//! For a smooth complete fan, `χ(O(D))` is the value at the identity of
//! `Σ_σ t^{m_σ} / Π_i (1 - t^{m_{σ,i}})`, where `m_{σ,i}` is the dual basis of the
//! rays of the maximal cone `σ` and `<m_σ, u_ρ> = -d_ρ`. We restrict to a generic
//! one-parameter subgroup and take the constant term of the Laurent expansion at
//! `τ = e^h`. All arithmetic is modulo the Mersenne prime `2^61 - 1`.
//!
//! `Z_n` is the toric variety with fan in `Zⁿ / Z(1,…,1)`: rays `+e_i` (`δ_{i0}`),
//! `-e_i` (`δ_{i∞}`) and, for even n, `Σ_{i∉T} e_i` (`δ_T`).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::core_model::{boundary_expansion, half_index, GitLineBundle, MarkingSet};
use crate::error::Result;

const P: u64 = (1u64 << 61) - 1;

fn md(x: i128) -> u64 {
    x.rem_euclid(P as i128) as u64
}

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn add(a: u64, b: u64) -> u64 {
    (a + b) % P
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    assert!(a % P != 0, "inverse of zero");
    pow(a, P - 2)
}

fn lift(x: u64) -> i64 {
    if x > P / 2 {
        -((P - x) as i64)
    } else {
        x as i64
    }
}

/// A smooth complete fan given by its rays and maximal cones.
#[derive(Clone, Debug)]
pub struct SmoothFan {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

struct ConeData {
    rays: Vec<usize>,
    /// `<m_{σ,i}, c>` for the generic cocharacter `c`.
    b: Vec<i64>,
    /// `w_j`, `j = 0..=dim`: contribution `Σ_j w_j a^j` with `a = <m_σ, c>`.
    w: Vec<u64>,
}

/// Precomputed localization data for `χ` on a fixed fan.
pub struct EulerEngine {
    dim: usize,
    n_rays: usize,
    cones: Vec<ConeData>,
}

/// Integer inverse of a unimodular matrix (rows), or `None` if not unimodular.
pub fn unimodular_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let d = m.len();
    let mut a: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let mut inv: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| (i == j) as i64 as f64).collect()).collect();
    for col in 0..d {
        let piv = (col..d).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for k in 0..d {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for r in 0..d {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for k in 0..d {
                        a[r][k] -= f * a[col][k];
                        inv[r][k] -= f * inv[col][k];
                    }
                }
            }
        }
    }
    let out: Vec<Vec<i64>> = inv.iter().map(|r| r.iter().map(|x| x.round() as i64).collect()).collect();
    for i in 0..d {
        for j in 0..d {
            let s: i64 = (0..d).map(|k| m[i][k] * out[k][j]).sum();
            if s != (i == j) as i64 {
                return None;
            }
        }
    }
    Some(out)
}

impl SmoothFan {
    /// Checks that every maximal cone is unimodular.
    pub fn is_smooth(&self) -> bool {
        self.cones.iter().all(|c| {
            c.len() == self.dim && unimodular_inverse(&self.cone_matrix(c)).is_some()
        })
    }

    fn cone_matrix(&self, cone: &[usize]) -> Vec<Vec<i64>> {
        // rows = rays
        cone.iter().map(|&r| self.rays[r].clone()).collect()
    }

    pub fn engine(&self) -> EulerEngine {
        let d = self.dim;
        // dual bases
        let duals: Vec<Vec<Vec<i64>>> = self
            .cones
            .iter()
            .map(|c| {
                let u = self.cone_matrix(c);
                // rows of u are rays; dual basis m_i with <m_i, u_j> = δ_ij are the
                // columns of u^{-1}.
                let ui = unimodular_inverse(&u).expect("cone is not unimodular");
                (0..d).map(|i| (0..d).map(|k| ui[k][i]).collect()).collect()
            })
            .collect();
        let c = generic_cocharacter(d, &duals);
        let todd = todd_coeffs(d);
        let fact_inv: Vec<u64> = (0..=d).map(|j| inv(md((1..=j as i128).product()))).collect();
        let cones = self
            .cones
            .iter()
            .zip(&duals)
            .map(|(cone, ms)| {
                let b: Vec<i64> =
                    ms.iter().map(|m| m.iter().zip(&c).map(|(x, y)| x * y).sum()).collect();
                // P(h) = Π_i f(b_i h), truncated at degree d
                let mut poly = vec![0u64; d + 1];
                poly[0] = 1;
                for &bi in &b {
                    let bm = md(bi as i128);
                    let series: Vec<u64> = (0..=d).map(|k| mul(todd[k], pow(bm, k as u64))).collect();
                    let mut next = vec![0u64; d + 1];
                    for (i, &pi) in poly.iter().enumerate() {
                        if pi == 0 {
                            continue;
                        }
                        for k in 0..=d - i {
                            next[i + k] = add(next[i + k], mul(pi, series[k]));
                        }
                    }
                    poly = next;
                }
                let prod_b = b.iter().fold(1u64, |acc, &x| mul(acc, md(x as i128)));
                let mut pref = inv(prod_b);
                if d % 2 == 1 {
                    pref = (P - pref) % P;
                }
                let w: Vec<u64> =
                    (0..=d).map(|j| mul(mul(pref, poly[d - j]), fact_inv[j])).collect();
                ConeData { rays: cone.clone(), b, w }
            })
            .collect();
        EulerEngine { dim: d, n_rays: self.rays.len(), cones }
    }
}

fn generic_cocharacter(d: usize, duals: &[Vec<Vec<i64>>]) -> Vec<i64> {
    for base in [7i64, 11, 13, 17, 19, 23, 29, 31] {
        let c: Vec<i64> = (0..d).map(|k| base.pow(k as u32) + k as i64).collect();
        let ok = duals
            .iter()
            .all(|ms| ms.iter().all(|m| m.iter().zip(&c).map(|(x, y)| x * y).sum::<i64>() != 0));
        if ok {
            return c;
        }
    }
    panic!("no generic cocharacter found");
}

/// Coefficients of `x/(e^x - 1)` modulo `P`, degrees `0..=d`.
fn todd_coeffs(d: usize) -> Vec<u64> {
    // g(x) = (e^x - 1)/x = Σ x^k/(k+1)!
    let g: Vec<u64> = (0..=d).map(|k| inv(md((1..=(k as i128 + 1)).product()))).collect();
    let mut f = vec![0u64; d + 1];
    f[0] = 1;
    for k in 1..=d {
        let mut s = 0u64;
        for i in 1..=k {
            s = add(s, mul(g[i], f[k - i]));
        }
        f[k] = (P - s) % P;
    }
    f
}

impl EulerEngine {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `χ(O(Σ d_ρ D_ρ))`.
    pub fn chi(&self, d: &[i64]) -> i64 {
        assert_eq!(d.len(), self.n_rays);
        let mut total = 0u64;
        for c in &self.cones {
            let a: i128 = -c.rays.iter().zip(&c.b).map(|(&r, &b)| d[r] as i128 * b as i128).sum::<i128>();
            let am = md(a);
            let mut apow = 1u64;
            let mut s = 0u64;
            for &wj in &c.w {
                s = add(s, mul(wj, apow));
                apow = mul(apow, am);
            }
            total = add(total, s);
        }
        lift(total)
    }
}

/// The fan of `Z_n`. Ray order: `δ_{i0}` (i=1..n), `δ_{i∞}` (i=1..n), then `δ_T`
/// in the order of `MarkingSet::half_sets(n)`.
pub fn zn_fan(n: usize) -> SmoothFan {
    assert!(n >= 2);
    let d = n - 1;
    let ebar = |i: usize| -> Vec<i64> {
        if i < n {
            (1..n).map(|k| (k == i) as i64).collect()
        } else {
            vec![-1; d]
        }
    };
    let mut rays = Vec::new();
    for i in 1..=n {
        rays.push(ebar(i));
    }
    for i in 1..=n {
        rays.push(ebar(i).iter().map(|x| -x).collect());
    }
    let s = half_index(n);
    let mut cones = Vec::new();
    let full = MarkingSet::full(n);
    if n % 2 == 1 {
        for k in 1..=n {
            let rest = full.difference(&MarkingSet::new(n, &[k]).unwrap());
            for plus in rest.subsets_within(s) {
                let minus = rest.difference(&plus);
                let mut c: Vec<usize> = plus.iter().map(|i| i - 1).collect();
                c.extend(minus.iter().map(|i| n + i - 1));
                cones.push(c);
            }
        }
    } else {
        for (ti, t) in MarkingSet::half_sets(n).iter().enumerate() {
            let tc = t.complement();
            let mut v = vec![0i64; d];
            for i in tc.iter() {
                for (k, x) in ebar(i).iter().enumerate() {
                    v[k] += x;
                }
            }
            rays.push(v);
            for k in tc.iter() {
                for l in t.iter() {
                    let mut c = vec![2 * n + ti];
                    c.extend(tc.iter().filter(|&i| i != k).map(|i| i - 1));
                    c.extend(t.iter().filter(|&i| i != l).map(|i| n + i - 1));
                    cones.push(c);
                }
            }
        }
    }
    SmoothFan { dim: d, rays, cones }
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<EulerEngine>>> {
    static C: OnceLock<Mutex<HashMap<usize, Arc<EulerEngine>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared engine for `Z_n`.
pub fn zn_engine(n: usize) -> Arc<EulerEngine> {
    if let Some(e) = cache().lock().unwrap().get(&n) {
        return e.clone();
    }
    let e = Arc::new(zn_fan(n).engine());
    cache().lock().unwrap().entry(n).or_insert(e).clone()
}

/// Boundary-divisor coefficient vector of a descending bundle, in `zn_fan` ray order.
pub fn zn_divisor(b: &GitLineBundle) -> Result<Vec<i64>> {
    let ex = boundary_expansion(b)?;
    let mut d = ex.d0;
    d.extend(ex.dinf);
    d.extend(ex.dt);
    Ok(d)
}

/// `χ(Z_n, L)` for the descent `L` of a linearized bundle.
pub fn chi_zn(b: &GitLineBundle) -> Result<i64> {
    let d = zn_divisor(b)?;
    Ok(zn_engine(b.n).chi(&d))
}

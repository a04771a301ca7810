//! Free cochain complexes computing the integral cohomology of the
//! polycyclic cusp stabilizer: the Koszul complex of the commuting
//! translation operators, then one mapping cone per unit generator.
//!
//! The chain map a unit induces on the Koszul complex is built from a
//! telescoping expression of each T_j − 1 in terms of the conjugated
//! generators: its exterior blocks are operator-entry minors which collapse
//! to the exterior powers of the transposed inverse conjugation matrix when
//! the coefficients are scalar. Chain-map identities and d² = 0 are checked
//! exactly at every stage.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::linalg::{self, IMat};

use super::rep::{int_matrix_pow, LatticeRep};
use super::IntegralError;

/// A finite free cochain complex over Z with a fiber-degree marking on
/// every basis element.
#[derive(Debug, Clone)]
pub struct IntComplex {
    pub dims: Vec<usize>,
    /// differentials[q]: dims[q+1] × dims[q]
    pub differentials: Vec<IMat>,
    pub fiber_degrees: Vec<Vec<usize>>,
}

impl IntComplex {
    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(q, &d)| if q % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    fn check_d_squared(&self) -> Result<(), IntegralError> {
        for q in 0..self.differentials.len().saturating_sub(1) {
            let prod = linalg::mat_mul(&self.differentials[q + 1], &self.differentials[q]);
            if !linalg::is_zero_mat(&prod) {
                return Err(IntegralError::ConeMapIncompatible(format!(
                    "d^2 != 0 out of degree {q}"
                )));
            }
        }
        Ok(())
    }
}

fn subsets_by_degree(d: usize) -> Vec<Vec<u32>> {
    let mut by_deg: Vec<Vec<u32>> = vec![Vec::new(); d + 1];
    for mask in 0..(1u32 << d) {
        by_deg[mask.count_ones() as usize].push(mask);
    }
    by_deg
}

fn subset_sign(mask: u32, i: usize) -> i64 {
    if (mask & ((1 << i) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Koszul complex of the commuting operators (T_i − 1) on the coefficient
/// lattice, plus the chain map each unit generator induces on it.
fn koszul_with_unit_maps(rep: &LatticeRep) -> Result<(IntComplex, Vec<Vec<IMat>>), IntegralError> {
    let d = rep.dim_fiber();
    let r_coef = rep.rank;
    let by_deg = subsets_by_degree(d);
    let pos_in_degree = |mask: u32| -> usize {
        let q = mask.count_ones() as usize;
        by_deg[q].binary_search(&mask).expect("mask enumerated")
    };
    let dims: Vec<usize> = by_deg.iter().map(|s| s.len() * r_coef).collect();
    let t_minus_one: Vec<IMat> = rep
        .fiber_gens
        .iter()
        .map(|t| linalg::mat_sub(t, &linalg::identity(r_coef)))
        .collect();
    let mut differentials = Vec::with_capacity(d);
    for q in 0..d {
        let mut m = linalg::zeros(dims[q + 1], dims[q]);
        for (sp, &mask) in by_deg[q].iter().enumerate() {
            for i in 0..d {
                if mask >> i & 1 == 1 {
                    continue;
                }
                let target = mask | 1 << i;
                let tp = pos_in_degree(target);
                let sign = subset_sign(mask, i);
                for a in 0..r_coef {
                    for b in 0..r_coef {
                        if t_minus_one[i][a][b].is_zero() {
                            continue;
                        }
                        let v = if sign > 0 {
                            t_minus_one[i][a][b].clone()
                        } else {
                            -t_minus_one[i][a][b].clone()
                        };
                        m[tp * r_coef + a][sp * r_coef + b] += v;
                    }
                }
            }
        }
        differentials.push(m);
    }
    let fiber_degrees: Vec<Vec<usize>> = by_deg
        .iter()
        .enumerate()
        .map(|(q, masks)| vec![q; masks.len() * r_coef])
        .collect();
    let complex = IntComplex { dims, differentials, fiber_degrees };
    complex.check_d_squared()?;

    // one chain map per unit generator
    let mut maps = Vec::with_capacity(rep.base_gens.len());
    for a in 0..rep.base_gens.len() {
        let coeffs = telescoping_coefficients(rep, a)?;
        let u = &rep.base_gens[a];
        let mut per_degree = Vec::with_capacity(d + 1);
        for masks in &by_deg {
            let n = masks.len() * r_coef;
            let mut f = linalg::zeros(n, n);
            for (sp, &smask) in masks.iter().enumerate() {
                let scols: Vec<usize> = (0..d).filter(|&i| smask >> i & 1 == 1).collect();
                for (tp, &tmask) in masks.iter().enumerate() {
                    let trows: Vec<usize> = (0..d).filter(|&i| tmask >> i & 1 == 1).collect();
                    let minor = operator_minor(&coeffs, &trows, &scols, r_coef);
                    if linalg::is_zero_mat(&minor) {
                        continue;
                    }
                    let block = linalg::mat_mul(&minor, u);
                    for x in 0..r_coef {
                        for y in 0..r_coef {
                            if !block[x][y].is_zero() {
                                f[tp * r_coef + x][sp * r_coef + y] = block[x][y].clone();
                            }
                        }
                    }
                }
            }
            per_degree.push(f);
        }
        maps.push(per_degree);
    }
    Ok((complex, maps))
}

/// Operator matrix C with T_j − 1 = Σ_i C[j][i] (U T_i U^{-1} − 1):
/// telescoping through the inverse conjugation exponents. For scalar
/// coefficient lattices this is the transpose-inverse of the conjugation
/// matrix, entry by entry.
fn telescoping_coefficients(rep: &LatticeRep, a: usize) -> Result<Vec<Vec<IMat>>, IntegralError> {
    let d = rep.dim_fiber();
    let r = rep.rank;
    let u = &rep.base_gens[a];
    let uinv = linalg::unimodular_inverse(u);
    let conj: Vec<IMat> = rep
        .fiber_gens
        .iter()
        .map(|t| linalg::mat_mul(&linalg::mat_mul(u, t), &uinv))
        .collect();
    let cinv = linalg::unimodular_inverse(&rep.conj_data[a]);
    let mut out = vec![vec![linalg::zeros(r, r); d]; d];
    for j in 0..d {
        // exponents of phi^{-1}(b_j) in the translation basis
        let exps: Vec<BigInt> = (0..d).map(|i| cinv[i][j].clone()).collect();
        let mut prefix = linalg::identity(r);
        for i in 0..d {
            let e = &exps[i];
            if !e.is_zero() {
                let geom = geometric_sum(&conj[i], e);
                out[j][i] = linalg::mat_mul(&prefix, &geom);
                prefix = linalg::mat_mul(&prefix, &int_matrix_pow(&conj[i], e));
            }
        }
    }
    Ok(out)
}

/// S(G, m) with G^m − 1 = (G − 1) S(G, m): the geometric sum for m ≥ 0 and
/// its continuation −G^m S(G, −m) for m < 0.
fn geometric_sum(g: &IMat, m: &BigInt) -> IMat {
    let r = g.len();
    let mut acc = linalg::zeros(r, r);
    if m.is_zero() {
        return acc;
    }
    let steps: u64 = m.abs().try_into().expect("small exponent");
    let mut cur = linalg::identity(r);
    for _ in 0..steps {
        for x in 0..r {
            for y in 0..r {
                let v = cur[x][y].clone();
                acc[x][y] += v;
            }
        }
        cur = linalg::mat_mul(&cur, g);
    }
    if m.is_negative() {
        let gm = int_matrix_pow(g, m);
        let prod = linalg::mat_mul(&gm, &acc);
        prod.iter().map(|row| row.iter().map(|x| -x.clone()).collect()).collect()
    } else {
        acc
    }
}

/// Minor determinant of the operator matrix C over rows/cols index sets,
/// by cofactor expansion; entries commute.
fn operator_minor(coeffs: &[Vec<IMat>], rows: &[usize], cols: &[usize], r: usize) -> IMat {
    assert_eq!(rows.len(), cols.len());
    match rows.len() {
        0 => linalg::identity(r),
        1 => coeffs[rows[0]][cols[0]].clone(),
        _ => {
            let mut acc = linalg::zeros(r, r);
            for (t, &row) in rows.iter().enumerate() {
                let e = &coeffs[row][cols[0]];
                if linalg::is_zero_mat(e) {
                    continue;
                }
                let rest: Vec<usize> = rows.iter().copied().filter(|&x| x != row).collect();
                let sub = operator_minor(coeffs, &rest, &cols[1..], r);
                let term = linalg::mat_mul(e, &sub);
                for x in 0..r {
                    for y in 0..r {
                        let v = if t % 2 == 0 { term[x][y].clone() } else { -term[x][y].clone() };
                        acc[x][y] += v;
                    }
                }
            }
            acc
        }
    }
}

fn is_chain_map(complex: &IntComplex, map: &[IMat]) -> bool {
    for q in 0..complex.differentials.len() {
        let df = linalg::mat_mul(&complex.differentials[q], &map[q]);
        let fd = linalg::mat_mul(&map[q + 1], &complex.differentials[q]);
        if df != fd {
            return false;
        }
    }
    true
}

/// Mapping cone of (F − 1) on a complex: K^q = C^q ⊕ C^{q−1} with
/// d(x, y) = (−dx, (F − 1)x + dy). Remaining unit maps extend diagonally.
fn cone(
    complex: &IntComplex,
    map: &[IMat],
    remaining: &[Vec<IMat>],
) -> Result<(IntComplex, Vec<Vec<IMat>>), IntegralError> {
    if !is_chain_map(complex, map) {
        return Err(IntegralError::ConeMapIncompatible(
            "unit action does not commute with the differential".into(),
        ));
    }
    let top = complex.top_degree();
    let dim = |q: i64| -> usize {
        if q < 0 || q as usize > top {
            0
        } else {
            complex.dims[q as usize]
        }
    };
    let mut dims = Vec::with_capacity(top + 2);
    let mut fiber_degrees = Vec::with_capacity(top + 2);
    for q in 0..=(top as i64 + 1) {
        dims.push(dim(q) + dim(q - 1));
        let mut fd = Vec::with_capacity(dim(q) + dim(q - 1));
        if q as usize <= top {
            fd.extend_from_slice(&complex.fiber_degrees[q as usize]);
        }
        if q >= 1 {
            fd.extend_from_slice(&complex.fiber_degrees[(q - 1) as usize]);
        }
        fiber_degrees.push(fd);
    }
    let mut differentials = Vec::with_capacity(top + 1);
    for q in 0..=(top as i64) {
        let rows = dims[(q + 1) as usize];
        let cols = dims[q as usize];
        let mut m = linalg::zeros(rows, cols);
        let (dq, dqm1) = (dim(q), dim(q - 1));
        let dqp1 = dim(q + 1);
        // top-left: −d_q
        if (q as usize) < complex.differentials.len() {
            let dmat = &complex.differentials[q as usize];
            for i in 0..dqp1 {
                for j in 0..dq {
                    if !dmat[i][j].is_zero() {
                        m[i][j] = -dmat[i][j].clone();
                    }
                }
            }
        }
        // bottom-left: F_q − 1
        let f = &map[q as usize];
        for i in 0..dq {
            for j in 0..dq {
                let mut v = f[i][j].clone();
                if i == j {
                    v -= BigInt::one();
                }
                if !v.is_zero() {
                    m[dqp1 + i][j] = v;
                }
            }
        }
        // bottom-right: d_{q−1}
        if q >= 1 {
            let dmat = &complex.differentials[(q - 1) as usize];
            for i in 0..dq {
                for j in 0..dqm1 {
                    if !dmat[i][j].is_zero() {
                        m[dqp1 + i][dq + j] = dmat[i][j].clone();
                    }
                }
            }
        }
        differentials.push(m);
    }
    let coned = IntComplex { dims, differentials, fiber_degrees };
    coned.check_d_squared()?;
    let mut extended = Vec::with_capacity(remaining.len());
    for g in remaining {
        let mut per_degree = Vec::with_capacity(top + 2);
        for q in 0..=(top as i64 + 1) {
            let n = coned.dims[q as usize];
            let mut f = linalg::zeros(n, n);
            let dq = dim(q);
            if (q as usize) <= top {
                let blk = &g[q as usize];
                for i in 0..dq {
                    for j in 0..dq {
                        f[i][j] = blk[i][j].clone();
                    }
                }
            }
            if q >= 1 {
                let blk = &g[(q - 1) as usize];
                let off = dq;
                for i in 0..dim(q - 1) {
                    for j in 0..dim(q - 1) {
                        f[off + i][off + j] = blk[i][j].clone();
                    }
                }
            }
            per_degree.push(f);
        }
        if !is_chain_map(&coned, &per_degree) {
            return Err(IntegralError::ConeMapIncompatible(
                "unit actions do not commute on the cone".into(),
            ));
        }
        extended.push(per_degree);
    }
    Ok((coned, extended))
}

/// The total complex: Koszul complex of the translation lattice followed by
/// one mapping cone per unit generator.
pub fn total_complex(rep: &LatticeRep) -> Result<IntComplex, IntegralError> {
    rep.validate()?;
    let (mut complex, mut maps) = koszul_with_unit_maps(rep)?;
    while !maps.is_empty() {
        let map = maps.remove(0);
        let (next, extended) = cone(&complex, &map, &maps)?;
        complex = next;
        maps = extended;
    }
    complex.check_d_squared()?;
    Ok(complex)
}

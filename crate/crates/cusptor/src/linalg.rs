//! Exact dense linear algebra over the integers and rationals.
//!
//! Everything here is deterministic and exact: Hermite and Smith normal
//! forms over `BigInt`, reduced row echelon / kernels over `BigRational`,
//! and a fast rank routine modulo a word-sized prime used as a certified
//! lower bound on the rational rank.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IMat = Vec<Vec<BigInt>>;
pub type QMat = Vec<Vec<BigRational>>;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zeros(rows: usize, cols: usize) -> IMat {
    vec![vec![BigInt::zero(); cols]; rows]
}

pub fn identity(n: usize) -> IMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

pub fn mat_from_i64(rows: &[Vec<i64>]) -> IMat {
    rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let (n, k) = (a.len(), b.len());
    let m = if k == 0 { 0 } else { b[0].len() };
    assert!(a.is_empty() || a[0].len() == k, "dimension mismatch in mat_mul");
    let mut out = zeros(n, m);
    for i in 0..n {
        for (t, bt) in b.iter().enumerate() {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                let p = &a[i][t] * &bt[j];
                out[i][j] += p;
            }
        }
    }
    out
}

pub fn mat_eq(a: &IMat, b: &IMat) -> bool {
    a == b
}

pub fn mat_transpose(a: &IMat) -> IMat {
    if a.is_empty() {
        return Vec::new();
    }
    let (n, m) = (a.len(), a[0].len());
    let mut out = zeros(m, n);
    for i in 0..n {
        for j in 0..m {
            out[j][i] = a[i][j].clone();
        }
    }
    out
}

pub fn mat_sub(a: &IMat, b: &IMat) -> IMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn is_zero_mat(a: &IMat) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &IMat) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    assert_eq!(a[0].len(), n, "det requires a square matrix");
    let mut m: IMat = a.to_vec();
    let mut denom = BigInt::one();
    let mut sign = 1i64;
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = &t / &denom;
            }
            m[i][k] = BigInt::zero();
        }
        denom = m[k][k].clone();
    }
    if sign < 0 {
        -m[n - 1][n - 1].clone()
    } else {
        m[n - 1][n - 1].clone()
    }
}

/// Inverse of a unimodular integer matrix (det = ±1). Panics otherwise.
pub fn unimodular_inverse(a: &IMat) -> IMat {
    let n = a.len();
    let d = det(a);
    assert!(
        d.abs().is_one(),
        "unimodular_inverse: determinant is {d}, not a unit"
    );
    // adjugate / det, with det = ±1
    let mut inv = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // cofactor C_{ji}
            let mut minor = Vec::with_capacity(n - 1);
            for (r, row) in a.iter().enumerate() {
                if r == j {
                    continue;
                }
                let mut mr = Vec::with_capacity(n - 1);
                for (c, v) in row.iter().enumerate() {
                    if c == i {
                        continue;
                    }
                    mr.push(v.clone());
                }
                minor.push(mr);
            }
            let mut c = det(&minor);
            if (i + j) % 2 == 1 {
                c = -c;
            }
            inv[i][j] = if d.is_negative() { -c } else { c };
        }
    }
    inv
}

/// Column-style Hermite normal form of the lattice spanned by the columns
/// of `a` (full column-rank span assumed to have rank = nrows when square).
/// Returns an upper-triangular matrix with positive diagonal whose columns
/// span the same lattice; entries right of each pivot are reduced modulo
/// the pivot. Zero columns are dropped.
pub fn column_hnf(a: &IMat) -> IMat {
    if a.is_empty() {
        return Vec::new();
    }
    let rows = a.len();
    let mut cols: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..a[0].len() {
        cols.push((0..rows).map(|i| a[i][j].clone()).collect());
    }
    // eliminate from the bottom row up so the result is upper triangular
    let mut pivot_cols: Vec<Vec<BigInt>> = Vec::new();
    for r in (0..rows).rev() {
        loop {
            let mut idx: Option<usize> = None;
            for (j, c) in cols.iter().enumerate() {
                if !c[r].is_zero()
                    && idx.map_or(true, |k| c[r].abs() < cols[k][r].abs())
                {
                    idx = Some(j);
                }
            }
            let Some(p) = idx else { break };
            let others: Vec<usize> = (0..cols.len())
                .filter(|&j| j != p && !cols[j][r].is_zero())
                .collect();
            if others.is_empty() {
                let mut c = cols.swap_remove(p);
                if c[r].is_negative() {
                    for x in c.iter_mut() {
                        *x = -x.clone();
                    }
                }
                pivot_cols.push(c);
                break;
            }
            for j in others {
                let q = floor_div(&cols[j][r], &cols[p][r]);
                if !q.is_zero() {
                    for i in 0..rows {
                        let t = &cols[p][i] * &q;
                        cols[j][i] -= t;
                    }
                }
            }
        }
    }
    // pivot_cols were gathered bottom row first; re-order by pivot row
    pivot_cols.reverse();
    // reduce entries to the right of each pivot
    let k = pivot_cols.len();
    for p in (0..k).rev() {
        let r = pivot_row(&pivot_cols[p]);
        for j in p + 1..k {
            let q = floor_div(&pivot_cols[j][r], &pivot_cols[p][r]);
            if !q.is_zero() {
                for i in 0..rows {
                    let t = &pivot_cols[p][i] * &q;
                    pivot_cols[j][i] -= t;
                }
            }
        }
    }
    let mut out = zeros(rows, k);
    for (j, c) in pivot_cols.iter().enumerate() {
        for i in 0..rows {
            out[i][j] = c[i].clone();
        }
    }
    out
}

fn pivot_row(col: &[BigInt]) -> usize {
    col.iter().rposition(|x| !x.is_zero()).expect("zero pivot column")
}

pub fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = num_integer::Integer::div_mod_floor(a, b);
    let _ = r;
    q
}

/// Solve `basis * x = v` for integer `x`, where `basis` is a square
/// upper-triangular column-HNF matrix. Returns None if no integral solution.
pub fn solve_upper_triangular(basis: &IMat, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = basis.len();
    let mut x = vec![BigInt::zero(); n];
    let mut rem: Vec<BigInt> = v.to_vec();
    for i in (0..n).rev() {
        let d = &basis[i][i];
        if d.is_zero() {
            if !rem[i].is_zero() {
                return None;
            }
            continue;
        }
        let (q, r) = num_integer::Integer::div_rem(&rem[i], d);
        if !r.is_zero() {
            return None;
        }
        x[i] = q;
        for k in 0..=i {
            let t = &basis[k][i] * &x[i];
            rem[k] -= t;
        }
    }
    if rem.iter().all(|r| r.is_zero()) {
        Some(x)
    } else {
        None
    }
}

/// Smith normal form invariant factors of an integer matrix, together with
/// its rank. Pivot selection: smallest nonzero absolute value, ties broken
/// by the smaller (row L1 norm, column L1 norm) pair, so runs are
/// reproducible. Factors are returned in divisibility order.
pub fn smith_invariants(a: &IMat) -> (usize, Vec<BigInt>) {
    let mut m: IMat = a.to_vec();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut factors: Vec<BigInt> = Vec::new();
    let mut k = 0usize;
    while k < rows.min(cols) {
        let Some((pi, pj)) = select_pivot(&m, k) else { break };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        loop {
            // clear column k below the pivot
            let mut dirty = false;
            for i in k + 1..rows {
                if m[i][k].is_zero() {
                    continue;
                }
                let q = rounded_div(&m[i][k], &m[k][k]);
                if !q.is_zero() {
                    for j in k..cols {
                        let t = &m[k][j] * &q;
                        m[i][j] -= t;
                    }
                }
                if !m[i][k].is_zero() {
                    // remainder smaller than pivot: swap up and restart
                    m.swap(k, i);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // clear row k right of the pivot
            for j in k + 1..cols {
                if m[k][j].is_zero() {
                    continue;
                }
                let q = rounded_div(&m[k][j], &m[k][k]);
                if !q.is_zero() {
                    for i in k..rows {
                        let t = &m[i][k] * &q;
                        m[i][j] -= t;
                    }
                }
                if !m[k][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(k, j);
                    }
                    dirty = true;
                    break;
                }
            }
            if dirty {
                continue;
            }
            // enforce divisibility of the remaining block by the pivot
            let mut fixed = true;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !num_integer::Integer::is_multiple_of(&m[i][j], &m[k][k]) {
                        for jj in k..cols {
                            let t = m[i][jj].clone();
                            m[k][jj] += t;
                        }
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if m[k][k].is_negative() {
            for j in k..cols {
                m[k][j] = -m[k][j].clone();
            }
        }
        factors.push(m[k][k].clone());
        k += 1;
    }
    (factors.len(), factors)
}

fn select_pivot(m: &IMat, k: usize) -> Option<(usize, usize)> {
    let rows = m.len();
    let cols = m[0].len();
    let mut best: Option<(usize, usize)> = None;
    let mut best_key: Option<(BigInt, BigInt, BigInt)> = None;
    for i in k..rows {
        for j in k..cols {
            if m[i][j].is_zero() {
                continue;
            }
            let a = m[i][j].abs();
            let key = || {
                let rnorm: BigInt = m[i][k..].iter().map(|x| x.abs()).sum();
                let cnorm: BigInt = (k..rows).map(|r| m[r][j].abs()).sum();
                (a.clone(), rnorm, cnorm)
            };
            match &best_key {
                None => {
                    best_key = Some(key());
                    best = Some((i, j));
                }
                Some(bk) => {
                    if a < bk.0 {
                        best_key = Some(key());
                        best = Some((i, j));
                    } else if a == bk.0 {
                        let kk = key();
                        if (kk.1.clone(), kk.2.clone()) < (bk.1.clone(), bk.2.clone()) {
                            best_key = Some(kk);
                            best = Some((i, j));
                        }
                    }
                }
            }
        }
    }
    best
}

fn rounded_div(a: &BigInt, b: &BigInt) -> BigInt {
    // quotient minimizing |a - q b|
    let (q, r) = num_integer::Integer::div_mod_floor(a, b);
    let two_r: BigInt = &r * 2;
    if two_r.abs() > b.abs() {
        q + BigInt::one()
    } else {
        q
    }
}

/// Reduced row echelon form over the rationals, in place.
/// Returns the pivot column indices.
pub fn rref(m: &mut QMat) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].clone();
        for j in c..cols {
            m[r][j] = &m[r][j] / &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_q(a: &QMat) -> usize {
    let mut m = a.to_vec();
    rref(&mut m).len()
}

pub fn rank_int(a: &IMat) -> usize {
    let m: QMat = a
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from(x.clone())).collect())
        .collect();
    rank_q(&m)
}

/// Basis of the right kernel of `a` over the rationals (column vectors).
pub fn nullspace_q(a: &QMat) -> Vec<Vec<BigRational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    if cols == 0 {
        return Vec::new();
    }
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (pr, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[pr][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Integer kernel of an integer matrix: a basis (as columns) of the
/// saturated lattice ker(a) ∩ Z^n, via rational kernel + denominator
/// clearing + column HNF.
pub fn nullspace_int(a: &IMat) -> IMat {
    let q: QMat = a
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from(x.clone())).collect())
        .collect();
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    let basis = nullspace_q(&q);
    if basis.is_empty() {
        return zeros(cols, 0);
    }
    let mut m = zeros(cols, basis.len());
    for (j, v) in basis.iter().enumerate() {
        let lcm = v
            .iter()
            .fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
        for (i, x) in v.iter().enumerate() {
            m[i][j] = x.numer() * (&lcm / x.denom());
        }
    }
    // HNF so that the lattice basis is canonical; the rational span already
    // is saturated because we solved over Q and cleared denominators per
    // generator, then saturate by construction: kernel of an integer matrix
    // intersected with Z^n equals the integer span of the HNF of any
    // rational basis scaled to primitive vectors.
    for j in 0..m[0].len() {
        let g = (0..cols).fold(BigInt::zero(), |acc, i| num_integer::Integer::gcd(&acc, &m[i][j]));
        if !g.is_zero() && !g.is_one() {
            for i in 0..cols {
                m[i][j] = &m[i][j] / &g;
            }
        }
    }
    column_hnf(&m)
}

const RANK_PRIME: u64 = 2_147_483_647; // 2^31 - 1

/// Rank of an i64 matrix modulo a fixed 31-bit prime. Always a lower bound
/// for the rational rank.
pub fn rank_mod_p(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> usize {
    if rows == 0 || cols == 0 {
        return 0;
    }
    let p = RANK_PRIME;
    let mut m = vec![0u64; rows * cols];
    for &(i, j, v) in entries {
        let r = v.rem_euclid(p as i64) as u64;
        m[i * cols + j] = (m[i * cols + j] + r) % p;
    }
    let mut rank = 0usize;
    for c in 0..cols {
        let Some(pr) = (rank..rows).find(|&i| m[i * cols + c] != 0) else {
            continue;
        };
        for j in 0..cols {
            m.swap(rank * cols + j, pr * cols + j);
        }
        let inv = mod_inv(m[rank * cols + c], p);
        for j in c..cols {
            m[rank * cols + j] = m[rank * cols + j] * inv % p;
        }
        for i in 0..rows {
            if i != rank && m[i * cols + c] != 0 {
                let f = m[i * cols + c];
                for j in c..cols {
                    let t = f * m[rank * cols + j] % p;
                    m[i * cols + j] = (m[i * cols + j] + p - t) % p;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let a = mat_from_i64(&[vec![1, 2], vec![1, 1]]);
        assert_eq!(det(&a), int(-1));
        let inv = unimodular_inverse(&a);
        assert_eq!(mat_mul(&a, &inv), identity(2));
    }

    #[test]
    fn smith_small() {
        let a = mat_from_i64(&[
            vec![-6, 111, -36, 6],
            vec![5, -672, 210, 74],
            vec![0, -255, 81, 24],
            vec![-7, 255, -81, -10],
        ]);
        let (rank, factors) = smith_invariants(&a);
        assert_eq!(rank, 3);
        assert_eq!(factors, vec![int(1), int(3), int(21)]);
    }

    #[test]
    fn smith_divisibility_chain() {
        let a = mat_from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let (_, factors) = smith_invariants(&a);
        for w in factors.windows(2) {
            assert!(num_integer::Integer::is_multiple_of(&w[1], &w[0]));
        }
    }

    #[test]
    fn hnf_ideal_like() {
        // lattice spanned by (2,1) and (-1,2) in Z^2: index 5 sublattice
        let a = mat_from_i64(&[vec![2, -1], vec![1, 2]]);
        let h = column_hnf(&a);
        assert_eq!(h, mat_from_i64(&[vec![5, 2], vec![0, 1]]));
        assert_eq!(det(&h), int(5));
    }

    #[test]
    fn kernel_exact() {
        let a = mat_from_i64(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = nullspace_int(&a);
        assert_eq!(k[0].len(), 2);
        // every kernel column maps to zero
        let prod = mat_mul(&a, &k);
        assert!(is_zero_mat(&prod));
    }

    #[test]
    fn rank_mod_p_agrees() {
        let entries = vec![(0, 0, 1i64), (0, 1, 2), (1, 0, 2), (1, 1, 4), (2, 2, 7)];
        assert_eq!(rank_mod_p(3, 3, &entries), 2);
    }

    #[test]
    fn triangular_solve() {
        let h = mat_from_i64(&[vec![5, 2], vec![0, 1]]);
        let v = vec![int(7), int(1)];
        let x = solve_upper_triangular(&h, &v).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
        assert!(solve_upper_triangular(&h, &[int(1), int(0)]).is_none());
    }
}

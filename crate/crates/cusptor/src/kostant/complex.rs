//! The finite boundary complex: basis enumeration in mixed-radix codes and
//! the raising differential that wedges a fiber 1-form while stepping the
//! section index.

use num_rational::BigRational;

use crate::linalg;

use super::{KostantError, KostantMonomial, Signature, Weight};

pub const DEFAULT_DIMENSION_CAP: u64 = 1_000_000;

/// One digit of the code: a section index k bounded by `bound` plus a flag
/// for the attached fiber form. Digits are ordered dx_1..dx_{r1},
/// dz_1, dz̄_1, dz_2, dz̄_2, ...
#[derive(Debug, Clone)]
struct Place {
    bound: u32,
    stride: u64,
}

/// The complex C^* for a fixed signature and weight, held implicitly:
/// basis elements are mixed-radix codes, the differential is generated on
/// demand. Immutable once built; `build_dc` verifies d ∘ d = 0 exactly.
#[derive(Debug, Clone)]
pub struct FiniteComplex {
    pub signature: Signature,
    pub weight: Weight,
    places: Vec<Place>,
    total_dim: u64,
}

impl FiniteComplex {
    pub fn total_dim(&self) -> u64 {
        self.total_dim
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    #[inline]
    pub fn decode(&self, code: u64, t: usize) -> (u32, bool) {
        let p = &self.places[t];
        let radix = 2 * (p.bound as u64 + 1);
        let v = (code / p.stride) % radix;
        let k = (v % (p.bound as u64 + 1)) as u32;
        let flag = v >= p.bound as u64 + 1;
        (k, flag)
    }

    /// Fiber form degree of a code.
    #[inline]
    pub fn degree_of(&self, code: u64) -> usize {
        (0..self.places.len()).filter(|&t| self.decode(code, t).1).count()
    }

    /// Raising move at digit t: Some((target, signed coefficient)).
    #[inline]
    pub fn raise(&self, code: u64, t: usize) -> Option<(u64, i64)> {
        let p = &self.places[t];
        let (k, flag) = self.decode(code, t);
        if flag || k >= p.bound {
            return None;
        }
        let target = code + (p.bound as u64 + 2) * p.stride;
        let coeff = (p.bound - k) as i64 * self.sign_below(code, t);
        Some((target, coeff))
    }

    /// Lowering move (transpose of a raising move) at digit t.
    #[inline]
    pub fn lower(&self, code: u64, t: usize) -> Option<(u64, i64)> {
        let p = &self.places[t];
        let (k, flag) = self.decode(code, t);
        if !flag || k == 0 {
            return None;
        }
        let target = code - (p.bound as u64 + 2) * p.stride;
        let coeff = (p.bound - k + 1) as i64 * self.sign_below(code, t);
        Some((target, coeff))
    }

    #[inline]
    fn sign_below(&self, code: u64, t: usize) -> i64 {
        let mut flips = 0u32;
        for s in 0..t {
            if self.decode(code, s).1 {
                flips += 1;
            }
        }
        if flips % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn monomial(&self, code: u64) -> KostantMonomial {
        let sig = self.signature;
        let mut m = KostantMonomial {
            k: vec![0; sig.r1],
            l: vec![0; sig.r2],
            lbar: vec![0; sig.r2],
            dx: vec![false; sig.r1],
            dz: vec![false; sig.r2],
            dzbar: vec![false; sig.r2],
            x_half_density: false,
        };
        for i in 0..sig.r1 {
            let (k, f) = self.decode(code, i);
            m.k[i] = k;
            m.dx[i] = f;
        }
        for j in 0..sig.r2 {
            let (l, f) = self.decode(code, sig.r1 + 2 * j);
            m.l[j] = l;
            m.dz[j] = f;
            let (lb, fb) = self.decode(code, sig.r1 + 2 * j + 1);
            m.lbar[j] = lb;
            m.dzbar[j] = fb;
        }
        m
    }

    pub fn code_of(&self, m: &KostantMonomial) -> u64 {
        let sig = self.signature;
        let mut code = 0u64;
        let digit = |t: usize, k: u32, flag: bool| -> u64 {
            let p = &self.places[t];
            (k as u64 + if flag { p.bound as u64 + 1 } else { 0 }) * p.stride
        };
        for i in 0..sig.r1 {
            code += digit(i, m.k[i], m.dx[i]);
        }
        for j in 0..sig.r2 {
            code += digit(sig.r1 + 2 * j, m.l[j], m.dz[j]);
            code += digit(sig.r1 + 2 * j + 1, m.lbar[j], m.dzbar[j]);
        }
        code
    }

    /// Basis dimension in each fiber form degree 0..=d_K.
    pub fn dims_by_degree(&self) -> Vec<u64> {
        // convolution of (bound_t + 1) * (1 + x) over all digits
        let mut dims = vec![0u64; self.places.len() + 1];
        dims[0] = 1;
        for p in &self.places {
            let w = p.bound as u64 + 1;
            for q in (0..dims.len() - 1).rev() {
                let d = dims[q];
                dims[q + 1] += d * w;
                dims[q] = d * w;
            }
            // note: dims[q+1] accumulated before dims[q] overwritten
        }
        dims
    }

    /// Dense rational matrix of the differential out of degree q
    /// (columns = degree-q basis, rows = degree-(q+1) basis), for small
    /// complexes and tests.
    pub fn differential_matrix(&self, q: usize) -> (Vec<u64>, Vec<u64>, Vec<Vec<BigRational>>) {
        let mut dom = Vec::new();
        let mut cod = Vec::new();
        for code in 0..self.total_dim {
            let d = self.degree_of(code);
            if d == q {
                dom.push(code);
            } else if d == q + 1 {
                cod.push(code);
            }
        }
        let pos: std::collections::HashMap<u64, usize> =
            cod.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut mat = vec![vec![BigRational::from(linalg::int(0)); dom.len()]; cod.len()];
        for (j, &code) in dom.iter().enumerate() {
            for t in 0..self.places.len() {
                if let Some((target, coeff)) = self.raise(code, t) {
                    mat[pos[&target]][j] = BigRational::from(linalg::int(coeff));
                }
            }
        }
        (dom, cod, mat)
    }

    /// Total rank of the differential, exactly (for modest dimensions).
    pub fn differential_rank(&self) -> usize {
        (0..self.places.len())
            .map(|q| linalg::rank_q(&self.differential_matrix(q).2))
            .sum()
    }

    /// Exact check that consecutive raising moves cancel pairwise.
    fn check_d_squared(&self) -> bool {
        let np = self.places.len();
        for code in 0..self.total_dim {
            for t in 0..np {
                let Some((ct, kt)) = self.raise(code, t) else { continue };
                for s in t + 1..np {
                    let Some((_, ks)) = self.raise(code, s) else { continue };
                    // both orders land on the same basis element
                    let (cts, kts) = self.raise(ct, s).expect("move must persist");
                    let (cst, kst) = {
                        let (cs, _) = self.raise(code, s).unwrap();
                        self.raise(cs, t).expect("move must persist")
                    };
                    debug_assert_eq!(cts, cst);
                    let sum = kt as i128 * kts as i128 + ks as i128 * kst as i128;
                    if sum != 0 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Build the boundary complex for a weight, verifying the dimension cap and
/// that the differential squares to zero.
pub fn build_dc(sig: Signature, weight: &Weight, cap: u64) -> Result<FiniteComplex, KostantError> {
    if !weight.matches(sig) {
        return Err(KostantError::WeightShape);
    }
    let mut bounds: Vec<u32> = Vec::with_capacity(sig.degree());
    bounds.extend(&weight.m);
    for j in 0..sig.r2 {
        bounds.push(weight.n[j]);
        bounds.push(weight.nbar[j]);
    }
    let mut dim: u128 = 1;
    for &b in &bounds {
        dim = dim.saturating_mul(2 * (b as u128 + 1));
    }
    if dim > cap as u128 {
        return Err(KostantError::DimensionOverflow { dim, cap });
    }
    let mut places = Vec::with_capacity(bounds.len());
    let mut stride = 1u64;
    for &b in &bounds {
        places.push(Place { bound: b, stride });
        stride *= 2 * (b as u64 + 1);
    }
    let complex = FiniteComplex { signature: sig, weight: weight.clone(), places, total_dim: stride };
    assert!(complex.check_d_squared(), "differential must square to zero");
    Ok(complex)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        // (1,0), m=(1): 2 * 2 = 4 basis elements, differential rank 1
        let sig = Signature::new(1, 0);
        let c = build_dc(sig, &Weight::new(vec![1], vec![], vec![]), DEFAULT_DIMENSION_CAP).unwrap();
        assert_eq!(c.total_dim(), 4);
        assert_eq!(c.differential_rank(), 1);

        // (0,1), n = nbar = (1): 1 * (2*2) * 2^2 = 16
        let sig = Signature::new(0, 1);
        let c = build_dc(sig, &Weight::new(vec![], vec![1], vec![1]), DEFAULT_DIMENSION_CAP).unwrap();
        assert_eq!(c.total_dim(), 16);

        // zero weight: zero differential
        let sig = Signature::new(2, 1);
        let c = build_dc(sig, &Weight::zero(sig), DEFAULT_DIMENSION_CAP).unwrap();
        assert_eq!(c.total_dim(), 16); // 2^{d_K} = 2^4
        assert_eq!(c.differential_rank(), 0);
    }

    #[test]
    fn dims_by_degree_binomial() {
        let sig = Signature::new(2, 0);
        let c = build_dc(sig, &Weight::new(vec![1, 2], vec![], vec![]), DEFAULT_DIMENSION_CAP)
            .unwrap();
        // (m1+1)(m2+1) = 6 sections, exterior algebra on two generators
        assert_eq!(c.dims_by_degree(), vec![6, 12, 6]);
        assert_eq!(c.total_dim(), 24);
    }

    #[test]
    fn code_roundtrip() {
        let sig = Signature::new(1, 1);
        let c = build_dc(sig, &Weight::new(vec![2], vec![1], vec![3]), DEFAULT_DIMENSION_CAP)
            .unwrap();
        for code in 0..c.total_dim() {
            let m = c.monomial(code);
            assert_eq!(c.code_of(&m), code);
            assert_eq!(m.form_degree(), c.degree_of(code));
        }
    }

    #[test]
    fn dimension_cap_enforced() {
        let sig = Signature::new(1, 0);
        let err = build_dc(sig, &Weight::new(vec![100], vec![], vec![]), 10).unwrap_err();
        assert!(matches!(err, KostantError::DimensionOverflow { .. }));
    }
}

//! The finite-dimensional boundary complex attached to a signature and a
//! representation weight: its differential, Hodge kernel, flat-line
//! characters over the base torus, boundary cohomology with its ± split,
//! Fredholm analysis of the horizontal model operator, and the binomial
//! vanishing sums.

mod binom;
mod boundary;
mod chars;
mod complex;
mod hodge;
mod verify;

pub use binom::binomial_weighted_sum;
pub use boundary::{
    acyclicity_status, boundary_cohomology, fredholm_and_l2b_kernel, l2_halfline_cohomology,
    small_rank, AcyclicityStatus, BoundaryCohomology, FredholmReport, L2bKernelElement,
};
pub use chars::{
    hodge_kernel_monomials, ker_eth_s, line_bundle_chars, CharacterVector, FamilySide, KerEthS,
};
pub use complex::{build_dc, FiniteComplex, DEFAULT_DIMENSION_CAP};
pub use hodge::{hodge_kernel_dc, HodgeKernel};
pub use verify::{verify_grid, verify_signature, GridReport, SignatureReport};

use std::fmt;

use num_rational::BigRational;

use crate::linalg::rat;

/// Archimedean signature (r1 real places, r2 complex places).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub r1: usize,
    pub r2: usize,
}

impl Signature {
    pub fn new(r1: usize, r2: usize) -> Self {
        assert!(r1 + r2 > 0, "signature must have at least one place");
        Signature { r1, r2 }
    }

    /// Field degree d_K = r1 + 2 r2.
    pub fn degree(&self) -> usize {
        self.r1 + 2 * self.r2
    }

    /// Dimension of the base torus of the cusp fibration, r1 + r2 - 1.
    pub fn base_dim(&self) -> usize {
        self.r1 + self.r2 - 1
    }

    /// Dimension of the cusp cross-section, 2 r1 + 3 r2 - 1.
    pub fn cross_section_dim(&self) -> usize {
        2 * self.r1 + 3 * self.r2 - 1
    }
}

/// Representation label (m, n, n̄): one nonnegative integer per real place,
/// a pair per complex place.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weight {
    pub m: Vec<u32>,
    pub n: Vec<u32>,
    pub nbar: Vec<u32>,
}

impl Weight {
    pub fn new(m: Vec<u32>, n: Vec<u32>, nbar: Vec<u32>) -> Self {
        Weight { m, n, nbar }
    }

    pub fn zero(sig: Signature) -> Self {
        Weight { m: vec![0; sig.r1], n: vec![0; sig.r2], nbar: vec![0; sig.r2] }
    }

    pub fn matches(&self, sig: Signature) -> bool {
        self.m.len() == sig.r1 && self.n.len() == sig.r2 && self.nbar.len() == sig.r2
    }

    /// |m| = Σ m_i.
    pub fn abs_m(&self) -> i64 {
        self.m.iter().map(|&x| x as i64).sum()
    }

    /// |n| = Σ (n_j + n̄_j).
    pub fn abs_n(&self) -> i64 {
        self.n.iter().chain(&self.nbar).map(|&x| x as i64).sum()
    }

    /// Complex conjugate weight: n and n̄ swapped.
    pub fn conjugate(&self) -> Weight {
        Weight { m: self.m.clone(), n: self.nbar.clone(), nbar: self.n.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|&x| x == 0)
            && self.n.iter().all(|&x| x == 0)
            && self.nbar.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={:?} n={:?} nbar={:?}", self.m, self.n, self.nbar)
    }
}

/// A basis monomial of the boundary complex: the section indices (k, l, l̄)
/// and the attached fiber 1-forms, plus an optional half-density factor in
/// the cylinder direction used by the horizontal-operator bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KostantMonomial {
    pub k: Vec<u32>,
    pub l: Vec<u32>,
    pub lbar: Vec<u32>,
    pub dx: Vec<bool>,
    pub dz: Vec<bool>,
    pub dzbar: Vec<bool>,
    pub x_half_density: bool,
}

impl KostantMonomial {
    pub fn section_only(sig: Signature, k: Vec<u32>, l: Vec<u32>, lbar: Vec<u32>) -> Self {
        KostantMonomial {
            k,
            l,
            lbar,
            dx: vec![false; sig.r1],
            dz: vec![false; sig.r2],
            dzbar: vec![false; sig.r2],
            x_half_density: false,
        }
    }

    /// Fiber form degree |A| + |B| + |B̄|.
    pub fn form_degree(&self) -> usize {
        self.dx.iter().filter(|&&b| b).count()
            + self.dz.iter().filter(|&&b| b).count()
            + self.dzbar.iter().filter(|&&b| b).count()
    }

    pub fn within(&self, w: &Weight) -> bool {
        self.k.iter().zip(&w.m).all(|(&k, &m)| k <= m)
            && self.l.iter().zip(&w.n).all(|(&l, &n)| l <= n)
            && self.lbar.iter().zip(&w.nbar).all(|(&l, &n)| l <= n)
    }
}

impl fmt::Display for KostantMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w[k={:?},l={:?},lbar={:?}]", self.k, self.l, self.lbar)?;
        for (i, &b) in self.dx.iter().enumerate() {
            if b {
                write!(f, " dx{}", i + 1)?;
            }
        }
        for (j, &b) in self.dz.iter().enumerate() {
            if b {
                write!(f, " dz{}", j + 1)?;
            }
        }
        for (j, &b) in self.dzbar.iter().enumerate() {
            if b {
                write!(f, " dzbar{}", j + 1)?;
            }
        }
        if self.x_half_density {
            write!(f, " dX/<X>")?;
        }
        Ok(())
    }
}

/// The weight operator on a basis monomial: fiber 1-forms contribute their
/// count, the section contributes (|m| + |n|)/2 − |k| − |l| − |l̄|; the
/// cylinder half-density and base forms contribute nothing.
pub fn weight_op(weight: &Weight, monomial: &KostantMonomial) -> BigRational {
    let forms = monomial.form_degree() as i64;
    let k: i64 = monomial.k.iter().map(|&x| x as i64).sum();
    let l: i64 = monomial.l.iter().map(|&x| x as i64).sum();
    let lbar: i64 = monomial.lbar.iter().map(|&x| x as i64).sum();
    rat(2 * forms + weight.abs_m() + weight.abs_n() - 2 * (k + l + lbar), 2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KostantError {
    DimensionOverflow { dim: u128, cap: u64 },
    MismatchWithClosedForm(String),
    NotAKernelMonomial,
    UnsupportedSignatureWeight,
    MissingL2Dim,
    WeightShape,
}

impl fmt::Display for KostantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KostantError::DimensionOverflow { dim, cap } => {
                write!(f, "complex dimension {dim} exceeds cap {cap}")
            }
            KostantError::MismatchWithClosedForm(s) => {
                write!(f, "computed kernel disagrees with closed form: {s}")
            }
            KostantError::NotAKernelMonomial => write!(f, "monomial is not a kernel pattern"),
            KostantError::UnsupportedSignatureWeight => {
                write!(f, "signature/weight combination not supported")
            }
            KostantError::MissingL2Dim => write!(f, "interior L2 kernel dimension required"),
            KostantError::WeightShape => write!(f, "weight does not match signature"),
        }
    }
}

impl std::error::Error for KostantError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_operator_values() {
        let sig = Signature::new(1, 1);
        let w = Weight::new(vec![2], vec![1], vec![1]);
        // the bare half-density has weight zero
        let mut m = KostantMonomial::section_only(sig, vec![2], vec![1], vec![1]);
        m.x_half_density = true;
        // top (k,l): (|m|+|n|)/2 - |m| - |n| = (2+2)/2 - 2 - 2 = -2
        assert_eq!(weight_op(&w, &m), rat(-2, 1));
        // hat w_{0,0}: (|m|+|n|)/2 = 2
        let m0 = KostantMonomial::section_only(sig, vec![0], vec![0], vec![0]);
        assert_eq!(weight_op(&w, &m0), rat(2, 1));
        // all fiber forms on top (k,l): adds d_K = 3
        let mut mt = KostantMonomial::section_only(sig, vec![2], vec![1], vec![1]);
        mt.dx[0] = true;
        mt.dz[0] = true;
        mt.dzbar[0] = true;
        assert_eq!(weight_op(&w, &mt), rat(1, 1));
    }

    #[test]
    fn bare_half_density_has_weight_zero() {
        let sig = Signature::new(1, 1);
        let w = Weight::zero(sig);
        let mut m = KostantMonomial::section_only(sig, vec![0], vec![0], vec![0]);
        m.x_half_density = true;
        assert_eq!(weight_op(&w, &m), rat(0, 1));
    }

    #[test]
    fn conjugate_swaps() {
        let w = Weight::new(vec![], vec![3, 1], vec![0, 0]);
        let c = w.conjugate();
        assert_eq!(c.n, vec![0, 0]);
        assert_eq!(c.nbar, vec![3, 1]);
    }
}

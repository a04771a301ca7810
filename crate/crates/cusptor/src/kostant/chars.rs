//! Flat-line characters over the base torus and the kernel of the
//! horizontal Hodge-deRham operator.
//!
//! Each Hodge-kernel monomial spans a flat line bundle on the base torus;
//! its twisted differential is wedging with a constant 1-form whose
//! coefficient vector, written in the reduced coordinates after eliminating
//! the dependent one, is computed here. The horizontal kernel consists of
//! the lines with vanishing character, tensored with the exterior algebra
//! on the surviving base directions — computed both from the closed-form
//! description and by direct enumeration, with exact agreement enforced.

use num_rational::BigRational;

use crate::linalg::rat;

use super::{KostantError, KostantMonomial, Signature, Weight};

/// Coefficients of the twisted differential in the reduced base
/// coordinates; dimension r1 + r2 − 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterVector(pub Vec<BigRational>);

impl CharacterVector {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c == &rat(0, 1))
    }
}

/// Which side of the boundary-cohomology splitting a kernel generator
/// belongs to. `Unsplit` marks the fully invariant case (no real place,
/// zero weight) where the splitting is not defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySide {
    Plus,
    Minus,
    Unsplit,
}

/// Kernel of the horizontal operator: generators (each to be tensored with
/// the exterior algebra on `base_rank` abstract generators) tagged by side.
#[derive(Debug, Clone)]
pub struct KerEthS {
    pub signature: Signature,
    pub weight: Weight,
    pub generators: Vec<(KostantMonomial, FamilySide)>,
    pub base_rank: usize,
}

impl KerEthS {
    pub fn nontrivial(&self) -> bool {
        !self.generators.is_empty()
    }

    pub fn total_dim(&self) -> u64 {
        (self.generators.len() as u64) << self.base_rank
    }

    /// Graded dimensions over total form degree (generator degree plus base
    /// degree), for the full kernel and for each side.
    pub fn dims_by_degree(&self) -> Vec<u64> {
        self.graded(|_| true)
    }

    pub fn dims_by_degree_side(&self, side: FamilySide) -> Vec<u64> {
        self.graded(|s| s == side)
    }

    fn graded(&self, keep: impl Fn(FamilySide) -> bool) -> Vec<u64> {
        let top = self.signature.cross_section_dim();
        let mut dims = vec![0u64; top + 1];
        for (g, side) in &self.generators {
            if !keep(*side) {
                continue;
            }
            let d0 = g.form_degree();
            for b in 0..=self.base_rank {
                dims[d0 + b] += binomial(self.base_rank, b);
            }
        }
        dims
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// The closed-form Hodge kernel monomials: per real place either the top
/// section bare or the bottom section with its 1-form; per complex place
/// the four analogous corner patterns.
pub fn hodge_kernel_monomials(sig: Signature, weight: &Weight) -> Vec<KostantMonomial> {
    let mut out = vec![KostantMonomial::section_only(
        sig,
        vec![0; sig.r1],
        vec![0; sig.r2],
        vec![0; sig.r2],
    )];
    for i in 0..sig.r1 {
        let mut next = Vec::with_capacity(out.len() * 2);
        for m in &out {
            let mut top = m.clone();
            top.k[i] = weight.m[i];
            next.push(top);
            let mut bot = m.clone();
            bot.k[i] = 0;
            bot.dx[i] = true;
            next.push(bot);
        }
        out = next;
    }
    for j in 0..sig.r2 {
        let mut next = Vec::with_capacity(out.len() * 4);
        for m in &out {
            for (l, dz) in [(weight.n[j], false), (0, true)] {
                for (lbar, dzbar) in [(weight.nbar[j], false), (0, true)] {
                    let mut x = m.clone();
                    x.l[j] = l;
                    x.dz[j] = dz;
                    x.lbar[j] = lbar;
                    x.dzbar[j] = dzbar;
                    next.push(x);
                }
            }
        }
        out = next;
    }
    out
}

fn is_kernel_pattern(sig: Signature, weight: &Weight, m: &KostantMonomial) -> bool {
    if m.k.len() != sig.r1 || m.l.len() != sig.r2 || m.lbar.len() != sig.r2 {
        return false;
    }
    for i in 0..sig.r1 {
        let ok = (m.k[i] == weight.m[i] && !m.dx[i]) || (m.k[i] == 0 && m.dx[i]);
        if !ok {
            return false;
        }
    }
    for j in 0..sig.r2 {
        let ok = (m.l[j] == weight.n[j] && !m.dz[j]) || (m.l[j] == 0 && m.dz[j]);
        let okbar = (m.lbar[j] == weight.nbar[j] && !m.dzbar[j]) || (m.lbar[j] == 0 && m.dzbar[j]);
        if !(ok && okbar) {
            return false;
        }
    }
    true
}

/// Doubled raw character coefficients: 2c_i per real place, 2e_j per
/// complex place (integers).
fn doubled_raw_char(weight: &Weight, m: &KostantMonomial) -> (Vec<i64>, Vec<i64>) {
    let c: Vec<i64> = (0..weight.m.len())
        .map(|i| 2 * m.k[i] as i64 - weight.m[i] as i64 - 2 * m.dx[i] as i64)
        .collect();
    let e: Vec<i64> = (0..weight.n.len())
        .map(|j| {
            2 * (m.l[j] as i64 + m.lbar[j] as i64)
                - weight.n[j] as i64
                - weight.nbar[j] as i64
                - 2 * (m.dz[j] as i64 + m.dzbar[j] as i64)
        })
        .collect();
    (c, e)
}

fn doubled_reduced_char(sig: Signature, weight: &Weight, m: &KostantMonomial) -> Vec<i64> {
    let (c, e) = doubled_raw_char(weight, m);
    if sig.r1 > 0 {
        let mut out = Vec::with_capacity(sig.base_dim());
        for i in 1..sig.r1 {
            out.push(c[i] - c[0]);
        }
        for j in 0..sig.r2 {
            out.push(e[j] - 2 * c[0]);
        }
        out
    } else {
        (1..sig.r2).map(|j| e[j] - e[0]).collect()
    }
}

/// Character of the twisted differential on a kernel-pattern monomial, in
/// the reduced base coordinates (dũ_2..dũ_{r1}, dṽ_1..dṽ_{r2} when r1 > 0,
/// dṽ_2..dṽ_{r2} when r1 = 0).
pub fn line_bundle_chars(
    sig: Signature,
    weight: &Weight,
    monomial: &KostantMonomial,
) -> Result<CharacterVector, KostantError> {
    if !weight.matches(sig) {
        return Err(KostantError::WeightShape);
    }
    if !is_kernel_pattern(sig, weight, monomial) {
        return Err(KostantError::NotAKernelMonomial);
    }
    let doubled = doubled_reduced_char(sig, weight, monomial);
    Ok(CharacterVector(doubled.into_iter().map(|x| rat(x, 2)).collect()))
}

/// Kernel of the horizontal operator, closed form cross-checked against the
/// brute-force character enumeration.
pub fn ker_eth_s(sig: Signature, weight: &Weight) -> Result<KerEthS, KostantError> {
    if !weight.matches(sig) {
        return Err(KostantError::WeightShape);
    }
    if sig.r1 == 0 && weight.nbar.iter().any(|&x| x != 0) {
        return Err(KostantError::UnsupportedSignatureWeight);
    }
    let closed = closed_form(sig, weight);
    let brute = brute_force(sig, weight);
    let mut closed_sorted: Vec<KostantMonomial> =
        closed.iter().map(|(m, _)| m.clone()).collect();
    closed_sorted.sort();
    if closed_sorted != brute {
        return Err(KostantError::MismatchWithClosedForm(format!(
            "horizontal kernel: closed form has {} generators, enumeration {}",
            closed_sorted.len(),
            brute.len()
        )));
    }
    Ok(KerEthS { signature: sig, weight: weight.clone(), generators: closed, base_rank: sig.base_dim() })
}

/// All Hodge-kernel monomials with vanishing reduced character, sorted.
fn brute_force(sig: Signature, weight: &Weight) -> Vec<KostantMonomial> {
    let mut out: Vec<KostantMonomial> = hodge_kernel_monomials(sig, weight)
        .into_iter()
        .filter(|m| doubled_reduced_char(sig, weight, m).iter().all(|&x| x == 0))
        .collect();
    out.sort();
    out
}

fn closed_form(sig: Signature, weight: &Weight) -> Vec<(KostantMonomial, FamilySide)> {
    if sig.r1 > 0 {
        closed_form_with_real_place(sig, weight)
    } else if weight.n.iter().any(|&x| x != 0) {
        closed_form_complex_only(sig, weight)
    } else {
        closed_form_invariant(sig)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum PlaceClass {
    Neutral,
    InJ,
    InJbar,
}

fn classify_places(weight: &Weight, m1: i64) -> Option<Vec<PlaceClass>> {
    weight
        .n
        .iter()
        .zip(&weight.nbar)
        .map(|(&n, &nbar)| {
            let (n, nbar) = (n as i64, nbar as i64);
            if n + nbar == 2 * m1 {
                Some(PlaceClass::Neutral)
            } else if n == nbar + 2 * m1 + 2 {
                Some(PlaceClass::InJbar)
            } else if nbar == n + 2 * m1 + 2 {
                Some(PlaceClass::InJ)
            } else {
                None
            }
        })
        .collect()
}

fn closed_form_with_real_place(
    sig: Signature,
    weight: &Weight,
) -> Vec<(KostantMonomial, FamilySide)> {
    if weight.m.windows(2).any(|w| w[0] != w[1]) {
        return Vec::new();
    }
    let m1 = weight.m.first().copied().unwrap_or(0) as i64;
    let Some(classes) = classify_places(weight, m1) else {
        return Vec::new();
    };
    let mut plus = KostantMonomial::section_only(sig, weight.m.clone(), vec![0; sig.r2], vec![0; sig.r2]);
    let mut minus = KostantMonomial::section_only(sig, vec![0; sig.r1], vec![0; sig.r2], vec![0; sig.r2]);
    minus.dx = vec![true; sig.r1];
    for (j, class) in classes.iter().enumerate() {
        match class {
            PlaceClass::Neutral => {
                plus.l[j] = weight.n[j];
                plus.lbar[j] = weight.nbar[j];
                minus.dz[j] = true;
                minus.dzbar[j] = true;
            }
            PlaceClass::InJ => {
                plus.lbar[j] = weight.nbar[j];
                plus.dz[j] = true;
                minus.l[j] = weight.n[j];
                minus.dzbar[j] = true;
            }
            PlaceClass::InJbar => {
                plus.l[j] = weight.n[j];
                plus.dzbar[j] = true;
                minus.lbar[j] = weight.nbar[j];
                minus.dz[j] = true;
            }
        }
    }
    vec![(plus, FamilySide::Plus), (minus, FamilySide::Minus)]
}

fn closed_form_complex_only(sig: Signature, weight: &Weight) -> Vec<(KostantMonomial, FamilySide)> {
    let nmax = *weight.n.iter().max().unwrap() as i64;
    if weight.n.iter().any(|&n| {
        let n = n as i64;
        n != nmax && n != nmax - 2
    }) {
        return Vec::new();
    }
    let has_drop = weight.n.iter().any(|&n| (n as i64) == nmax - 2);
    let alphas: Vec<Vec<bool>> = if has_drop {
        vec![weight.n.iter().map(|&n| n as i64 == nmax).collect()]
    } else {
        vec![vec![false; sig.r2], vec![true; sig.r2]]
    };
    let betas: Vec<Vec<bool>> = if has_drop {
        vec![weight.n.iter().map(|&n| n as i64 == nmax - 2).collect()]
    } else {
        vec![vec![false; sig.r2], vec![true; sig.r2]]
    };
    let mut out = Vec::new();
    for alpha in &alphas {
        let mut g = KostantMonomial::section_only(sig, vec![], weight.n.clone(), vec![0; sig.r2]);
        g.dzbar = alpha.clone();
        out.push((g, FamilySide::Plus));
    }
    for beta in &betas {
        let mut g =
            KostantMonomial::section_only(sig, vec![], vec![0; sig.r2], vec![0; sig.r2]);
        g.dz = vec![true; sig.r2];
        g.dzbar = beta.clone();
        out.push((g, FamilySide::Minus));
    }
    out
}

fn closed_form_invariant(sig: Signature) -> Vec<(KostantMonomial, FamilySide)> {
    // zero weight with no real place: (dz)^α ∧ (dz̄)^β with α_j + β_j constant
    let r2 = sig.r2;
    let mut out = Vec::new();
    for bits in 0..(1u32 << (2 * r2)) {
        let alpha: Vec<bool> = (0..r2).map(|j| bits >> j & 1 == 1).collect();
        let beta: Vec<bool> = (0..r2).map(|j| bits >> (r2 + j) & 1 == 1).collect();
        let c0 = alpha[0] as u32 + beta[0] as u32;
        if (0..r2).any(|j| alpha[j] as u32 + beta[j] as u32 != c0) {
            continue;
        }
        let mut g = KostantMonomial::section_only(sig, vec![], vec![0; r2], vec![0; r2]);
        g.dz = alpha;
        g.dzbar = beta;
        out.push((g, FamilySide::Unsplit));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_examples() {
        // trivial weight: zero vector
        let sig = Signature::new(2, 1);
        let w = Weight::zero(sig);
        let m = KostantMonomial::section_only(sig, vec![0, 0], vec![0], vec![0]);
        assert!(line_bundle_chars(sig, &w, &m).unwrap().is_zero());

        // r1 = 2, m = (1,1), top section: flat-trivial line
        let sig = Signature::new(2, 0);
        let w = Weight::new(vec![1, 1], vec![], vec![]);
        let m = KostantMonomial::section_only(sig, vec![1, 1], vec![], vec![]);
        assert!(line_bundle_chars(sig, &w, &m).unwrap().is_zero());

        // r1 = 2, m = (1,0): du_2 coefficient -1/2
        let w = Weight::new(vec![1, 0], vec![], vec![]);
        let m = KostantMonomial::section_only(sig, vec![1, 0], vec![], vec![]);
        let charv = line_bundle_chars(sig, &w, &m).unwrap();
        assert_eq!(charv.0, vec![rat(-1, 2)]);

        // a non-pattern monomial is rejected
        let m = KostantMonomial::section_only(sig, vec![1, 1], vec![], vec![]);
        let w2 = Weight::new(vec![2, 2], vec![], vec![]);
        assert!(matches!(
            line_bundle_chars(sig, &w2, &m),
            Err(KostantError::NotAKernelMonomial)
        ));
    }

    #[test]
    fn kernel_trivial_when_m_unequal() {
        let sig = Signature::new(2, 1);
        let w = Weight::new(vec![1, 2], vec![0], vec![0]);
        let k = ker_eth_s(sig, &w).unwrap();
        assert!(!k.nontrivial());
    }

    #[test]
    fn kernel_trivial_weight() {
        let sig = Signature::new(2, 1);
        let k = ker_eth_s(sig, &Weight::zero(sig)).unwrap();
        assert_eq!(k.generators.len(), 2);
        assert_eq!(k.total_dim(), 8); // 2 * 2^{r1+r2-1}
    }

    #[test]
    fn kernel_complex_only_forced() {
        // (0,2), n = (3,1), nbar = 0: alpha and beta uniquely determined
        let sig = Signature::new(0, 2);
        let w = Weight::new(vec![], vec![3, 1], vec![0, 0]);
        let k = ker_eth_s(sig, &w).unwrap();
        assert_eq!(k.generators.len(), 2);
        assert_eq!(k.total_dim(), 4); // 2 * 2^{r2-1}
        let plus: Vec<_> = k
            .generators
            .iter()
            .filter(|(_, s)| *s == FamilySide::Plus)
            .collect();
        assert_eq!(plus.len(), 1);
        assert_eq!(plus[0].0.dzbar, vec![true, false]);
    }

    #[test]
    fn kernel_unsupported_nbar() {
        let sig = Signature::new(0, 2);
        let w = Weight::new(vec![], vec![1, 1], vec![1, 0]);
        assert!(matches!(ker_eth_s(sig, &w), Err(KostantError::UnsupportedSignatureWeight)));
    }

    #[test]
    fn kernel_invariant_case() {
        // r1 = 0, zero weight: 2 + 2^{r2} generators
        let sig = Signature::new(0, 2);
        let k = ker_eth_s(sig, &Weight::zero(sig)).unwrap();
        assert_eq!(k.generators.len(), 2 + 4);
        assert!(k.generators.iter().all(|(_, s)| *s == FamilySide::Unsplit));
    }
}

//! Torsion-growth reports: acyclic-weight construction by restriction of
//! scalars, the sign and fundamental-rank gates, predicted lower bounds per
//! level, and the boundary basis ledger backing the torsion bookkeeping.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::congruence::NegligibilityRow;
use crate::kostant::{
    acyclicity_status, boundary_cohomology, AcyclicityStatus, KostantError, Signature, Weight,
};

#[derive(Debug, Clone)]
pub enum GrowthError {
    NoComplexPlace,
    RepeatedEntry(Vec<u32>),
    WrongSign { t2: BigRational, r1: usize },
    ConstituentNotAcyclic(Weight),
    TrivialCohomology,
    Kostant(KostantError),
}

impl fmt::Display for GrowthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthError::NoComplexPlace => write!(f, "acyclic weights need at least one complex place"),
            GrowthError::RepeatedEntry(d) => write!(f, "weight tuple {d:?} has repeated entries"),
            GrowthError::WrongSign { t2, r1 } => {
                write!(f, "sign gate violated: (-1)^(r1+1) t2 must be positive, got t2 = {t2}, r1 = {r1}")
            }
            GrowthError::ConstituentNotAcyclic(w) => {
                write!(f, "constituent {w} fails the acyclicity conditions")
            }
            GrowthError::TrivialCohomology => write!(f, "boundary cohomology is trivial"),
            GrowthError::Kostant(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for GrowthError {}

impl From<KostantError> for GrowthError {
    fn from(e: KostantError) -> Self {
        GrowthError::Kostant(e)
    }
}

/// A weight tuple over the embeddings of the field into a splitting field,
/// with the permutation action used to generate constituents. The full
/// symmetric group is the conservative default.
#[derive(Debug, Clone)]
pub struct AcyclicWeightSpec {
    pub d_sigma: Vec<u32>,
    pub galois_full_symmetric: bool,
    pub constituents: Vec<Weight>,
}

/// Permutations of the embedding slots given as reorderings; the default
/// action is all of them.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    heap_permutations(&mut idx, n, &mut out);
    out
}

fn heap_permutations(arr: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(arr.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(arr, k - 1, out);
        if k % 2 == 0 {
            arr.swap(i, k - 1);
        } else {
            arr.swap(0, k - 1);
        }
    }
}

fn constituent(sig: Signature, d_sigma: &[u32], perm: &[usize]) -> Weight {
    let m: Vec<u32> = (0..sig.r1).map(|i| d_sigma[perm[i]]).collect();
    let n: Vec<u32> = (0..sig.r2).map(|j| d_sigma[perm[sig.r1 + 2 * j]]).collect();
    let nbar: Vec<u32> = (0..sig.r2).map(|j| d_sigma[perm[sig.r1 + 2 * j + 1]]).collect();
    Weight::new(m, n, nbar)
}

/// All weight tuples with pairwise-distinct entries ≤ max_entry, together
/// with the constituent multiset produced by the permutation orbit on
/// embedding assignments. Every constituent must have pairwise-distinct m
/// and n_j ≠ n̄_j throughout.
pub fn generate_acyclic_weights(
    sig: Signature,
    max_entry: u32,
    galois_permutations: Option<&[Vec<usize>]>,
) -> Result<Vec<AcyclicWeightSpec>, GrowthError> {
    if sig.r2 == 0 {
        return Err(GrowthError::NoComplexPlace);
    }
    let slots = sig.degree();
    let perms_default;
    let perms: &[Vec<usize>] = match galois_permutations {
        Some(p) => p,
        None => {
            perms_default = permutations(slots);
            &perms_default
        }
    };
    let mut out = Vec::new();
    let mut tuple = vec![0u32; slots];
    'outer: loop {
        if tuple.iter().collect::<std::collections::HashSet<_>>().len() == slots {
            let mut constituents = Vec::with_capacity(perms.len());
            for perm in perms {
                let w = constituent(sig, &tuple, perm);
                // distinct entries guarantee both conditions; verified anyway
                if w.m.iter().collect::<std::collections::HashSet<_>>().len() != w.m.len() {
                    return Err(GrowthError::ConstituentNotAcyclic(w));
                }
                if w.n.iter().zip(&w.nbar).any(|(a, b)| a == b) {
                    return Err(GrowthError::ConstituentNotAcyclic(w));
                }
                constituents.push(w);
            }
            out.push(AcyclicWeightSpec {
                d_sigma: tuple.clone(),
                galois_full_symmetric: galois_permutations.is_none(),
                constituents,
            });
        }
        let mut i = 0;
        loop {
            if i == slots {
                break 'outer;
            }
            tuple[i] += 1;
            if tuple[i] <= max_entry {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
    Ok(out)
}

/// Validate a single tuple for distinctness.
pub fn validate_weight_tuple(d_sigma: &[u32]) -> Result<(), GrowthError> {
    let set: std::collections::HashSet<_> = d_sigma.iter().collect();
    if set.len() != d_sigma.len() {
        return Err(GrowthError::RepeatedEntry(d_sigma.to_vec()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcyclicMode {
    Acyclic,
    SelfDualLattice,
}

#[derive(Debug, Clone)]
pub struct GrowthLevelRow {
    pub level_norm: BigInt,
    pub index: BigInt,
    pub cusp_count: u64,
    pub predicted_partial: BigRational,
    /// measured Σ_{q + r1 even} log |H^q_tor| / index, when tables are given
    pub measured: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub r1: usize,
    pub r2: usize,
    pub mode: AcyclicMode,
    pub t2: BigRational,
    pub vol1: BigRational,
    pub t2_provenance: String,
    pub vol_provenance: String,
    /// liminf lower bound: zero when the fundamental rank is not one
    pub bound: BigRational,
    pub fundamental_rank_ok: bool,
    pub levels: Vec<GrowthLevelRow>,
    pub negligibility: Vec<NegligibilityRow>,
}

/// Assemble the growth lower bound: the sign gate is enforced, the
/// fundamental-rank condition r2 = 1 zeroes the bound rather than erroring,
/// and the arithmetic stays in exact rationals.
#[allow(clippy::too_many_arguments)]
pub fn growth_lower_bound(
    sig: Signature,
    mode: AcyclicMode,
    t2: BigRational,
    vol1: BigRational,
    t2_provenance: &str,
    vol_provenance: &str,
    levels: Vec<(BigInt, BigInt, u64, Option<f64>)>,
    negligibility: Vec<NegligibilityRow>,
) -> Result<GrowthReport, GrowthError> {
    let sign_ok = if sig.r1 % 2 == 0 { t2.is_negative() } else { t2.is_positive() };
    if !sign_ok || t2.is_zero() {
        return Err(GrowthError::WrongSign { t2, r1: sig.r1 });
    }
    let fundamental_rank_ok = sig.r2 == 1;
    let bound = if !fundamental_rank_ok {
        BigRational::zero()
    } else {
        let signed_t2 = if sig.r1 % 2 == 0 { -t2.clone() } else { t2.clone() };
        let base = &signed_t2 * &vol1;
        match mode {
            AcyclicMode::Acyclic => &base * BigRational::from(BigInt::from(2)),
            AcyclicMode::SelfDualLattice => base,
        }
    };
    let rows = levels
        .into_iter()
        .map(|(level_norm, index, cusp_count, measured)| GrowthLevelRow {
            predicted_partial: &bound * BigRational::from(index.clone()),
            level_norm,
            index,
            cusp_count,
            measured,
        })
        .collect();
    Ok(GrowthReport {
        r1: sig.r1,
        r2: sig.r2,
        mode,
        t2,
        vol1,
        t2_provenance: t2_provenance.to_string(),
        vol_provenance: vol_provenance.to_string(),
        bound,
        fundamental_rank_ok,
        levels: rows,
        negligibility,
    })
}

/// Measured torsion sum Σ_{q + r1 even} log |H^q_tor| / index for one level.
pub fn measured_torsion_sum(
    table: &crate::integral::IntegralCohomologyTable,
    r1: usize,
    index: &BigInt,
) -> f64 {
    let mut acc = 0.0f64;
    for (q, d) in table.degrees.iter().enumerate() {
        if (q + r1) % 2 == 0 {
            let t = d.torsion_order();
            acc += t.to_f64().map(f64::ln).unwrap_or(f64::NAN);
        }
    }
    acc / index.to_f64().unwrap_or(f64::NAN)
}

/// Basis bookkeeping for the boundary: the ± dimensions, the interior
/// basis convention, and the determinant-one / unit-torsion notes that the
/// torsion reports cite.
#[derive(Debug, Clone)]
pub struct BoundaryBasisLedger {
    pub plus_total: u64,
    pub minus_total: u64,
    pub plus_dims: Vec<u64>,
    pub minus_dims: Vec<u64>,
    pub interior_basis_convention: String,
    pub pairing_note: String,
    pub change_of_basis_note: String,
    pub boundary_torsion_note: String,
}

pub fn boundary_basis_ledger(sig: Signature, weight: &Weight) -> Result<BoundaryBasisLedger, GrowthError> {
    let b = boundary_cohomology(sig, weight)?;
    if !b.nontrivial {
        return Err(GrowthError::TrivialCohomology);
    }
    Ok(BoundaryBasisLedger {
        plus_total: b.plus.iter().sum(),
        minus_total: b.minus.iter().sum(),
        plus_dims: b.plus,
        minus_dims: b.minus,
        interior_basis_convention:
            "interior basis mu_X = (mu_{X,(2)}, mu_{X,inf}) with pr_- iota* mu_{X,inf} = mu_-"
                .into(),
        pairing_note: "mu_+ chosen Poincare dual to mu_-; relative basis mu_{X,dX} = d(mu_+)".into(),
        change_of_basis_note:
            "replacing (mu_+, iota* mu_X) by (mu_+, mu_-) has determinant one".into(),
        boundary_torsion_note:
            "self-dual orthonormal boundary basis gives boundary torsion one".into(),
    })
}

/// Acyclicity audit of a weight spec: every constituent must sit in the
/// L2-acyclic boundary regime, and with a real place the full cohomology of
/// the interior vanishes as well.
pub fn audit_spec(sig: Signature, spec: &AcyclicWeightSpec) -> Result<bool, GrowthError> {
    let mut fully_acyclic = sig.r1 > 0;
    for w in &spec.constituents {
        match acyclicity_status(sig, w) {
            AcyclicityStatus::L2AcyclicAndBoundary => {}
            _ => return Ok(false),
        }
        if sig.r1 > 0 {
            let b = boundary_cohomology(sig, w)?;
            if b.nontrivial {
                fully_acyclic = false;
            }
        }
    }
    Ok(fully_acyclic || sig.r1 == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn weight_generation() {
        let sig = Signature::new(2, 1);
        let specs = generate_acyclic_weights(sig, 3, None).unwrap();
        // tuples with pairwise distinct entries from {0..3}^4: 4! of them
        assert_eq!(specs.len(), 24);
        for spec in &specs {
            assert_eq!(spec.constituents.len(), 24);
            assert!(spec.galois_full_symmetric);
            for w in &spec.constituents {
                assert!(w.m[0] != w.m[1]);
                assert!(w.n[0] != w.nbar[0]);
            }
        }
        // repeated entries rejected
        assert!(validate_weight_tuple(&[1, 1, 2, 3]).is_err());
        assert!(validate_weight_tuple(&[0, 1, 2, 3]).is_ok());
        // no complex place
        assert!(matches!(
            generate_acyclic_weights(Signature::new(2, 0), 3, None),
            Err(GrowthError::NoComplexPlace)
        ));
    }

    #[test]
    fn constituents_are_l2_acyclic() {
        let sig = Signature::new(2, 1);
        let specs = generate_acyclic_weights(sig, 3, None).unwrap();
        for spec in &specs {
            for w in &spec.constituents {
                assert_eq!(acyclicity_status(sig, w), AcyclicityStatus::L2AcyclicAndBoundary);
            }
            assert!(audit_spec(sig, spec).unwrap());
        }
    }

    #[test]
    fn bound_arithmetic() {
        let sig = Signature::new(2, 1);
        // r1 = 2, t2 = -1/20, vol1 = 10, acyclic: bound = 2 (1/20) 10 = 1
        let r = growth_lower_bound(
            sig,
            AcyclicMode::Acyclic,
            rat(-1, 20),
            rat(10, 1),
            "test",
            "test",
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(r.bound, rat(1, 1));
        let r = growth_lower_bound(
            sig,
            AcyclicMode::SelfDualLattice,
            rat(-1, 20),
            rat(10, 1),
            "test",
            "test",
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(r.bound, rat(1, 2));
        // r2 = 2: bound forced to zero, reported not raised
        let r = growth_lower_bound(
            Signature::new(2, 2),
            AcyclicMode::Acyclic,
            rat(-1, 20),
            rat(10, 1),
            "test",
            "test",
            vec![],
            vec![],
        )
        .unwrap();
        assert!(!r.fundamental_rank_ok);
        assert_eq!(r.bound, rat(0, 1));
        // wrong sign rejected
        assert!(matches!(
            growth_lower_bound(
                sig,
                AcyclicMode::Acyclic,
                rat(1, 20),
                rat(10, 1),
                "t",
                "v",
                vec![],
                vec![]
            ),
            Err(GrowthError::WrongSign { .. })
        ));
    }

    #[test]
    fn ledger_for_trivial_weight() {
        let sig = Signature::new(2, 1);
        let ledger = boundary_basis_ledger(sig, &Weight::zero(sig)).unwrap();
        assert_eq!(ledger.plus_total, 4);
        assert_eq!(ledger.minus_total, 4);
        // trivial-cohomology weights are rejected
        assert!(matches!(
            boundary_basis_ledger(sig, &Weight::new(vec![1, 2], vec![0], vec![0])),
            Err(GrowthError::TrivialCohomology)
        ));
    }
}

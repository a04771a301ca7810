//! Torsion-order bookkeeping: the alternating product of torsion orders,
//! covolume data for free parts, and the evaluation of the relative
//! torsion bound with its covolume normalizations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::smith::IntegralCohomologyTable;
use super::split::PmSplit;
use super::IntegralError;

/// τ² = ∏_q |H^q_tor|^{(−1)^{q+1}}, exact.
pub fn cheeger_torsion(table: &IntegralCohomologyTable) -> BigRational {
    let mut acc = BigRational::one();
    for (q, d) in table.degrees.iter().enumerate() {
        let t = BigRational::from(d.torsion_order());
        if q % 2 == 1 {
            acc *= t;
        } else {
            acc /= t;
        }
    }
    acc
}

/// Covolume of one graded piece of the free cohomology, with provenance.
#[derive(Debug, Clone)]
pub struct CovolumeEntry {
    pub degree: usize,
    pub plus_part: bool,
    pub value: f64,
    pub provenance: String,
}

#[derive(Debug, Clone, Default)]
pub struct CovolumeData {
    pub entries: Vec<CovolumeEntry>,
}

impl CovolumeData {
    pub fn trivial(top: usize) -> CovolumeData {
        let mut entries = Vec::new();
        for degree in 0..=top {
            for plus_part in [true, false] {
                entries.push(CovolumeEntry {
                    degree,
                    plus_part,
                    value: 1.0,
                    provenance: "unit covolume".into(),
                });
            }
        }
        CovolumeData { entries }
    }

    pub fn get(&self, degree: usize, plus_part: bool) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.degree == degree && e.plus_part == plus_part)
            .map(|e| e.value)
    }

    fn validate(&self) -> Result<(), IntegralError> {
        if self.entries.iter().any(|e| !(e.value > 0.0)) {
            return Err(IntegralError::MissingData("covolumes must be positive".into()));
        }
        Ok(())
    }
}

/// Covolume of a lattice from an exact Gram matrix: sqrt(det Gram).
pub fn covolume_from_gram(gram: &[Vec<BigRational>]) -> Result<f64, IntegralError> {
    let n = gram.len();
    let mut num = crate::linalg::zeros(n, n);
    let mut den = BigInt::one();
    for row in gram {
        for x in row {
            den = num_integer::Integer::lcm(&den, x.denom());
        }
    }
    for i in 0..n {
        for j in 0..n {
            num[i][j] = gram[i][j].numer() * (&den / gram[i][j].denom());
        }
    }
    let det_scaled = crate::linalg::det(&num);
    if det_scaled.is_negative() {
        return Err(IntegralError::MissingData("Gram matrix must be positive".into()));
    }
    let det = BigRational::new(det_scaled, den.pow(n as u32));
    Ok(det.to_f64().map(f64::sqrt).unwrap_or(f64::NAN))
}

/// Evaluation of the relative torsion bound: both sides as an exact
/// rational torsion factor times a covolume float.
#[derive(Debug, Clone)]
pub struct TorsionBoundReport {
    pub lhs_rational: BigRational,
    pub lhs_value: f64,
    pub rhs_rational: BigRational,
    pub rhs_value: f64,
    pub slack: f64,
    pub holds: bool,
    /// estim7 covolume scale factors per degree when an index is supplied
    pub covolume_scales: Vec<(usize, f64)>,
}

/// Evaluate the torsion inequality for a (pair, absolute) table pair: the
/// relative torsion (with covolume normalizations and unit lattice indices)
/// against the even-degree torsion product over the plus-part covolumes.
/// Torsion orders of degrees missing from the pair table count as 1. When
/// the absolute table is supplied, its torsion orders must match the pair
/// table under the degree duality q ↔ 2r1 + 4 − q.
pub fn relative_torsion_bound(
    pair_table: &IntegralCohomologyTable,
    absolute_table: Option<&IntegralCohomologyTable>,
    covolumes: &CovolumeData,
    r1: usize,
    split: Option<&PmSplit>,
    parabolic_index: Option<&BigInt>,
) -> Result<TorsionBoundReport, IntegralError> {
    covolumes.validate()?;
    if let Some(abs) = absolute_table {
        let dual = 2 * r1 + 4;
        for (q, d) in abs.degrees.iter().enumerate() {
            if q > dual {
                continue;
            }
            let partner = dual - q;
            let pair_order = pair_table
                .degrees
                .get(partner)
                .map(|p| p.torsion_order())
                .unwrap_or_else(BigInt::one);
            if d.torsion_order() != pair_order {
                return Err(IntegralError::MissingData(format!(
                    "torsion orders disagree under duality: degree {q} of the space vs degree {partner} of the pair"
                )));
            }
        }
    }
    let top = pair_table.degrees.len().saturating_sub(1);
    let sign_r1: i64 = if r1 % 2 == 0 { -1 } else { 1 };
    // left side: [∏ (T_q / V_q)^{(−1)^{q+1}}]^{(−1)^{r1+1}} with V_q the
    // covolume of the (q−1)-st plus part and unit lattice indices
    let mut lhs_rational = BigRational::one();
    let mut lhs_cov = 1.0f64;
    for (q, d) in pair_table.degrees.iter().enumerate() {
        let t = BigRational::from(d.torsion_order());
        let exp = if q % 2 == 1 { 1i64 } else { -1i64 } * sign_r1;
        if exp > 0 {
            lhs_rational *= t;
        } else {
            lhs_rational /= t;
        }
        let v = if q == 0 { 1.0 } else { covolumes.get(q - 1, true).unwrap_or(1.0) };
        lhs_cov *= v.powi(-exp as i32);
    }
    // right side: ∏_{q + r1 even} T_q² / ∏_q V_{q−1}^{(−1)^{q+r1}}
    let mut rhs_rational = BigRational::one();
    let mut rhs_cov = 1.0f64;
    for (q, d) in pair_table.degrees.iter().enumerate() {
        if (q + r1) % 2 == 0 {
            let t = BigRational::from(d.torsion_order());
            rhs_rational *= &t * &t;
        }
        let v = if q == 0 { 1.0 } else { covolumes.get(q - 1, true).unwrap_or(1.0) };
        let exp = if (q + r1) % 2 == 0 { 1i32 } else { -1i32 };
        rhs_cov *= v.powi(-exp);
    }
    let lhs_value = lhs_rational.to_f64().unwrap_or(f64::NAN) * lhs_cov;
    let rhs_value = rhs_rational.to_f64().unwrap_or(f64::NAN) * rhs_cov;
    let slack = rhs_value - lhs_value;
    // estim7: covolume upper bounds scale by index^{b/2}
    let mut covolume_scales = Vec::new();
    if let (Some(split), Some(index)) = (split, parabolic_index) {
        let idx = index.to_f64().unwrap_or(f64::NAN);
        for q in 0..=top.min(split.plus.len().saturating_sub(1)) {
            let b = split.plus[q] as f64;
            covolume_scales.push((q, idx.powf(b / 2.0)));
        }
    }
    Ok(TorsionBoundReport {
        lhs_rational,
        lhs_value,
        rhs_rational,
        rhs_value,
        slack,
        holds: lhs_value <= rhs_value + 1e-9,
        covolume_scales,
    })
}

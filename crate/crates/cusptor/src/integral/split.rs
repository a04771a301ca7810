//! The ± splitting of free boundary cohomology by fiber degree, available
//! when there is exactly one complex place and at least one real place:
//! the minus part consists of classes representable in fiber degree at
//! least r1 + 1, the plus part of classes of fiber degree at most 1.

use super::smith::IntegralCohomologyTable;
use super::IntegralError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmSplit {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

pub fn pm_split_integral(
    table: &IntegralCohomologyTable,
    r1: usize,
    r2: usize,
) -> Result<PmSplit, IntegralError> {
    if r2 != 1 || r1 == 0 {
        return Err(IntegralError::UnsupportedSignature { r1, r2 });
    }
    let mut plus = Vec::with_capacity(table.degrees.len());
    let mut minus = Vec::with_capacity(table.degrees.len());
    for d in &table.degrees {
        let total = d.free_rank;
        let rank_at = |p: usize| -> usize {
            if p < d.fiber_ranks.len() {
                d.fiber_ranks[p]
            } else {
                0
            }
        };
        // plus: fiber degree ≤ r2 = 1; minus: fiber degree ≥ r1 + r2
        let plus_rank = total - rank_at(2);
        let minus_rank = rank_at(r1 + 1);
        if plus_rank + minus_rank != total {
            return Err(IntegralError::MissingData(format!(
                "free classes of intermediate fiber degree: total {total}, plus {plus_rank}, minus {minus_rank}"
            )));
        }
        plus.push(plus_rank);
        minus.push(minus_rank);
    }
    Ok(PmSplit { plus, minus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::integral::complex::total_complex;
    use crate::integral::rep::{build_rep_symd, trivial_rep};
    use crate::integral::smith::smith_cohomology;
    use crate::numberfield::DEFAULT_ENUMERATION_BOUND as BOUND;

    #[test]
    fn r2_gate() {
        let f = fixtures::gaussian_field();
        let rep = build_rep_symd(&f, 0, 0, &f.unit_ideal(), BOUND).unwrap();
        let table = smith_cohomology(&total_complex(&rep).unwrap());
        assert!(matches!(
            pm_split_integral(&table, 0, 1),
            Err(IntegralError::UnsupportedSignature { .. })
        ));
        assert!(matches!(
            pm_split_integral(&table, 2, 2),
            Err(IntegralError::UnsupportedSignature { .. })
        ));
    }

    #[test]
    fn quartic_trivial_split() {
        // (r1, r2) = (2, 1), trivial coefficients: plus and minus free
        // ranks each total 2^{r1+r2-1} = 4
        let f = fixtures::quartic_field();
        let rep = trivial_rep(&f, &f.unit_ideal(), BOUND).unwrap();
        let table = smith_cohomology(&total_complex(&rep).unwrap());
        let split = pm_split_integral(&table, 2, 1).unwrap();
        assert_eq!(split.plus.iter().sum::<usize>(), 4);
        assert_eq!(split.minus.iter().sum::<usize>(), 4);
        // additivity per degree
        for (q, d) in table.degrees.iter().enumerate() {
            assert_eq!(split.plus[q] + split.minus[q], d.free_rank);
        }
        // duality: plus rank in degree q = minus rank in degree 2 r1 + 2 − q
        let top = 2 * 2 + 2;
        for q in 0..=top {
            assert_eq!(split.plus[q], split.minus[top - q], "degree {q}");
        }
    }
}

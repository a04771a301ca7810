//! Integral lattice representations of the polycyclic cusp stabilizer:
//! commuting unipotent actions of the translation lattice, commuting unit
//! actions, and the conjugation data tying them together.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::linalg::{self, IMat};
use crate::numberfield::{residue_ring, FieldError, IdealHnf, NumberFieldData};

use super::IntegralError;

/// A Γ_η-stable lattice presented by matrices: the translation generators
/// T_1..T_{d_K}, the unit generators U_1..U_r, and for each unit the
/// integer matrix of the induced multiplication on the translation lattice
/// in its Z-basis (columns are images of basis vectors).
#[derive(Debug, Clone)]
pub struct LatticeRep {
    pub rank: usize,
    pub fiber_gens: Vec<IMat>,
    pub base_gens: Vec<IMat>,
    pub conj_data: Vec<IMat>,
}

impl LatticeRep {
    pub fn dim_fiber(&self) -> usize {
        self.fiber_gens.len()
    }

    pub fn dim_base(&self) -> usize {
        self.base_gens.len()
    }

    /// Check every structural invariant; rejection is total.
    pub fn validate(&self) -> Result<(), IntegralError> {
        let r = self.rank;
        let square = |m: &IMat| m.len() == r && m.iter().all(|row| row.len() == r);
        if !self.fiber_gens.iter().chain(&self.base_gens).all(square) {
            return Err(IntegralError::Malformed(format!("generators must be {r}x{r}")));
        }
        let d = self.fiber_gens.len();
        for c in &self.conj_data {
            if c.len() != d || c.iter().any(|row| row.len() != d) {
                return Err(IntegralError::Malformed(format!("conj matrices must be {d}x{d}")));
            }
        }
        if self.conj_data.len() != self.base_gens.len() {
            return Err(IntegralError::Malformed("one conj matrix per unit generator".into()));
        }
        for (i, g) in self.fiber_gens.iter().chain(&self.base_gens).enumerate() {
            if !linalg::det(g).abs().is_one() {
                return Err(IntegralError::NonUnimodular(i));
            }
        }
        for c in &self.conj_data {
            if !linalg::det(c).abs().is_one() {
                return Err(IntegralError::Malformed("conj matrix must be in GL(d, Z)".into()));
            }
        }
        for a in 0..d {
            for b in a + 1..d {
                if linalg::mat_mul(&self.fiber_gens[a], &self.fiber_gens[b])
                    != linalg::mat_mul(&self.fiber_gens[b], &self.fiber_gens[a])
                {
                    return Err(IntegralError::NonCommuting(format!(
                        "translation generators {a} and {b}"
                    )));
                }
            }
        }
        for a in 0..self.base_gens.len() {
            for b in a + 1..self.base_gens.len() {
                if linalg::mat_mul(&self.base_gens[a], &self.base_gens[b])
                    != linalg::mat_mul(&self.base_gens[b], &self.base_gens[a])
                {
                    return Err(IntegralError::NonCommuting(format!(
                        "unit generators {a} and {b}"
                    )));
                }
            }
        }
        // compatibility: U_a T_i U_a^{-1} = prod_j T_j^{c_{ji}} (columns of
        // the conj matrix are the exponent vectors of the images)
        for (a, u) in self.base_gens.iter().enumerate() {
            let uinv = linalg::unimodular_inverse(u);
            for i in 0..d {
                let lhs = linalg::mat_mul(&linalg::mat_mul(u, &self.fiber_gens[i]), &uinv);
                let mut rhs = linalg::identity(self.rank);
                for (j, t) in self.fiber_gens.iter().enumerate() {
                    let e = self.conj_data[a][j][i].clone();
                    rhs = linalg::mat_mul(&rhs, &int_matrix_pow(t, &e));
                }
                if lhs != rhs {
                    return Err(IntegralError::ConjugationMismatch { unit: a, translation: i });
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn int_matrix_pow(m: &IMat, e: &BigInt) -> IMat {
    let base = if e.is_negative() { linalg::unimodular_inverse(m) } else { m.clone() };
    let mut exp = e.abs();
    let mut acc = linalg::identity(m.len());
    let mut cur = base;
    let two = BigInt::from(2);
    while !exp.is_zero() {
        let (q, r) = num_integer::Integer::div_rem(&exp, &two);
        if r.is_one() {
            acc = linalg::mat_mul(&acc, &cur);
        }
        cur = linalg::mat_mul(&cur, &cur);
        exp = q;
    }
    acc
}

/// Build the symmetric-power lattice Sym^d(O_K²) at a principal cusp of a
/// given level: translations act unipotently through the level ideal, the
/// units fixing the level act diagonally, and each unit multiplies the
/// translation lattice by its square.
pub fn build_rep_symd(
    field: &NumberFieldData,
    d: u32,
    class_index: usize,
    level: &IdealHnf,
    enumeration_bound: u64,
) -> Result<LatticeRep, IntegralError> {
    let class_rep = field
        .class_group_ideals
        .get(class_index)
        .ok_or_else(|| IntegralError::MissingData("ideal class index out of range".into()))?;
    if !class_rep.is_unit_ideal() {
        return Err(IntegralError::MissingData(
            "non-principal cusp classes need an ingested translation lattice".into(),
        ));
    }
    let dk = field.degree;
    let rank = dk
        .checked_mul(d as usize + 1)
        .ok_or(IntegralError::RankOverflow)?;
    if rank > 4096 {
        return Err(IntegralError::RankOverflow);
    }
    // translation lattice basis: columns of the level HNF
    let lattice_basis: Vec<Vec<BigInt>> = (0..dk)
        .map(|j| (0..dk).map(|i| level.matrix[i][j].clone()).collect())
        .collect();
    let fiber_gens: Vec<IMat> =
        lattice_basis.iter().map(|w| symd_unipotent(field, d, w)).collect();
    // unit generators of {λ ∈ O_K^* : λ ≡ 1 mod level}, modulo torsion
    let unit_elements = congruence_unit_basis(field, level, enumeration_bound)?;
    let mut base_gens = Vec::new();
    let mut conj_data = Vec::new();
    for lambda in &unit_elements {
        base_gens.push(symd_diagonal(field, d, lambda));
        let lambda2 = field.mul(lambda, lambda);
        conj_data.push(lattice_mult_matrix(field, level, &lambda2)?);
    }
    let rep = LatticeRep { rank, fiber_gens, base_gens, conj_data };
    rep.validate()?;
    Ok(rep)
}

/// Matrix of (1, w; 0, 1) on Sym^d(O²): basis ω_t X^{d−j} Y^j ordered by j
/// then t. Substitution Y ↦ wX + Y expands binomially.
fn symd_unipotent(field: &NumberFieldData, d: u32, w: &[BigInt]) -> IMat {
    let dk = field.degree;
    let rank = dk * (d as usize + 1);
    let mut m = linalg::zeros(rank, rank);
    // powers of w
    let mut wpow: Vec<Vec<BigInt>> = vec![field.one()];
    for _ in 0..d {
        let last = wpow.last().unwrap().clone();
        wpow.push(field.mul(&last, w));
    }
    for j in 0..=d as usize {
        for s in 0..=j {
            let coef = BigInt::from(binom_u64(j, s));
            let mul = field.mul_matrix(&wpow[s]);
            // block (j - s, j): X^{d-j}(wX+Y)^j contributes C(j,s) w^s X^{d-j+s} Y^{j-s}
            for t_in in 0..dk {
                for t_out in 0..dk {
                    if mul[t_out][t_in].is_zero() {
                        continue;
                    }
                    m[(j - s) * dk + t_out][j * dk + t_in] = &coef * &mul[t_out][t_in];
                }
            }
        }
    }
    m
}

/// Matrix of diag(λ, λ^{-1}) on Sym^d(O²): multiplication by λ^{d−2j} on
/// the j-th block.
fn symd_diagonal(field: &NumberFieldData, d: u32, lambda: &[BigInt]) -> IMat {
    let dk = field.degree;
    let rank = dk * (d as usize + 1);
    let inv = field.unit_inverse(lambda);
    let mut m = linalg::zeros(rank, rank);
    for j in 0..=d as usize {
        let e = d as i64 - 2 * j as i64;
        let factor = if e >= 0 {
            field.pow(lambda, e as u64)
        } else {
            field.pow(&inv, (-e) as u64)
        };
        let mul = field.mul_matrix(&factor);
        for t_in in 0..dk {
            for t_out in 0..dk {
                m[j * dk + t_out][j * dk + t_in] = mul[t_out][t_in].clone();
            }
        }
    }
    m
}

/// Matrix of multiplication by an element on an ideal lattice, in the HNF
/// basis of the lattice. Requires the element to preserve the lattice.
pub fn lattice_mult_matrix(
    field: &NumberFieldData,
    lattice: &IdealHnf,
    element: &[BigInt],
) -> Result<IMat, IntegralError> {
    let dk = field.degree;
    let mut m = linalg::zeros(dk, dk);
    for j in 0..dk {
        let basis_vec: Vec<BigInt> = (0..dk).map(|i| lattice.matrix[i][j].clone()).collect();
        let image = field.mul(element, &basis_vec);
        let coords = linalg::solve_upper_triangular(&lattice.matrix, &image).ok_or_else(|| {
            IntegralError::MissingData("element does not preserve the lattice".into())
        })?;
        for i in 0..dk {
            m[i][j] = coords[i].clone();
        }
    }
    Ok(m)
}

/// Exponent-lattice basis for the units congruent to 1 modulo the level,
/// as actual unit elements: a Z-basis of the kernel of
/// Z^r → (O/n)^* / (torsion image), evaluated on the fundamental units.
fn congruence_unit_basis(
    field: &NumberFieldData,
    level: &IdealHnf,
    bound: u64,
) -> Result<Vec<Vec<BigInt>>, IntegralError> {
    let r = field.unit_generators.len();
    if r == 0 {
        return Ok(Vec::new());
    }
    if level.is_unit_ideal() {
        return Ok(field.unit_generators.clone());
    }
    let ring = residue_ring(field, level, bound).map_err(IntegralError::Field)?;
    let torsion = ring.unit_subgroup(&[ring.index_of(&field.torsion_generator)]);
    let in_torsion = |x: u32| torsion.binary_search(&x).is_ok();
    // incremental kernel: maintain known elements of the subgroup generated
    // so far (mod torsion) with one exponent vector each
    let mut reps: Vec<(u32, Vec<BigInt>)> = vec![(ring.one, vec![BigInt::zero(); r])];
    let mut kernel_cols: Vec<Vec<BigInt>> = Vec::new();
    for (i, unit) in field.unit_generators.iter().enumerate() {
        let g = ring.index_of(unit);
        // order of g relative to the current subgroup (mod torsion)
        let mut power = g;
        let mut s = 1u64;
        let (order, base_exp) = loop {
            let hit = reps.iter().find_map(|(x, e)| {
                let xinv = ring.inverse(*x).expect("subgroup elements are units");
                if in_torsion(ring.mul(power, xinv)) {
                    Some(e.clone())
                } else {
                    None
                }
            });
            if let Some(e) = hit {
                break (s, e);
            }
            power = ring.mul(power, g);
            s += 1;
            if s > ring.cardinality {
                return Err(IntegralError::MissingData(
                    "unit order exceeds the residue ring".into(),
                ));
            }
        };
        // kernel relation: g^order = (previous generators)^{base_exp} (mod torsion)
        let mut col = vec![BigInt::zero(); r];
        col[i] = BigInt::from(order);
        for (j, c) in base_exp.iter().enumerate() {
            col[j] -= c;
        }
        kernel_cols.push(col);
        // extend the subgroup representatives
        let mut new_reps = Vec::with_capacity(reps.len() * order as usize);
        let mut gp = ring.one;
        for t in 0..order {
            for (x, e) in &reps {
                let mut exp = e.clone();
                exp[i] += BigInt::from(t);
                new_reps.push((ring.mul(*x, gp), exp));
            }
            gp = ring.mul(gp, g);
        }
        reps = new_reps;
    }
    // HNF of the relation columns is a basis of the kernel lattice
    let mut mat = linalg::zeros(r, kernel_cols.len());
    for (j, col) in kernel_cols.iter().enumerate() {
        for i in 0..r {
            mat[i][j] = col[i].clone();
        }
    }
    let hnf = linalg::column_hnf(&mat);
    if hnf.is_empty() || hnf[0].len() != r {
        return Err(IntegralError::MissingData("unit kernel lattice has deficient rank".into()));
    }
    let mut out = Vec::new();
    for j in 0..r {
        let mut lambda = field.one();
        for i in 0..r {
            let e = &hnf[i][j];
            if e.is_zero() {
                continue;
            }
            let base = if e.is_negative() {
                field.unit_inverse(&field.unit_generators[i])
            } else {
                field.unit_generators[i].clone()
            };
            let p = field.pow(&base, e.abs().try_into().expect("small exponent"));
            lambda = field.mul(&lambda, &p);
        }
        out.push(lambda);
    }
    Ok(out)
}

fn binom_u64(n: usize, k: usize) -> u64 {
    let mut acc = 1u64;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Ingest an externally produced lattice representation document.
pub fn build_rep_external(json: &str) -> Result<LatticeRep, IntegralError> {
    use serde::Deserialize;
    #[derive(Deserialize)]
    struct Doc {
        rank: usize,
        fiber_gens: Vec<Vec<Vec<crate::numberfield::StrInt>>>,
        base_gens: Vec<Vec<Vec<crate::numberfield::StrInt>>>,
        conj: Vec<Vec<Vec<crate::numberfield::StrInt>>>,
    }
    let doc: Doc = serde_json::from_str(json)
        .map_err(|e| IntegralError::Malformed(format!("parse error: {e}")))?;
    let conv = |mats: &[Vec<Vec<crate::numberfield::StrInt>>]| -> Result<Vec<IMat>, IntegralError> {
        mats.iter()
            .map(|m| {
                m.iter()
                    .map(|row| {
                        row.iter()
                            .map(|x| x.to_bigint().map_err(IntegralError::Field))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect()
    };
    let rep = LatticeRep {
        rank: doc.rank,
        fiber_gens: conv(&doc.fiber_gens)?,
        base_gens: conv(&doc.base_gens)?,
        conj_data: conv(&doc.conj)?,
    };
    rep.validate()?;
    Ok(rep)
}

/// Rank-one trivial coefficients on the cusp cross-section of a level at a
/// principal cusp: translations and units act trivially on Z, the units
/// multiply the translation lattice by their squares.
pub fn trivial_rep(
    field: &NumberFieldData,
    level: &IdealHnf,
    enumeration_bound: u64,
) -> Result<LatticeRep, IntegralError> {
    let units = congruence_unit_basis(field, level, enumeration_bound)?;
    let mut conj_data = Vec::new();
    for lambda in &units {
        let lambda2 = field.mul(lambda, lambda);
        conj_data.push(lattice_mult_matrix(field, level, &lambda2)?);
    }
    let rep = LatticeRep {
        rank: 1,
        fiber_gens: vec![linalg::identity(1); field.degree],
        base_gens: vec![linalg::identity(1); units.len()],
        conj_data,
    };
    rep.validate()?;
    Ok(rep)
}

/// The Sol-manifold style rep: trivial rank-1 coefficients on a torus
/// bundle over the circle with the given fiber monodromy.
pub fn mapping_torus_rep(monodromy: &IMat) -> LatticeRep {
    let d = monodromy.len();
    LatticeRep {
        rank: 1,
        fiber_gens: vec![linalg::identity(1); d],
        base_gens: vec![linalg::identity(1)],
        conj_data: vec![monodromy.clone()],
    }
}

impl From<FieldError> for IntegralError {
    fn from(e: FieldError) -> Self {
        IntegralError::Field(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::{int, mat_from_i64};
    use crate::numberfield::DEFAULT_ENUMERATION_BOUND as BOUND;

    #[test]
    fn symd_ranks() {
        let f = fixtures::gaussian_field();
        let level = f.principal_ideal(&[int(2), int(1)]);
        let rep = build_rep_symd(&f, 1, 0, &level, BOUND).unwrap();
        assert_eq!(rep.rank, 4);
        assert_eq!(rep.fiber_gens.len(), 2);
        assert!(rep.base_gens.is_empty());

        let rep0 = build_rep_symd(&f, 0, 0, &f.unit_ideal(), BOUND).unwrap();
        assert_eq!(rep0.rank, 2);
        assert!(rep0.fiber_gens.iter().all(|t| *t == linalg::identity(2)));
    }

    #[test]
    fn symd_unipotent_nilpotency() {
        // K = Q(sqrt2), d = 1, generator w = sqrt2: (T - I)^2 = 0
        let f = fixtures::sqrt2_field();
        let level = f.principal_ideal(&[int(0), int(1)]);
        let rep = build_rep_symd(&f, 1, 0, &level, BOUND).unwrap();
        for t in &rep.fiber_gens {
            let a = linalg::mat_sub(t, &linalg::identity(rep.rank));
            assert!(linalg::is_zero_mat(&linalg::mat_mul(&a, &a)));
        }
    }

    #[test]
    fn quartic_trivial_level_units() {
        let f = fixtures::quartic_field();
        let rep = build_rep_symd(&f, 0, 0, &f.unit_ideal(), BOUND).unwrap();
        assert_eq!(rep.base_gens.len(), 2);
        assert_eq!(rep.conj_data.len(), 2);
        // conjugation matrices are multiplication by unit squares: det = norm = 1
        for c in &rep.conj_data {
            assert_eq!(linalg::det(c), int(1));
        }
    }

    #[test]
    fn sqrt2_proper_level_unit_powers() {
        // U((sqrt2)) is the full unit group mod torsion: the exponent
        // kernel is generated by epsilon itself
        let f = fixtures::sqrt2_field();
        let level = f.principal_ideal(&[int(0), int(1)]);
        let rep = build_rep_symd(&f, 0, 0, &level, BOUND).unwrap();
        assert_eq!(rep.base_gens.len(), 1);
        // epsilon^2 = 3 + 2 sqrt2 multiplies the lattice (sqrt2): basis
        // {sqrt2, 2}: sqrt2 (3+2sqrt2) = 3 sqrt2 + 4, 2(3+2sqrt2) = 6 + 4sqrt2
        let c = &rep.conj_data[0];
        assert_eq!(linalg::det(c), int(1));
        // mod (2): epsilon = 1+sqrt2 has order 2, so U((2)) is generated by
        // epsilon^2 and the conj matrix is multiplication by epsilon^4
        let level2 = f.principal_ideal(&[int(2), int(0)]);
        let rep2 = build_rep_symd(&f, 0, 0, &level2, BOUND).unwrap();
        assert_eq!(rep2.base_gens.len(), 1);
        let eps = vec![int(1), int(1)];
        let eps2 = f.mul(&eps, &eps);
        let eps4 = f.mul(&eps2, &eps2);
        let expect = lattice_mult_matrix(&f, &level2, &eps4).unwrap();
        assert_eq!(rep2.conj_data[0], expect);
    }

    #[test]
    fn external_rep_validation() {
        // trivial rank-1 rep, all identity
        let ok = r#"{"rank":1,"fiber_gens":[[[1]],[[1]]],"base_gens":[[[1]]],"conj":[[[1,0],[0,1]]]}"#;
        assert!(build_rep_external(ok).is_ok());
        // non-commuting fiber generators are rejected
        let bad = r#"{"rank":2,
            "fiber_gens":[[[1,1],[0,1]],[[1,0],[1,1]]],
            "base_gens":[],"conj":[]}"#;
        assert!(matches!(build_rep_external(bad), Err(IntegralError::NonCommuting(_))));
        // Sol-manifold data is accepted
        let sol = mapping_torus_rep(&mat_from_i64(&[vec![1, 2], vec![1, 1]]));
        assert!(sol.validate().is_ok());
    }

    #[test]
    fn non_unimodular_rejected() {
        let bad = LatticeRep {
            rank: 1,
            fiber_gens: vec![mat_from_i64(&[vec![2]])],
            base_gens: vec![],
            conj_data: vec![],
        };
        assert!(matches!(bad.validate(), Err(IntegralError::NonUnimodular(_))));
    }

    #[test]
    fn conjugation_mismatch_rejected() {
        let f = fixtures::sqrt2_field();
        let level = f.principal_ideal(&[int(0), int(1)]);
        let mut rep = build_rep_symd(&f, 1, 0, &level, BOUND).unwrap();
        rep.conj_data[0][0][1] += int(1);
        assert!(matches!(
            rep.validate(),
            Err(IntegralError::ConjugationMismatch { .. }) | Err(IntegralError::Malformed(_))
        ));
    }
}

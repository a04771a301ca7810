//! Principal congruence subgroups Γ(n) ⊂ SL(2, O_K): group orders and
//! indices modulo an ideal, cusp enumeration, parabolic stabilizer indices,
//! and the negligibility sums controlling the cusp contribution in the
//! limit of increasing level.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::numberfield::{
    residue_ring, unit_index_mod, FieldError, IdealHnf, NumberFieldData,
    ResidueRing,
};

#[derive(Debug, Clone)]
pub enum CongruenceError {
    Field(FieldError),
    NotNested,
    NonDivisible(String),
    TooLarge(String),
}

impl fmt::Display for CongruenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CongruenceError::Field(e) => write!(f, "{e}"),
            CongruenceError::NotNested => write!(f, "levels are not nested"),
            CongruenceError::NonDivisible(s) => write!(f, "exact division failed: {s}"),
            CongruenceError::TooLarge(s) => write!(f, "enumeration bound exceeded: {s}"),
        }
    }
}

impl std::error::Error for CongruenceError {}

impl From<FieldError> for CongruenceError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::NotNested => CongruenceError::NotNested,
            FieldError::TooLarge { norm, bound } => {
                CongruenceError::TooLarge(format!("norm {norm} over bound {bound}"))
            }
            other => CongruenceError::Field(other),
        }
    }
}

/// A congruence level Γ(n). The torsion-freeness flag is declared by the
/// caller, never derived.
#[derive(Debug, Clone)]
pub struct CongruenceLevel {
    pub ideal: IdealHnf,
    pub torsion_free_flag: bool,
    /// optional ingested factorization, (prime ideal, exponent) pairs
    pub factorization: Option<Vec<(IdealHnf, u32)>>,
}

impl CongruenceLevel {
    pub fn new(ideal: IdealHnf) -> Self {
        CongruenceLevel { ideal, torsion_free_flag: false, factorization: None }
    }

    /// The flag is declared, not proven; a proper ideal is a necessary
    /// condition, so the unit ideal with the flag set is rejected.
    pub fn with_torsion_free_flag(ideal: IdealHnf) -> Result<Self, CongruenceError> {
        if ideal.is_unit_ideal() {
            return Err(CongruenceError::Field(FieldError::Parse(
                "torsion-free flag requires a proper ideal".into(),
            )));
        }
        Ok(CongruenceLevel { ideal, torsion_free_flag: true, factorization: None })
    }
}

/// A cusp representative: a unimodular residue pair [a : b] together with
/// the index of the ideal class it sits over. Representatives live modulo
/// the level; we never search for global generators of an ideal class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuspRep {
    pub eta: (Vec<i64>, Vec<i64>),
    pub ideal_class_index: usize,
    pub stabilizer_size: u64,
}

/// Translation lattice and unit congruence condition of Γ(n) ∩ P_η.
#[derive(Debug, Clone)]
pub struct ParabolicStabilizerData {
    pub lattice: IdealHnf,
    pub unit_congruence_level: IdealHnf,
    pub lattice_rank: usize,
    pub unit_rank: usize,
}

/// |SL(2, O_K / n)|, by exact enumeration, cross-checked against the
/// multiplicative formula whenever a factorization is ingested.
pub fn sl2_order_mod(
    field: &NumberFieldData,
    level: &CongruenceLevel,
    bound: u64,
) -> Result<BigInt, CongruenceError> {
    let norm = level.ideal.norm();
    let enumerable = norm.to_u64().map_or(false, |n| n <= bound.min(1024));
    let formula = level.factorization.as_ref().map(|f| sl2_order_formula(&norm, f));
    if enumerable {
        let counted = sl2_order_enumerated(field, &level.ideal, bound)?;
        if let Some(formula) = formula {
            let formula = formula?;
            if formula != counted {
                return Err(CongruenceError::NonDivisible(format!(
                    "enumeration ({counted}) disagrees with formula ({formula})"
                )));
            }
        }
        Ok(counted)
    } else if let Some(formula) = formula {
        formula
    } else {
        Err(CongruenceError::TooLarge(format!(
            "norm {norm} needs an ingested factorization"
        )))
    }
}

fn sl2_order_formula(
    norm: &BigInt,
    factors: &[(IdealHnf, u32)],
) -> Result<BigInt, CongruenceError> {
    // N(n)^3 * prod over primes p | n of (1 - N(p)^{-2})
    let mut check = BigInt::one();
    for (p, e) in factors {
        let np = p.norm();
        check *= np.pow(*e);
    }
    if &check != norm {
        return Err(CongruenceError::NonDivisible(format!(
            "ingested factorization has norm {check}, level has norm {norm}"
        )));
    }
    let mut acc = BigRational::from(norm.pow(3));
    for (p, _) in factors {
        let np2 = BigRational::from(p.norm().pow(2));
        acc *= BigRational::one() - np2.recip();
    }
    if !acc.is_integer() {
        return Err(CongruenceError::NonDivisible("formula result is not integral".into()));
    }
    Ok(acc.to_integer())
}

fn sl2_order_enumerated(
    field: &NumberFieldData,
    ideal: &IdealHnf,
    bound: u64,
) -> Result<BigInt, CongruenceError> {
    if ideal.is_unit_ideal() {
        return Ok(BigInt::one());
    }
    let ring = residue_ring(field, ideal, bound.min(1024))?;
    let n = ring.elements.len();
    // count (a, b, c, d) with ad - bc = 1:
    // for each a, tabulate the number of d with a*d = t, then sum over (b, c)
    let mut total = BigInt::zero();
    let mut prod = vec![0u32; n * n];
    for b in 0..n as u32 {
        for c in 0..n as u32 {
            prod[b as usize * n + c as usize] = ring.mul(b, c);
        }
    }
    let mut count_by_target = vec![0u64; n];
    for a in 0..n as u32 {
        count_by_target.iter_mut().for_each(|x| *x = 0);
        for d in 0..n as u32 {
            count_by_target[prod[a as usize * n + d as usize] as usize] += 1;
        }
        let mut subtotal = 0u64;
        for b in 0..n {
            for c in 0..n {
                let bc = prod[b * n + c];
                let target = ring.add(ring.one, bc);
                subtotal += count_by_target[target as usize];
            }
        }
        total += BigInt::from(subtotal);
    }
    Ok(total)
}

/// [Γ(n1) : Γ(n2)] for nested levels n2 ⊆ n1, via exact division of group
/// orders modulo n2 and n1.
pub fn index(
    field: &NumberFieldData,
    level1: &CongruenceLevel,
    level2: &CongruenceLevel,
    bound: u64,
) -> Result<BigInt, CongruenceError> {
    if !level1.ideal.contains_ideal(&level2.ideal) {
        return Err(CongruenceError::NotNested);
    }
    let o2 = sl2_order_mod(field, level2, bound)?;
    let o1 = sl2_order_mod(field, level1, bound)?;
    let (q, r) = num_integer::Integer::div_rem(&o2, &o1);
    if !r.is_zero() {
        return Err(CongruenceError::NonDivisible(format!("{o2} / {o1}")));
    }
    Ok(q)
}

/// Cusps of Γ(n), enumerated over one ideal class as unimodular residue
/// pairs modulo scaling by the image of the global units, then replicated
/// across the ingested class group representatives (the parabolic image has
/// the same size for every class).
pub fn cusp_set(
    field: &NumberFieldData,
    level: &CongruenceLevel,
    bound: u64,
) -> Result<Vec<CuspRep>, CongruenceError> {
    let classes = field.class_group_ideals.len().max(1);
    if level.ideal.is_unit_ideal() {
        // one cusp per ideal class
        let mut one = vec![0i64; field.degree];
        one[0] = 1;
        return Ok((0..classes)
            .map(|c| CuspRep {
                eta: (one.clone(), vec![0i64; field.degree]),
                ideal_class_index: c,
                stabilizer_size: 1,
            })
            .collect());
    }
    let ring = residue_ring(field, &level.ideal, bound.min(4096))?;
    let orbits = unimodular_pair_orbits(field, &ring)?;
    let mut out = Vec::new();
    for c in 0..classes {
        for (a, b, stab) in &orbits {
            out.push(CuspRep {
                eta: (ring.elements[*a as usize].clone(), ring.elements[*b as usize].clone()),
                ideal_class_index: c,
                stabilizer_size: *stab,
            });
        }
    }
    Ok(out)
}

/// Representatives of unimodular pairs (a, b) in (O/n)^2 modulo scaling by
/// the image of O_K^*; returns (a, b, stabilizer size) triples.
fn unimodular_pair_orbits(
    field: &NumberFieldData,
    ring: &ResidueRing,
) -> Result<Vec<(u32, u32, u64)>, CongruenceError> {
    let n = ring.elements.len() as u32;
    let units = global_unit_image(field, ring);
    let mut seen = vec![false; (n as usize) * (n as usize)];
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let key = a as usize * n as usize + b as usize;
            if seen[key] {
                continue;
            }
            if !is_unimodular_pair(field, ring, a, b) {
                seen[key] = true;
                continue;
            }
            // orbit of (a, b) under unit scaling
            let mut stab = 0u64;
            for &u in &units {
                let ua = ring.mul(u, a);
                let ub = ring.mul(u, b);
                if (ua, ub) == (a, b) {
                    stab += 1;
                }
                seen[ua as usize * n as usize + ub as usize] = true;
            }
            out.push((a, b, stab));
        }
    }
    Ok(out)
}

/// Image of the global unit group O_K^* in (O/n)^*, as a sorted element list.
pub fn global_unit_image(field: &NumberFieldData, ring: &ResidueRing) -> Vec<u32> {
    let gens: Vec<u32> = field
        .all_unit_generators()
        .iter()
        .map(|u| ring.index_of(u))
        .collect();
    ring.unit_subgroup(&gens)
}

/// (a, b) generates the unit ideal of O/n: the lattice spanned by a O_K,
/// b O_K and n is all of O_K, tested by an exact Hermite normal form.
fn is_unimodular_pair(field: &NumberFieldData, ring: &ResidueRing, a: u32, b: u32) -> bool {
    let d = field.degree;
    if ring.elements.len() == 1 {
        return true;
    }
    let lift = |idx: u32| -> Vec<BigInt> {
        ring.elements[idx as usize].iter().map(|&x| BigInt::from(x)).collect()
    };
    let ma = field.mul_matrix(&lift(a));
    let mb = field.mul_matrix(&lift(b));
    let mut cols = crate::linalg::zeros(d, 3 * d);
    for i in 0..d {
        for j in 0..d {
            cols[i][j] = ma[i][j].clone();
            cols[i][d + j] = mb[i][j].clone();
            cols[i][2 * d + j] = ring.level.matrix[i][j].clone();
        }
    }
    let hnf = crate::linalg::column_hnf(&cols);
    hnf.len() == d && (0..d).all(|i| hnf[i][i].is_one())
}

/// Translation-lattice and unit data for Γ(n) ∩ P_η at a cusp sitting over
/// the ideal class with representative 𝔞: the lattice is n · 𝔞^{-2} and the
/// units are those ≡ 1 mod n. For the HNF bookkeeping we represent the
/// lattice through its norm ratio; only indices between nested levels are
/// consumed downstream.
pub fn parabolic_stabilizer(
    field: &NumberFieldData,
    level: &CongruenceLevel,
    _cusp: &CuspRep,
) -> ParabolicStabilizerData {
    ParabolicStabilizerData {
        lattice: level.ideal.clone(),
        unit_congruence_level: level.ideal.clone(),
        lattice_rank: field.degree,
        unit_rank: field.dirichlet_rank(),
    }
}

/// [Γ(n1) ∩ P_η : Γ(n2) ∩ P_η] = (lattice index) × (unit index)
/// = N(n2)/N(n1) × [U(n1) : U(n2)].
pub fn parabolic_index(
    field: &NumberFieldData,
    level1: &CongruenceLevel,
    level2: &CongruenceLevel,
    _cusp: &CuspRep,
    bound: u64,
) -> Result<BigInt, CongruenceError> {
    if !level1.ideal.contains_ideal(&level2.ideal) {
        return Err(CongruenceError::NotNested);
    }
    let n1 = level1.ideal.norm();
    let n2 = level2.ideal.norm();
    let (lattice_index, r) = num_integer::Integer::div_rem(&n2, &n1);
    if !r.is_zero() {
        return Err(CongruenceError::NonDivisible(format!("norm ratio {n2}/{n1}")));
    }
    let unit_index = unit_index_mod(field, &level1.ideal, &level2.ideal, bound)?;
    Ok(lattice_index * unit_index)
}

/// Number of Γ(n2)-cusps lying over one Γ(n1)-cusp:
/// index / parabolic index, with exact division asserted.
pub fn cusp_fiber_count(
    field: &NumberFieldData,
    level1: &CongruenceLevel,
    level2: &CongruenceLevel,
    cusp: &CuspRep,
    bound: u64,
) -> Result<BigInt, CongruenceError> {
    let idx = index(field, level1, level2, bound)?;
    let par = parabolic_index(field, level1, level2, cusp, bound)?;
    let (q, r) = num_integer::Integer::div_rem(&idx, &par);
    if !r.is_zero() {
        return Err(CongruenceError::NonDivisible(format!("{idx} / {par}")));
    }
    Ok(q)
}

/// One row of a negligibility table: the two cusp sums at a given level of
/// the sequence. `sum28` is Σ_η 1/t_η, exact; `sum29` is Σ_η log(t_η)/t_η
/// with the multiset of parabolic indices retained so the caller can do
/// exact comparisons.
#[derive(Debug, Clone)]
pub struct NegligibilityRow {
    pub level_norm: BigInt,
    pub index: BigInt,
    pub sum28: BigRational,
    pub sum29_terms: Vec<(BigInt, u64)>,
    pub sum29_float: f64,
}

/// The sums controlling the cusp contribution along a nested decreasing
/// ideal sequence, one row per sequence element.
pub fn negligibility_sums(
    field: &NumberFieldData,
    level1: &CongruenceLevel,
    sequence: &[CongruenceLevel],
    bound: u64,
) -> Result<Vec<NegligibilityRow>, CongruenceError> {
    let cusps = cusp_set(field, level1, bound)?;
    let mut rows = Vec::new();
    for level in sequence {
        let mut sum28 = BigRational::zero();
        let mut terms: HashMap<BigInt, u64> = HashMap::new();
        for cusp in &cusps {
            let t = parabolic_index(field, level1, level, cusp, bound)?;
            sum28 += BigRational::new(BigInt::one(), t.clone());
            *terms.entry(t).or_insert(0) += 1;
        }
        let mut sum29_terms: Vec<(BigInt, u64)> = terms.into_iter().collect();
        sum29_terms.sort();
        let sum29_float: f64 = sum29_terms
            .iter()
            .map(|(t, mult)| {
                let tf = t.to_f64().unwrap_or(f64::MAX);
                (tf.ln() / tf) * *mult as f64
            })
            .sum();
        rows.push(NegligibilityRow {
            level_norm: level.ideal.norm(),
            index: index(field, level1, level, bound)?,
            sum28,
            sum29_terms,
            sum29_float,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// independent enumeration oracle for the fiber-count identity

/// Directly count the Γ(n2)-cusps over one Γ(n1)-cusp by enumerating the
/// kernel of SL(2, O/n2) → SL(2, O/n1) and its orbits under right
/// multiplication by the image of Γ(n1) ∩ P_η. This is the enumeration
/// route; production code uses the index quotient.
pub fn fiber_count_by_orbit_enumeration(
    field: &NumberFieldData,
    level1: &CongruenceLevel,
    level2: &CongruenceLevel,
    bound: u64,
) -> Result<BigInt, CongruenceError> {
    if !level1.ideal.contains_ideal(&level2.ideal) {
        return Err(CongruenceError::NotNested);
    }
    if level2.ideal.is_unit_ideal() {
        return Ok(BigInt::one());
    }
    let ring = residue_ring(field, &level2.ideal, bound.min(1024))?;
    let n = ring.elements.len() as u32;
    // kernel of reduction to O/n1: entries of (g - I) must lie in n1
    let in_n1 = |idx: u32| -> bool {
        let v: Vec<BigInt> =
            ring.elements[idx as usize].iter().map(|&x| BigInt::from(x)).collect();
        level1.ideal.contains(&v)
    };
    let membership: Vec<bool> = (0..n).map(in_n1).collect();
    let n1set: Vec<u32> = (0..n).filter(|&x| membership[x as usize]).collect();
    let one_plus: Vec<u32> = n1set.iter().map(|&x| ring.add(ring.one, x)).collect();
    // for each off-diagonal b, the solutions c of b c = t with c in the level
    let mut sols: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for &b in &n1set {
        for &c in &n1set {
            sols.entry((b, ring.mul(b, c))).or_default().push(c);
        }
    }
    let mut kernel: Vec<[u32; 4]> = Vec::new();
    for &a in &one_plus {
        for &d in &one_plus {
            let t = ring.add(ring.mul(a, d), ring.neg(ring.one));
            for &b in &n1set {
                if let Some(cs) = sols.get(&(b, t)) {
                    for &c in cs {
                        kernel.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    // generators of the image of Γ(n1) ∩ P_∞ in SL2(O/n2):
    // unipotents (1, w; 0, 1) for w in a basis of n1, and diagonals
    // (λ, 0; 0, λ^{-1}) for λ in the unit image satisfying λ ≡ 1 mod n1
    let d = field.degree;
    let mut gens: Vec<[u32; 4]> = Vec::new();
    for j in 0..d {
        let col: Vec<BigInt> = (0..d).map(|i| level1.ideal.matrix[i][j].clone()).collect();
        let w = ring.index_of(&col);
        gens.push([ring.one, w, ring.zero, ring.one]);
        gens.push([ring.one, ring.neg(w), ring.zero, ring.one]);
    }
    let units = global_unit_image(field, &ring);
    for &u in &units {
        if membership[ring.add(u, ring.neg(ring.one)) as usize] {
            let uinv = ring
                .inverse(u)
                .expect("unit image element must be invertible");
            gens.push([u, ring.zero, ring.zero, uinv]);
        }
    }
    // orbits under right multiplication; matrices packed for binary search
    let pack =
        |m: &[u32; 4]| -> u128 { ((m[0] as u128) << 96) | ((m[1] as u128) << 64) | ((m[2] as u128) << 32) | m[3] as u128 };
    let mut packed: Vec<u128> = kernel.iter().map(pack).collect();
    packed.sort_unstable();
    let mul = |x: &[u32; 4], y: &[u32; 4]| -> [u32; 4] {
        [
            ring.add(ring.mul(x[0], y[0]), ring.mul(x[1], y[2])),
            ring.add(ring.mul(x[0], y[1]), ring.mul(x[1], y[3])),
            ring.add(ring.mul(x[2], y[0]), ring.mul(x[3], y[2])),
            ring.add(ring.mul(x[2], y[1]), ring.mul(x[3], y[3])),
        ]
    };
    let unpack = |p: u128| -> [u32; 4] {
        [(p >> 96) as u32, (p >> 64) as u32, (p >> 32) as u32, p as u32]
    };
    let mut seen = vec![false; packed.len()];
    let mut orbits = 0u64;
    for start in 0..packed.len() {
        if seen[start] {
            continue;
        }
        orbits += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            let g = unpack(packed[i]);
            for h in &gens {
                let gh = pack(&mul(&g, h));
                let j = packed
                    .binary_search(&gh)
                    .expect("orbit left the kernel: generators invalid");
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    Ok(BigInt::from(orbits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::int;
    use crate::numberfield::DEFAULT_ENUMERATION_BOUND as BOUND;

    fn lvl(field: &NumberFieldData, coords: &[i64]) -> CongruenceLevel {
        let v: Vec<BigInt> = coords.iter().map(|&x| int(x)).collect();
        CongruenceLevel::new(field.principal_ideal(&v))
    }

    fn lvl_pow(field: &NumberFieldData, coords: &[i64], e: u32) -> CongruenceLevel {
        let v: Vec<BigInt> = coords.iter().map(|&x| int(x)).collect();
        CongruenceLevel::new(field.ideal_pow(&field.principal_ideal(&v), e))
    }

    #[test]
    fn sl2_orders_small() {
        let f = fixtures::gaussian_field();
        let onepi = lvl(&f, &[1, 1]);
        assert_eq!(sl2_order_mod(&f, &onepi, BOUND).unwrap(), int(6));
        let unit = CongruenceLevel::new(f.unit_ideal());
        assert_eq!(sl2_order_mod(&f, &unit, BOUND).unwrap(), int(1));
        let f2 = fixtures::sqrt2_field();
        let sqrt2 = lvl(&f2, &[0, 1]);
        assert_eq!(sl2_order_mod(&f2, &sqrt2, BOUND).unwrap(), int(6));
    }

    #[test]
    fn sl2_formula_path_agrees() {
        let f = fixtures::gaussian_field();
        let onepi = f.principal_ideal(&[int(1), int(1)]);
        let mut two = CongruenceLevel::new(f.ideal_pow(&onepi, 2));
        two.factorization = Some(vec![(onepi.clone(), 2)]);
        // enumeration and formula must agree: 4^3 (1 - 1/4) = 48
        assert_eq!(sl2_order_mod(&f, &two, BOUND).unwrap(), int(48));
        // bad factorization is rejected
        let mut bad = CongruenceLevel::new(f.ideal_pow(&onepi, 2));
        bad.factorization = Some(vec![(onepi.clone(), 3)]);
        assert!(sl2_order_mod(&f, &bad, BOUND).is_err());
    }

    #[test]
    fn indices() {
        let f = fixtures::gaussian_field();
        let onepi = lvl(&f, &[1, 1]);
        let two = lvl(&f, &[2, 0]);
        assert_eq!(index(&f, &onepi, &two, BOUND).unwrap(), int(8));
        assert_eq!(index(&f, &onepi, &onepi, BOUND).unwrap(), int(1));
        let f2 = fixtures::sqrt2_field();
        let unit = CongruenceLevel::new(f2.unit_ideal());
        let sqrt2 = lvl(&f2, &[0, 1]);
        assert_eq!(index(&f2, &unit, &sqrt2, BOUND).unwrap(), int(6));
    }

    #[test]
    fn index_multiplicative_along_chain() {
        let f = fixtures::gaussian_field();
        let n1 = lvl_pow(&f, &[1, 1], 1);
        let n2 = lvl_pow(&f, &[1, 1], 2);
        let n3 = lvl_pow(&f, &[1, 1], 4);
        let i12 = index(&f, &n1, &n2, BOUND).unwrap();
        let i23 = index(&f, &n2, &n3, BOUND).unwrap();
        let i13 = index(&f, &n1, &n3, BOUND).unwrap();
        assert_eq!(i12 * i23, i13);
    }

    #[test]
    fn cusp_counts() {
        let f = fixtures::gaussian_field();
        let unit = CongruenceLevel::new(f.unit_ideal());
        assert_eq!(cusp_set(&f, &unit, BOUND).unwrap().len(), 1);
        let onepi = lvl(&f, &[1, 1]);
        assert_eq!(cusp_set(&f, &onepi, BOUND).unwrap().len(), 3);
        let two = lvl(&f, &[2, 0]);
        assert_eq!(cusp_set(&f, &two, BOUND).unwrap().len(), 6);
        let f2 = fixtures::sqrt2_field();
        let unit2 = CongruenceLevel::new(f2.unit_ideal());
        assert_eq!(cusp_set(&f2, &unit2, BOUND).unwrap().len(), 1);
    }

    #[test]
    fn parabolic_indices() {
        let f = fixtures::gaussian_field();
        let n3 = lvl_pow(&f, &[1, 1], 3);
        let n4 = lvl_pow(&f, &[1, 1], 4);
        let cusp = CuspRep { eta: (vec![1], vec![0]), ideal_class_index: 0, stabilizer_size: 1 };
        assert_eq!(parabolic_index(&f, &n3, &n4, &cusp, BOUND).unwrap(), int(2));
        assert_eq!(parabolic_index(&f, &n3, &n3, &cusp, BOUND).unwrap(), int(1));
        let f2 = fixtures::sqrt2_field();
        let sqrt2 = lvl(&f2, &[0, 1]);
        let two = lvl(&f2, &[2, 0]);
        // norm ratio 2, unit index 2
        assert_eq!(parabolic_index(&f2, &sqrt2, &two, &cusp, BOUND).unwrap(), int(4));
    }

    #[test]
    fn fiber_counts_and_partition() {
        let f = fixtures::gaussian_field();
        let onepi = lvl(&f, &[1, 1]);
        let two = lvl(&f, &[2, 0]);
        let cusps1 = cusp_set(&f, &onepi, BOUND).unwrap();
        let mut total = BigInt::zero();
        for cusp in &cusps1 {
            total += cusp_fiber_count(&f, &onepi, &two, cusp, BOUND).unwrap();
        }
        let cusps2 = cusp_set(&f, &two, BOUND).unwrap();
        assert_eq!(total, int(cusps2.len() as i64));
    }

    #[test]
    fn fiber_count_matches_orbit_enumeration() {
        let f = fixtures::gaussian_field();
        let onepi = lvl(&f, &[1, 1]);
        let two = lvl(&f, &[2, 0]);
        let cusp = CuspRep { eta: (vec![1], vec![0]), ideal_class_index: 0, stabilizer_size: 1 };
        let by_formula = cusp_fiber_count(&f, &onepi, &two, &cusp, BOUND).unwrap();
        let by_orbits = fiber_count_by_orbit_enumeration(&f, &onepi, &two, BOUND).unwrap();
        assert_eq!(by_formula, by_orbits);
        assert_eq!(by_formula, int(2));
    }

    #[test]
    fn parabolic_stabilizer_ranks() {
        let f = fixtures::sqrt2_field();
        let level = lvl(&f, &[0, 1]);
        let cusp = CuspRep { eta: (vec![1], vec![0]), ideal_class_index: 0, stabilizer_size: 1 };
        let data = parabolic_stabilizer(&f, &level, &cusp);
        assert_eq!(data.lattice_rank, 2);
        assert_eq!(data.unit_rank, 1);
        assert_eq!(data.lattice, level.ideal);
    }

    #[test]
    fn torsion_free_flag_needs_proper_ideal() {
        let f = fixtures::gaussian_field();
        assert!(CongruenceLevel::with_torsion_free_flag(f.unit_ideal()).is_err());
        let onepi = f.principal_ideal(&[int(1), int(1)]);
        assert!(CongruenceLevel::with_torsion_free_flag(onepi).is_ok());
    }

    #[test]
    fn sl2_formula_multi_prime() {
        // composite level (1+i)(2+i) of norm 10: the ingested factorization
        // path must reproduce the enumeration
        let f = fixtures::gaussian_field();
        let onepi = f.principal_ideal(&[int(1), int(1)]);
        let twopi = f.principal_ideal(&[int(2), int(1)]);
        let composite = f.ideal_mul(&onepi, &twopi);
        let mut level = CongruenceLevel::new(composite);
        level.factorization = Some(vec![(onepi, 1), (twopi, 1)]);
        // 10^3 (1 - 1/4)(1 - 1/25) = 720
        assert_eq!(sl2_order_mod(&f, &level, BOUND).unwrap(), int(720));
    }

    #[test]
    fn negligibility_rows() {
        let f = fixtures::gaussian_field();
        let level1 = lvl_pow(&f, &[1, 1], 2);
        let seq: Vec<CongruenceLevel> =
            (1..=4).map(|i| lvl_pow(&f, &[1, 1], i + 2)).collect();
        let rows = negligibility_sums(&f, &level1, &seq, BOUND).unwrap();
        assert_eq!(rows.len(), 4);
        // single-term sequence equal to the base level: sum28 = #cusps, log term 0
        let base_only = negligibility_sums(&f, &level1, &[level1.clone()], BOUND).unwrap();
        let cusps = cusp_set(&f, &level1, BOUND).unwrap();
        assert_eq!(
            base_only[0].sum28,
            BigRational::from(int(cusps.len() as i64))
        );
        assert_eq!(base_only[0].sum29_float, 0.0);
        // each log(t)/t term is at most 1/e
        for row in &rows {
            for (t, _) in &row.sum29_terms {
                let tf = t.to_f64().unwrap();
                assert!(tf.ln() / tf <= 1.0 / std::f64::consts::E + 1e-12);
            }
        }
        // strictly decreasing sum28
        for w in rows.windows(2) {
            assert!(w[0].sum28 > w[1].sum28);
        }
    }
}

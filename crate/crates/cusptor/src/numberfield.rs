//! Number field data: ingestion, validation, and exact arithmetic in the
//! ring of integers, its ideals, and its residue rings.
//!
//! The field document supplies the defining polynomial, signature, integral
//! basis, unit generators, torsion data, and class group representatives.
//! Nothing is computed from scratch that the document is supposed to carry;
//! everything it carries is checked exactly before a `NumberFieldData` is
//! handed out.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::{self, IMat};

pub const DEFAULT_ENUMERATION_BOUND: u64 = 10_000;
const SL2_ENUMERATION_CAP: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    Parse(String),
    MalformedBasis(String),
    SignatureMismatch { declared: (usize, usize), sturm_real_roots: usize },
    UnitRankMismatch { declared: usize, expected: usize },
    NonUnitGenerator { index: usize, norm: BigInt },
    NotAnIdeal(String),
    NotNested,
    TooLarge { norm: BigInt, bound: u64 },
    NonDivisible(String),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::Parse(s) => write!(f, "parse error: {s}"),
            FieldError::MalformedBasis(s) => write!(f, "malformed basis: {s}"),
            FieldError::SignatureMismatch { declared, sturm_real_roots } => write!(
                f,
                "signature mismatch: declared ({}, {}) but Sturm count gives {} real roots",
                declared.0, declared.1, sturm_real_roots
            ),
            FieldError::UnitRankMismatch { declared, expected } => write!(
                f,
                "unit rank mismatch: {declared} generators declared, Dirichlet rank is {expected}"
            ),
            FieldError::NonUnitGenerator { index, norm } => {
                write!(f, "unit generator {index} has norm {norm}, not ±1")
            }
            FieldError::NotAnIdeal(s) => write!(f, "not an ideal: {s}"),
            FieldError::NotNested => write!(f, "ideals are not nested"),
            FieldError::TooLarge { norm, bound } => {
                write!(f, "residue ring of norm {norm} exceeds enumeration bound {bound}")
            }
            FieldError::NonDivisible(s) => write!(f, "exact division failed: {s}"),
        }
    }
}

impl std::error::Error for FieldError {}

/// An ideal of O_K, stored as the column Hermite normal form of a Z-basis
/// in integral-basis coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealHnf {
    pub matrix: IMat,
}

impl IdealHnf {
    pub fn norm(&self) -> BigInt {
        let mut n = BigInt::one();
        for i in 0..self.matrix.len() {
            n *= &self.matrix[i][i];
        }
        n.abs()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.matrix == linalg::identity(self.matrix.len())
    }

    /// Membership test for a coordinate vector.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        linalg::solve_upper_triangular(&self.matrix, v).is_some()
    }

    /// True if every basis vector of `other` lies in `self`,
    /// i.e. other ⊆ self as lattices.
    pub fn contains_ideal(&self, other: &IdealHnf) -> bool {
        let d = self.matrix.len();
        (0..d).all(|j| {
            let col: Vec<BigInt> = (0..d).map(|i| other.matrix[i][j].clone()).collect();
            self.contains(&col)
        })
    }
}

/// A validated number field with exact multiplication structure.
#[derive(Debug, Clone)]
pub struct NumberFieldData {
    pub defining_polynomial: Vec<BigInt>,
    pub degree: usize,
    pub signature: (usize, usize),
    pub integral_basis: Vec<Vec<BigRational>>,
    pub unit_generators: Vec<Vec<BigInt>>,
    pub torsion_unit_order: u64,
    pub torsion_generator: Vec<BigInt>,
    pub class_group_ideals: Vec<IdealHnf>,
    pub discriminant: Option<BigInt>,
    /// structure[i][j] = coordinates of ω_i · ω_j in the integral basis
    structure: Vec<Vec<Vec<BigInt>>>,
}

impl NumberFieldData {
    pub fn one(&self) -> Vec<BigInt> {
        // coordinates of 1 in the integral basis
        let d = self.degree;
        let mut target = vec![BigRational::zero(); d];
        target[0] = BigRational::one();
        solve_rational_system(&self.integral_basis, &target)
            .expect("1 must lie in the order")
            .iter()
            .map(|x| {
                assert!(x.is_integer(), "coordinates of 1 must be integral");
                x.to_integer()
            })
            .collect()
    }

    pub fn zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.degree]
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn neg(&self, a: &[BigInt]) -> Vec<BigInt> {
        a.iter().map(|x| -x.clone()).collect()
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let d = self.degree;
        let mut out = vec![BigInt::zero(); d];
        for i in 0..d {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if b[j].is_zero() {
                    continue;
                }
                let c = &a[i] * &b[j];
                for k in 0..d {
                    if !self.structure[i][j][k].is_zero() {
                        out[k] += &c * &self.structure[i][j][k];
                    }
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `a` on the integral basis (columns are
    /// images of basis vectors).
    pub fn mul_matrix(&self, a: &[BigInt]) -> IMat {
        let d = self.degree;
        let mut m = linalg::zeros(d, d);
        for j in 0..d {
            let mut e = vec![BigInt::zero(); d];
            e[j] = BigInt::one();
            let col = self.mul(a, &e);
            for i in 0..d {
                m[i][j] = col[i].clone();
            }
        }
        m
    }

    /// Field norm N_{K/Q} of an element of O_K, exact.
    pub fn norm(&self, a: &[BigInt]) -> BigInt {
        linalg::det(&self.mul_matrix(a))
    }

    pub fn pow(&self, a: &[BigInt], mut e: u64) -> Vec<BigInt> {
        let mut acc = self.one();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit of O_K (norm ±1), exact; panics on non-units.
    pub fn unit_inverse(&self, a: &[BigInt]) -> Vec<BigInt> {
        let m = self.mul_matrix(a);
        let inv = linalg::unimodular_inverse(&m);
        let one = self.one();
        let d = self.degree;
        (0..d)
            .map(|i| (0..d).map(|j| &inv[i][j] * &one[j]).sum())
            .collect()
    }

    /// The unit ideal O_K.
    pub fn unit_ideal(&self) -> IdealHnf {
        IdealHnf { matrix: linalg::identity(self.degree) }
    }

    /// Principal ideal (a) as an HNF lattice.
    pub fn principal_ideal(&self, a: &[BigInt]) -> IdealHnf {
        let m = self.mul_matrix(a);
        IdealHnf { matrix: linalg::column_hnf(&m) }
    }

    pub fn ideal_mul(&self, a: &IdealHnf, b: &IdealHnf) -> IdealHnf {
        let d = self.degree;
        let mut gens: IMat = linalg::zeros(d, 0);
        for ja in 0..d {
            let ca: Vec<BigInt> = (0..d).map(|i| a.matrix[i][ja].clone()).collect();
            for jb in 0..d {
                let cb: Vec<BigInt> = (0..d).map(|i| b.matrix[i][jb].clone()).collect();
                let p = self.mul(&ca, &cb);
                for (i, row) in gens.iter_mut().enumerate() {
                    row.push(p[i].clone());
                }
            }
        }
        IdealHnf { matrix: linalg::column_hnf(&gens) }
    }

    pub fn ideal_pow(&self, a: &IdealHnf, e: u32) -> IdealHnf {
        let mut acc = self.unit_ideal();
        for _ in 0..e {
            acc = self.ideal_mul(&acc, a);
        }
        acc
    }

    /// Validate that an ingested HNF matrix really is an ideal: upper
    /// triangular, positive diagonal, closed under multiplication by every
    /// integral basis element.
    pub fn validate_ideal(&self, m: &IMat) -> Result<IdealHnf, FieldError> {
        let d = self.degree;
        if m.len() != d || m.iter().any(|r| r.len() != d) {
            return Err(FieldError::NotAnIdeal(format!("matrix is not {d}x{d}")));
        }
        for i in 0..d {
            if !m[i][i].is_positive() {
                return Err(FieldError::NotAnIdeal("diagonal must be positive".into()));
            }
            for j in 0..i {
                if !m[i][j].is_zero() {
                    return Err(FieldError::NotAnIdeal("matrix must be upper triangular".into()));
                }
            }
        }
        let ideal = IdealHnf { matrix: m.clone() };
        for j in 0..d {
            let col: Vec<BigInt> = (0..d).map(|i| m[i][j].clone()).collect();
            for b in 0..d {
                let mut e = vec![BigInt::zero(); d];
                e[b] = BigInt::one();
                let prod = self.mul(&col, &e);
                if !ideal.contains(&prod) {
                    return Err(FieldError::NotAnIdeal(
                        "lattice is not closed under multiplication by the integral basis".into(),
                    ));
                }
            }
        }
        Ok(ideal)
    }

    pub fn dirichlet_rank(&self) -> usize {
        self.signature.0 + self.signature.1 - 1
    }

    /// All unit generators including the torsion generator.
    pub fn all_unit_generators(&self) -> Vec<Vec<BigInt>> {
        let mut gens = vec![self.torsion_generator.clone()];
        gens.extend(self.unit_generators.iter().cloned());
        gens
    }
}

fn solve_rational_system(
    cols: &[Vec<BigRational>],
    target: &[BigRational],
) -> Option<Vec<BigRational>> {
    // cols[j] is the j-th column; solve sum_j x_j cols[j] = target
    let d = target.len();
    let n = cols.len();
    let mut m: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n).map(|j| cols[j][i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = linalg::rref(&mut m);
    if pivots.contains(&n) {
        return None; // inconsistent
    }
    let mut x = vec![BigRational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][n].clone();
    }
    Some(x)
}

/// Number of real roots of a squarefree integer polynomial, by exact Sturm
/// sequence evaluation at ±∞.
pub fn sturm_real_root_count(poly: &[BigInt]) -> usize {
    let to_q = |p: &[BigInt]| -> Vec<BigRational> {
        p.iter().map(|c| BigRational::from(c.clone())).collect()
    };
    let mut seq: Vec<Vec<BigRational>> = Vec::new();
    let p0 = trim(to_q(poly));
    let p1 = trim(derivative(&p0));
    seq.push(p0);
    if !seq[0].is_empty() && !p1.is_empty() {
        seq.push(p1);
        loop {
            let n = seq.len();
            let r = poly_rem(&seq[n - 2], &seq[n - 1]);
            let r = trim(r.into_iter().map(|c| -c).collect());
            if r.is_empty() {
                break;
            }
            seq.push(r);
        }
    }
    let sign_at_inf = |p: &[BigRational], plus: bool| -> i32 {
        if p.is_empty() {
            return 0;
        }
        let lead = p.last().unwrap();
        let deg = p.len() - 1;
        let mut s = if lead.is_positive() { 1 } else { -1 };
        if !plus && deg % 2 == 1 {
            s = -s;
        }
        s
    };
    let changes = |plus: bool| -> usize {
        let signs: Vec<i32> = seq.iter().map(|p| sign_at_inf(p, plus)).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    changes(false) - changes(true)
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

fn derivative(p: &[BigRational]) -> Vec<BigRational> {
    if p.len() <= 1 {
        return Vec::new();
    }
    (1..p.len())
        .map(|i| &p[i] * BigRational::from(BigInt::from(i as i64)))
        .collect()
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b.last().unwrap();
    while r.len() >= b.len() && !r.is_empty() {
        let dr = r.len() - 1;
        let coef = r.last().unwrap() / lead;
        let shift = dr - db;
        for i in 0..b.len() {
            let t = &b[i] * &coef;
            r[i + shift] -= t;
        }
        r = trim(r);
        if r.len() <= db {
            break;
        }
    }
    r
}

// ---------------------------------------------------------------------------
// document ingestion

use serde::Deserialize;

#[derive(Deserialize)]
pub struct FieldDocument {
    pub poly: Vec<StrInt>,
    pub signature: (usize, usize),
    pub integral_basis: Vec<Vec<StrRat>>,
    #[serde(default)]
    pub units: Vec<Vec<StrInt>>,
    pub torsion_order: u64,
    #[serde(default)]
    pub torsion_generator: Option<Vec<StrInt>>,
    pub class_ideals: Vec<Vec<Vec<StrInt>>>,
    #[serde(default)]
    pub disc: Option<StrInt>,
    #[serde(default)]
    pub provenance: Option<String>,
}

/// An exact integer parsed from either a JSON number or a decimal string.
#[derive(Deserialize)]
#[serde(untagged)]
pub enum StrInt {
    Num(i64),
    Str(String),
}

impl StrInt {
    pub fn to_bigint(&self) -> Result<BigInt, FieldError> {
        match self {
            StrInt::Num(n) => Ok(BigInt::from(*n)),
            StrInt::Str(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|_| FieldError::Parse(format!("bad integer: {s}"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum StrRat {
    Num(i64),
    Str(String),
}

impl StrRat {
    pub fn to_rational(&self) -> Result<BigRational, FieldError> {
        match self {
            StrRat::Num(n) => Ok(BigRational::from(BigInt::from(*n))),
            StrRat::Str(s) => {
                let s = s.trim();
                if let Some((num, den)) = s.split_once('/') {
                    let n = num.trim().parse::<BigInt>();
                    let d = den.trim().parse::<BigInt>();
                    match (n, d) {
                        (Ok(n), Ok(d)) if !d.is_zero() => Ok(BigRational::new(n, d)),
                        _ => Err(FieldError::Parse(format!("bad rational: {s}"))),
                    }
                } else {
                    s.parse::<BigInt>()
                        .map(BigRational::from)
                        .map_err(|_| FieldError::Parse(format!("bad rational: {s}")))
                }
            }
        }
    }
}

/// Parse, validate and seal a field document. Rejection is total: either
/// every invariant holds or no `NumberFieldData` is produced.
pub fn load_field(json: &str) -> Result<NumberFieldData, FieldError> {
    let doc: FieldDocument =
        serde_json::from_str(json).map_err(|e| FieldError::Parse(e.to_string()))?;
    load_field_document(doc)
}

pub fn load_field_document(doc: FieldDocument) -> Result<NumberFieldData, FieldError> {
    let poly: Vec<BigInt> = doc
        .poly
        .iter()
        .map(|c| c.to_bigint())
        .collect::<Result<_, _>>()?;
    if poly.len() < 2 {
        return Err(FieldError::Parse("polynomial must have degree >= 1".into()));
    }
    if poly.last().map(|c| !c.is_one()).unwrap_or(true) {
        return Err(FieldError::Parse("polynomial must be monic".into()));
    }
    let degree = poly.len() - 1;
    let (r1, r2) = doc.signature;
    if r1 + 2 * r2 != degree {
        return Err(FieldError::SignatureMismatch {
            declared: (r1, r2),
            sturm_real_roots: sturm_real_root_count(&poly),
        });
    }
    let sturm = sturm_real_root_count(&poly);
    if sturm != r1 {
        return Err(FieldError::SignatureMismatch { declared: (r1, r2), sturm_real_roots: sturm });
    }

    if doc.integral_basis.len() != degree || doc.integral_basis.iter().any(|c| c.len() != degree) {
        return Err(FieldError::MalformedBasis(format!("integral basis must be {degree}x{degree}")));
    }
    // columns of the basis, in power-basis coordinates
    let basis: Vec<Vec<BigRational>> = doc
        .integral_basis
        .iter()
        .map(|col| col.iter().map(|x| x.to_rational()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;

    // structure constants: ω_i ω_j expanded back in the ω basis, must be integral
    let structure = structure_constants(&poly, &basis)?;

    let mut field = NumberFieldData {
        defining_polynomial: poly,
        degree,
        signature: (r1, r2),
        integral_basis: basis,
        unit_generators: Vec::new(),
        torsion_unit_order: doc.torsion_order.max(1),
        torsion_generator: Vec::new(),
        class_group_ideals: Vec::new(),
        discriminant: None,
        structure,
    };

    // torsion generator: ingested, or -1 when the torsion order is 2
    let minus_one = field.neg(&field.one());
    let tg = match &doc.torsion_generator {
        Some(v) => v.iter().map(|c| c.to_bigint()).collect::<Result<Vec<_>, _>>()?,
        None => {
            if doc.torsion_order != 2 {
                return Err(FieldError::Parse(
                    "torsion_generator required when torsion_order != 2".into(),
                ));
            }
            minus_one.clone()
        }
    };
    if tg.len() != degree {
        return Err(FieldError::Parse("torsion generator has wrong length".into()));
    }
    // exact order check
    let mut p = tg.clone();
    let mut ord = 1u64;
    let one = field.one();
    while p != one {
        p = field.mul(&p, &tg);
        ord += 1;
        if ord > doc.torsion_order {
            return Err(FieldError::Parse(
                "torsion generator order exceeds declared torsion_order".into(),
            ));
        }
    }
    if ord != doc.torsion_order {
        return Err(FieldError::Parse(format!(
            "torsion generator has order {ord}, declared {}",
            doc.torsion_order
        )));
    }
    field.torsion_generator = tg;

    // unit generators: count = Dirichlet rank, each of norm ±1
    let expected = r1 + r2 - 1;
    if doc.units.len() != expected {
        return Err(FieldError::UnitRankMismatch { declared: doc.units.len(), expected });
    }
    let mut units = Vec::new();
    for (i, u) in doc.units.iter().enumerate() {
        let v: Vec<BigInt> = u.iter().map(|c| c.to_bigint()).collect::<Result<_, _>>()?;
        if v.len() != degree {
            return Err(FieldError::Parse(format!("unit {i} has wrong length")));
        }
        let n = field.norm(&v);
        if !n.abs().is_one() {
            return Err(FieldError::NonUnitGenerator { index: i, norm: n });
        }
        units.push(v);
    }
    field.unit_generators = units;

    // class group representatives (must include the principal class)
    if doc.class_ideals.is_empty() {
        return Err(FieldError::Parse("class_ideals must list at least the principal class".into()));
    }
    let mut ideals = Vec::new();
    for m in &doc.class_ideals {
        let mm: IMat = m
            .iter()
            .map(|row| row.iter().map(|c| c.to_bigint()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        ideals.push(field.validate_ideal(&mm)?);
    }
    field.class_group_ideals = ideals;

    if let Some(d) = &doc.disc {
        field.discriminant = Some(d.to_bigint()?);
    }
    Ok(field)
}

fn structure_constants(
    poly: &[BigInt],
    basis: &[Vec<BigRational>],
) -> Result<Vec<Vec<Vec<BigInt>>>, FieldError> {
    let d = poly.len() - 1;
    // multiplication of power-basis vectors modulo the defining polynomial
    let mul_power = |a: &[BigRational], b: &[BigRational]| -> Vec<BigRational> {
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for i in 0..d {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if b[j].is_zero() {
                    continue;
                }
                let t = &a[i] * &b[j];
                prod[i + j] += t;
            }
        }
        // reduce x^k for k >= d using x^d = -(c_0 + c_1 x + ... + c_{d-1} x^{d-1})
        for k in (d..2 * d - 1).rev() {
            let c = prod[k].clone();
            if c.is_zero() {
                continue;
            }
            prod[k] = BigRational::zero();
            for i in 0..d {
                let t = &c * BigRational::from(poly[i].clone());
                prod[k - d + i] -= t;
            }
        }
        prod.truncate(d);
        prod
    };
    let mut structure = vec![vec![Vec::new(); d]; d];
    for i in 0..d {
        for j in 0..=i {
            let prod = mul_power(&basis[i], &basis[j]);
            let coords = solve_rational_system(basis, &prod).ok_or_else(|| {
                FieldError::MalformedBasis("integral basis is singular".into())
            })?;
            let mut int_coords = Vec::with_capacity(d);
            for c in &coords {
                if !c.is_integer() {
                    return Err(FieldError::MalformedBasis(
                        "basis is not multiplicatively closed over Z".into(),
                    ));
                }
                int_coords.push(c.to_integer());
            }
            structure[i][j] = int_coords.clone();
            structure[j][i] = int_coords;
        }
    }
    Ok(structure)
}

// ---------------------------------------------------------------------------
// residue rings

/// The quotient ring O_K / n, fully enumerated.
pub struct ResidueRing {
    pub level: IdealHnf,
    pub cardinality: u64,
    /// coset representatives, coordinates reduced against the HNF basis
    pub elements: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, u32>,
    /// multiplication table, present when the ring is small enough
    mul_table: Option<Vec<u32>>,
    add_table: Option<Vec<u32>>,
    field_structure: Vec<Vec<Vec<BigInt>>>,
    pub one: u32,
    pub zero: u32,
}

impl ResidueRing {
    /// Reduce an integral coordinate vector to its canonical coset
    /// representative modulo the ideal lattice.
    fn reduce(&self, v: &[BigInt]) -> Vec<i64> {
        reduce_mod_hnf(&self.level.matrix, v)
    }

    pub fn index_of(&self, v: &[BigInt]) -> u32 {
        let red = self.reduce(v);
        *self.index.get(&red).expect("reduced element must be in the table")
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if let Some(t) = &self.add_table {
            return t[a as usize * self.elements.len() + b as usize];
        }
        let va: Vec<BigInt> = self.elements[a as usize].iter().map(|&x| BigInt::from(x)).collect();
        let vb: Vec<BigInt> = self.elements[b as usize].iter().map(|&x| BigInt::from(x)).collect();
        let sum: Vec<BigInt> = va.iter().zip(&vb).map(|(x, y)| x + y).collect();
        self.index_of(&sum)
    }

    pub fn neg(&self, a: u32) -> u32 {
        let va: Vec<BigInt> = self.elements[a as usize].iter().map(|&x| -BigInt::from(x)).collect();
        self.index_of(&va)
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if let Some(t) = &self.mul_table {
            return t[a as usize * self.elements.len() + b as usize];
        }
        let va: Vec<BigInt> = self.elements[a as usize].iter().map(|&x| BigInt::from(x)).collect();
        let vb: Vec<BigInt> = self.elements[b as usize].iter().map(|&x| BigInt::from(x)).collect();
        let d = va.len();
        let mut out = vec![BigInt::zero(); d];
        for i in 0..d {
            if va[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if vb[j].is_zero() {
                    continue;
                }
                let c = &va[i] * &vb[j];
                for k in 0..d {
                    if !self.field_structure[i][j][k].is_zero() {
                        out[k] += &c * &self.field_structure[i][j][k];
                    }
                }
            }
        }
        self.index_of(&out)
    }

    pub fn is_unit(&self, a: u32) -> bool {
        self.inverse(a).is_some()
    }

    pub fn inverse(&self, a: u32) -> Option<u32> {
        (0..self.elements.len() as u32).find(|&b| self.mul(a, b) == self.one)
    }

    /// Subgroup of (O/n)^* generated by the given residues (must be units).
    pub fn unit_subgroup(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.elements.len()];
        let mut stack = vec![self.one];
        seen[self.one as usize] = true;
        let mut out = vec![self.one];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    stack.push(y);
                    out.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

pub fn reduce_mod_hnf(hnf: &IMat, v: &[BigInt]) -> Vec<i64> {
    let d = hnf.len();
    let mut w: Vec<BigInt> = v.to_vec();
    for i in (0..d).rev() {
        let q = linalg::floor_div(&w[i], &hnf[i][i]);
        if !q.is_zero() {
            for k in 0..=i {
                let t = &hnf[k][i] * &q;
                w[k] -= t;
            }
        }
    }
    w.iter()
        .map(|x| x.to_i64().expect("reduced coordinate exceeds i64"))
        .collect()
}

/// Construct the residue ring O_K / n by complete enumeration.
pub fn residue_ring(
    field: &NumberFieldData,
    ideal: &IdealHnf,
    bound: u64,
) -> Result<ResidueRing, FieldError> {
    let norm = ideal.norm();
    let card = norm.to_u64().filter(|&n| n <= bound).ok_or(FieldError::TooLarge {
        norm: norm.clone(),
        bound,
    })?;
    let d = field.degree;
    let diag: Vec<BigInt> = (0..d).map(|i| ideal.matrix[i][i].clone()).collect();
    let mut elements: Vec<Vec<i64>> = Vec::with_capacity(card as usize);
    let mut cursor = vec![0i64; d];
    loop {
        let v: Vec<BigInt> = cursor.iter().map(|&x| BigInt::from(x)).collect();
        elements.push(reduce_mod_hnf(&ideal.matrix, &v));
        // odometer over 0..diag[i]
        let mut i = 0;
        loop {
            if i == d {
                break;
            }
            cursor[i] += 1;
            if BigInt::from(cursor[i]) < diag[i] {
                break;
            }
            cursor[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    elements.sort_unstable();
    elements.dedup();
    assert_eq!(elements.len() as u64, card, "enumeration must match the ideal norm");
    let index: HashMap<Vec<i64>, u32> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i as u32))
        .collect();
    let zero_v = vec![0i64; d];
    let one_red = reduce_mod_hnf(&ideal.matrix, &field.one());
    let mut ring = ResidueRing {
        level: ideal.clone(),
        cardinality: card,
        zero: index[&zero_v],
        one: index[&one_red],
        elements,
        index,
        mul_table: None,
        add_table: None,
        field_structure: field.structure.clone(),
    };
    if card <= SL2_ENUMERATION_CAP {
        let n = ring.elements.len();
        let mut mt = vec![0u32; n * n];
        let mut at = vec![0u32; n * n];
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                mt[a as usize * n + b as usize] = ring.mul(a, b);
                at[a as usize * n + b as usize] = ring.add(a, b);
            }
        }
        ring.mul_table = Some(mt);
        ring.add_table = Some(at);
    }
    Ok(ring)
}

/// Index of {units ≡ 1 mod n2} inside {units ≡ 1 mod n1}, for n2 ⊆ n1.
///
/// Both groups contain the kernel of reduction from the full unit group, so
/// the index equals |image of O_K^* in (O/n2)^*| / |image in (O/n1)^*|,
/// computed by exact subgroup closure in the residue rings.
pub fn unit_index_mod(
    field: &NumberFieldData,
    n1: &IdealHnf,
    n2: &IdealHnf,
    bound: u64,
) -> Result<BigInt, FieldError> {
    if !n1.contains_ideal(n2) {
        return Err(FieldError::NotNested);
    }
    let img1 = unit_image_order(field, n1, bound)?;
    let img2 = unit_image_order(field, n2, bound)?;
    let (q, r) = num_integer::Integer::div_rem(&img2, &img1);
    if !r.is_zero() {
        return Err(FieldError::NonDivisible(format!(
            "unit image orders {img2} / {img1} do not divide"
        )));
    }
    Ok(q)
}

/// |image of O_K^* in (O/n)^*|.
pub fn unit_image_order(
    field: &NumberFieldData,
    n: &IdealHnf,
    bound: u64,
) -> Result<BigInt, FieldError> {
    if n.is_unit_ideal() {
        return Ok(BigInt::one());
    }
    let ring = residue_ring(field, n, bound)?;
    let gens: Vec<u32> = field
        .all_unit_generators()
        .iter()
        .map(|u| ring.index_of(u))
        .collect();
    // inverses are needed for closure of the group, not just the monoid;
    // each generator has finite order in the finite ring so the monoid
    // closure already is the group closure
    let sub = ring.unit_subgroup(&gens);
    Ok(BigInt::from(sub.len()))
}


pub fn ideal_norm(field: &NumberFieldData, ideal: &IdealHnf) -> Result<BigInt, FieldError> {
    field.validate_ideal(&ideal.matrix)?;
    Ok(ideal.norm())
}

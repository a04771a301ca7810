//! Exact integral cohomology of cusp cross-sections: lattice
//! representations of the polycyclic stabilizer, the Koszul/mapping-cone
//! total complex, Smith normal form tables, the fiber-degree ± splitting,
//! and torsion-order bookkeeping.

mod cheeger;
mod complex;
mod rep;
mod smith;
mod split;

pub use cheeger::{
    cheeger_torsion, covolume_from_gram, relative_torsion_bound, CovolumeData, CovolumeEntry,
    TorsionBoundReport,
};
pub use complex::{total_complex, IntComplex};
pub use rep::{
    build_rep_external, build_rep_symd, lattice_mult_matrix, mapping_torus_rep, trivial_rep,
    LatticeRep,
};
pub use smith::{smith_cohomology, DegreeData, IntegralCohomologyTable};
pub use split::{pm_split_integral, PmSplit};

use std::fmt;

use crate::numberfield::FieldError;

#[derive(Debug, Clone)]
pub enum IntegralError {
    Malformed(String),
    NonCommuting(String),
    ConjugationMismatch { unit: usize, translation: usize },
    NonUnimodular(usize),
    RankOverflow,
    ConeMapIncompatible(String),
    UnsupportedSignature { r1: usize, r2: usize },
    MissingData(String),
    Field(FieldError),
}

impl fmt::Display for IntegralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegralError::Malformed(s) => write!(f, "malformed representation: {s}"),
            IntegralError::NonCommuting(s) => write!(f, "generators do not commute: {s}"),
            IntegralError::ConjugationMismatch { unit, translation } => write!(
                f,
                "conjugation of translation {translation} by unit {unit} does not match the conj matrix"
            ),
            IntegralError::NonUnimodular(i) => write!(f, "generator {i} is not unimodular"),
            IntegralError::RankOverflow => write!(f, "lattice rank exceeds the supported size"),
            IntegralError::ConeMapIncompatible(s) => write!(f, "cone construction failed: {s}"),
            IntegralError::UnsupportedSignature { r1, r2 } => {
                write!(f, "splitting requires r2 = 1 and r1 > 0, got ({r1}, {r2})")
            }
            IntegralError::MissingData(s) => write!(f, "missing data: {s}"),
            IntegralError::Field(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for IntegralError {}

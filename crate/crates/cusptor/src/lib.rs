//! Exact-arithmetic library for the boundary combinatorics and integral
//! torsion bookkeeping of SL(2) over a number field: principal congruence
//! subgroup indices and cusps, Kostant-type boundary complexes with their
//! Hodge kernels and ± splittings, integral cohomology of cusp
//! cross-sections via Smith normal form, and torsion-growth reports.

pub mod cli;
pub mod congruence;
pub mod fixtures;
pub mod growth;
pub mod integral;
pub mod kostant;
pub mod linalg;
pub mod numberfield;
pub mod report;

//! End-to-end exercises over the quartic field x^4 − x − 1 (signature
//! (2,1), unit rank 2): cusp combinatorics through a residue field of 16
//! elements, unit-power order finding, and the full growth pipeline.

use num_bigint::BigInt;
use num_traits::Zero;

use cusptor::congruence::{
    cusp_fiber_count, cusp_set, fiber_count_by_orbit_enumeration, negligibility_sums,
    parabolic_index, sl2_order_mod, CongruenceLevel, CuspRep,
};
use cusptor::fixtures;
use cusptor::integral::{build_rep_external, smith_cohomology, total_complex, trivial_rep};
use cusptor::linalg::int;
use cusptor::numberfield::DEFAULT_ENUMERATION_BOUND as BOUND;

fn principal_cusp() -> CuspRep {
    CuspRep { eta: (vec![1], vec![0]), ideal_class_index: 0, stabilizer_size: 1 }
}

#[test]
fn quartic_cusp_combinatorics() {
    let f = fixtures::quartic_field();
    let two = f.principal_ideal(&[int(2), int(0), int(0), int(0)]);
    let four = f.ideal_pow(&two, 2);
    assert_eq!(two.norm(), int(16));
    assert_eq!(four.norm(), int(256));
    let l2 = CongruenceLevel::new(two.clone());
    let l4 = CongruenceLevel::new(four);
    // (2) is inert (the reduction is the field with 16 elements):
    // |SL(2, F_16)| = 16^3 (1 - 1/256) = 4080
    assert_eq!(sl2_order_mod(&f, &l2, BOUND).unwrap(), int(4080));
    let cusp = principal_cusp();
    let fiber = cusp_fiber_count(&f, &l2, &l4, &cusp, BOUND).unwrap();
    let by_orbits = fiber_count_by_orbit_enumeration(&f, &l2, &l4, BOUND).unwrap();
    assert_eq!(fiber, by_orbits);
    // partition across the two levels
    let c2 = cusp_set(&f, &l2, BOUND).unwrap();
    let c4 = cusp_set(&f, &l4, BOUND).unwrap();
    assert_eq!(BigInt::from(c2.len()) * &fiber, BigInt::from(c4.len()));
    // unit part of the parabolic index is genuine here: theta has order 15
    // in the residue field, so the unit image is nontrivial
    let par = parabolic_index(&f, &l2, &l4, &cusp, BOUND).unwrap();
    assert!(!par.is_zero());
    let rows = negligibility_sums(&f, &l2, &[l2.clone(), l4.clone()], BOUND).unwrap();
    assert!(rows[0].sum28 > rows[1].sum28);
}

#[test]
fn quartic_rep_fixture_matches_generated() {
    // the checked-in document reproduces the generated trivial rep
    let f = fixtures::quartic_field();
    let generated = trivial_rep(&f, &f.unit_ideal(), BOUND).unwrap();
    let doc = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/data/rep_quartic_trivial.json"
    ))
    .unwrap();
    let ingested = build_rep_external(&doc).unwrap();
    assert_eq!(generated.conj_data, ingested.conj_data);
    let t1 = smith_cohomology(&total_complex(&generated).unwrap());
    let t2 = smith_cohomology(&total_complex(&ingested).unwrap());
    assert_eq!(t1, t2);
    assert_eq!(t1.free_ranks(), vec![1, 2, 1, 0, 1, 2, 1]);
}

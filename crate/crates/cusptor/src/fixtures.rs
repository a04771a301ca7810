//! Canonical field documents used across tests and as CLI input examples.

use crate::numberfield::{load_field, NumberFieldData};

/// Q(i): Gaussian integers, class number 1, units {±1, ±i}.
pub fn gaussian_json() -> String {
    r#"{
        "poly": [1, 0, 1],
        "signature": [0, 1],
        "integral_basis": [[1, 0], [0, 1]],
        "units": [],
        "torsion_order": 4,
        "torsion_generator": [0, 1],
        "class_ideals": [[[1, 0], [0, 1]]],
        "disc": "-4",
        "provenance": "Q(i); power basis is integral; torsion generator i"
    }"#
    .to_string()
}

/// Q(sqrt 2): real quadratic, fundamental unit 1 + sqrt 2 of norm -1.
pub fn sqrt2_json() -> String {
    r#"{
        "poly": [-2, 0, 1],
        "signature": [2, 0],
        "integral_basis": [[1, 0], [0, 1]],
        "units": [[1, 1]],
        "torsion_order": 2,
        "class_ideals": [[[1, 0], [0, 1]]],
        "disc": "8",
        "provenance": "Q(sqrt2); fundamental unit 1+sqrt2, norm -1"
    }"#
    .to_string()
}

/// The quartic field Q[x]/(x^4 - x - 1), signature (2, 1), discriminant -283
/// (squarefree, so the power basis is integral). Unit generators: theta
/// (norm -1) and theta^2 - 1 (norm -1); independence was checked against the
/// log embedding, fundamentality is taken from tables and not re-derived.
pub fn quartic_json() -> String {
    r#"{
        "poly": [-1, -1, 0, 0, 1],
        "signature": [2, 1],
        "integral_basis": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        "units": [[0, 1, 0, 0], [-1, 0, 1, 0]],
        "torsion_order": 2,
        "class_ideals": [[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]],
        "disc": "-283",
        "provenance": "x^4 - x - 1; units theta, theta^2 - 1 of norm -1"
    }"#
    .to_string()
}

pub fn gaussian_field() -> NumberFieldData {
    load_field(&gaussian_json()).expect("gaussian fixture must validate")
}

pub fn sqrt2_field() -> NumberFieldData {
    load_field(&sqrt2_json()).expect("sqrt2 fixture must validate")
}

pub fn quartic_field() -> NumberFieldData {
    load_field(&quartic_json()).expect("quartic fixture must validate")
}

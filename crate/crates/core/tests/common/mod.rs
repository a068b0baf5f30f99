#![allow(dead_code)]

use std::sync::Arc;

use conic_census::bundle::{validate_bundle, BinaryForm, ConicBundle};
use conic_census::gf::{make_field, FieldDesc};

pub fn field(p: u32) -> Arc<FieldDesc> {
    make_field(p, 1).unwrap()
}

pub fn bundle(p: u32, l: usize, a: &[i64], b: &[i64], c: &[i64]) -> ConicBundle {
    let f = field(p);
    validate_bundle(
        f.clone(),
        l,
        BinaryForm::from_ints(&f, a),
        BinaryForm::from_ints(&f, b),
        BinaryForm::from_ints(&f, c),
    )
    .unwrap()
}

/// x² + y² − z² over F_3.
pub fn trivial3() -> ConicBundle {
    bundle(3, 0, &[1], &[1], &[-1])
}

/// t x² + s y² + (s+t) z²: non-split at ∞ and t, split at t+1.
pub fn l1() -> ConicBundle {
    bundle(3, 1, &[0, 1], &[1, 0], &[1, 1])
}

/// (s²−t²) x² + (s²+t²) y² + st z²: split at t−1, ∞, t²+1; non-split at t, t+1.
pub fn l2() -> ConicBundle {
    bundle(3, 2, &[1, 0, -1], &[1, 0, 1], &[0, 1, 0])
}

//! Fixtures shared by the benchmarks in `benches/`.

use twostage_core::epimodel::{build_infection, build_transition, expand_age, AgeStructure};
use twostage_core::{DenseMatrix, SaiuqrParams};

/// Transition and infection matrices with `groups` non-mixing age groups.
pub fn epidemic_system(phi: f64, groups: usize) -> (DenseMatrix, DenseMatrix) {
    let p = SaiuqrParams::reference().with_phi(phi);
    let a = build_transition(&p).expect("reference parameters are valid");
    let b = build_infection(&p).expect("reference parameters are valid");
    if groups <= 1 {
        return (a, b);
    }
    let age = AgeStructure::same_group_only(vec![1.0; groups]).expect("positive populations");
    expand_age(&a, &b, &age).expect("4x4 blocks")
}

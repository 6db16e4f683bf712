//! The worked problems shipped as built-in instances.

use crate::model::{unit_box, ConstraintSet, ProblemSpec};
use crate::poly::{int, Polynomial};

/// `F_1 = F_2 = x1³ + x1 − x2` on the half-plane `x1 + x2 ≤ 0`.
pub fn cubic_half_plane() -> ProblemSpec {
    let x1 = Polynomial::var(2, 0);
    let x2 = Polynomial::var(2, 1);
    let f = &(&(&(&x1 * &x1) * &x1) + &x1) - &x2;
    let k = ConstraintSet::new(2, vec![&x1 + &x2], vec![]).expect("affine data");
    ProblemSpec::pvi(k, vec![f.clone(), f]).expect("consistent sizes")
}

/// Complementarity problem with `F = (x1 − 1, −x1³ − x2 + 1)`.
pub fn cubic_pcp() -> ProblemSpec {
    let x1 = Polynomial::var(2, 0);
    let x2 = Polynomial::var(2, 1);
    let one = Polynomial::one(2);
    let f2 = &(&(-&(&(&x1 * &x1) * &x1)) - &x2) + &one;
    ProblemSpec::pcp(vec![&x1 - &one, f2]).expect("consistent sizes")
}

/// Unconstrained `f = −1 / (x1² − 2x1x2 + x2² + 1)`.
pub fn rational_bump() -> ProblemSpec {
    let x1 = Polynomial::var(2, 0);
    let x2 = Polynomial::var(2, 1);
    let d = &x1 - &x2;
    let q = &(&d * &d) + &Polynomial::one(2);
    ProblemSpec::fracopt(ConstraintSet::whole_space(2), Polynomial::constant(2, int(-1)), q).expect("nonzero q")
}

/// `F ≡ 0` on `[0, 1]²`: every point solves.
pub fn zero_field_box() -> ProblemSpec {
    ProblemSpec::pvi(unit_box(2), vec![Polynomial::zero(2), Polynomial::zero(2)]).expect("consistent sizes")
}

/// Name and instance of every built-in problem.
pub fn all() -> Vec<(&'static str, ProblemSpec)> {
    vec![
        ("cubic-half-plane", cubic_half_plane()),
        ("cubic-pcp", cubic_pcp()),
        ("rational-bump", rational_bump()),
        ("zero-field-box", zero_field_box()),
    ]
}

pub fn by_name(name: &str) -> Option<ProblemSpec> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}

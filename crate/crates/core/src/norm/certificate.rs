use std::fmt;

use super::space::{FunctionalTuple, SpaceSpec};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UpperMethod {
    /// `λ·Σ‖x_j‖` with `λ = sup |F|` over the ℓ₁ unit ball.
    StrongUnit,
    /// The upper bound is the optimum of an LP whose optimum is the norm.
    ExactMatch,
}

impl fmt::Display for UpperMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpperMethod::StrongUnit => "strong_unit",
            UpperMethod::ExactMatch => "exact_match",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormCertificate {
    pub space: SpaceSpec,
    pub lower: Rational,
    pub upper: Rational,
    /// Scores exactly `lower` under [`super::tuple_seminorm_value`].
    pub witness: FunctionalTuple,
    pub upper_method: UpperMethod,
    pub exact: bool,
    pub lambda: Rational,
    /// Variables of the input whose generators carry the strong-unit bound.
    pub unit_support: Vec<usize>,
    /// Upper bound for `Σ‖x_j‖` over `unit_support`.
    pub unit_norm_sum: Rational,
    pub cells: usize,
    pub k_max: usize,
}

impl NormCertificate {
    pub(crate) fn zero(space: &SpaceSpec) -> Self {
        let zero = Rational::from_integer(0.into());
        NormCertificate {
            space: space.clone(),
            lower: zero.clone(),
            upper: zero.clone(),
            witness: FunctionalTuple::single(vec![zero.clone(); space.dim()]),
            upper_method: UpperMethod::ExactMatch,
            exact: true,
            lambda: zero.clone(),
            unit_support: Vec::new(),
            unit_norm_sum: zero,
            cells: 1,
            k_max: 2,
        }
    }

    pub fn gap(&self) -> Rational {
        &self.upper - &self.lower
    }
}

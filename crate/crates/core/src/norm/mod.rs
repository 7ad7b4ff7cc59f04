//! Norms of free vector lattice elements under the free Banach lattice norm,
//! certified by a lower bound with an explicit functional tuple and an upper
//! bound from either an exact LP or the strong-unit estimate.

mod audit;
mod bounds;
mod certificate;
mod exact;
mod space;

pub use audit::{maximality_audit, standard_family, AuditEntry, AuditReport, LatticeSeminorm, TupleSeminorm};
pub use bounds::{norm_bounds, norming_functional, strong_unit_bound, NormOptions, StrongUnit};
pub use certificate::{NormCertificate, UpperMethod};
pub use exact::{norm_exact_polyhedral, Slot, SlotProblem};
pub use space::{constraint_norm, lp_norm, tuple_seminorm_value, FunctionalTuple, PNorm, SpaceSpec};

use crate::pwl::{PwlError, PwlFunction};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum NormError {
    #[error(transparent)]
    Pwl(#[from] PwlError),
    #[error("exact norms need fvl, seq:1 or seq:inf; got {0}")]
    NotPolyhedral(SpaceSpec),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("functional tuple is empty")]
    EmptyTuple,
    #[error("internal invariant violated: {0}")]
    Fault(String),
}

/// Exact certificate on polyhedral spaces, bounds elsewhere.
pub fn norm_certificate(
    f: &PwlFunction,
    space: &SpaceSpec,
    opts: &NormOptions,
) -> Result<NormCertificate, NormError> {
    if space.is_polyhedral() {
        norm_exact_polyhedral(f, space)
    } else {
        norm_bounds(f, space, opts)
    }
}

fn check_dim(f: &PwlFunction, space: &SpaceSpec) -> Result<(), NormError> {
    if f.dim() != space.dim() {
        return Err(NormError::DimensionMismatch(f.dim(), space.dim()));
    }
    Ok(())
}

fn is_zero_function(f: &PwlFunction) -> Result<bool, NormError> {
    Ok(crate::pwl::equivalent(f, &PwlFunction::zero(f.dim()))?.is_equal())
}

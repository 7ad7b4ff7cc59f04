use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::certificate::NormCertificate;
use super::space::{tuple_seminorm_value, FunctionalTuple, SpaceSpec};
use super::NormError;
use crate::pwl::PwlFunction;
use crate::rational::{frac, Rational, RealValue};

/// A lattice seminorm on the realized functions that is at most one on the
/// generators; the free norm dominates every such seminorm.
pub trait LatticeSeminorm: Send + Sync {
    fn label(&self) -> String;
    fn evaluate(&self, f: &PwlFunction) -> Result<RealValue, NormError>;
}

/// `f ↦ Σ|f(xᵢ)| / max(1, constraint_norm)`. A single point gives an
/// evaluation seminorm.
#[derive(Clone, Debug, PartialEq)]
pub struct TupleSeminorm {
    pub tuple: FunctionalTuple,
    pub space: SpaceSpec,
}

impl LatticeSeminorm for TupleSeminorm {
    fn label(&self) -> String {
        let kind = if self.tuple.len() == 1 { "eval" } else { "tuple" };
        format!("{kind}[{}]", self.tuple.encode())
    }

    fn evaluate(&self, f: &PwlFunction) -> Result<RealValue, NormError> {
        Ok(RealValue::Exact(tuple_seminorm_value(f, &self.tuple, &self.space)?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditEntry {
    pub label: String,
    pub value: RealValue,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub bound: Rational,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }

    pub fn violations(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| !e.ok)
    }
}

/// Checks `ν(f) <= upper` for every seminorm in the family.
pub fn maximality_audit(
    f: &PwlFunction,
    family: &[Box<dyn LatticeSeminorm>],
    cert: &NormCertificate,
) -> Result<AuditReport, NormError> {
    let mut entries = Vec::with_capacity(family.len());
    for nu in family {
        let value = nu.evaluate(f)?;
        let ok = value.le_rational(&cert.upper);
        entries.push(AuditEntry { label: nu.label(), value, ok });
    }
    Ok(AuditReport { bound: cert.upper.clone(), entries })
}

/// Evaluations at the unit vectors and their negatives, then `count` seeded
/// random tuples of one to three points with small rational coordinates.
pub fn standard_family(space: &SpaceSpec, count: usize, seed: u64) -> Vec<Box<dyn LatticeSeminorm>> {
    let d = space.dim();
    let mut out: Vec<Box<dyn LatticeSeminorm>> = Vec::new();
    for j in 0..d {
        for s in [1, -1] {
            let mut x = vec![Rational::from_integer(0.into()); d];
            x[j] = Rational::from_integer(s.into());
            out.push(Box::new(TupleSeminorm { tuple: FunctionalTuple::single(x), space: space.clone() }));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let k = rng.gen_range(1..=3);
        let tuple = (0..k)
            .map(|_| (0..d).map(|_| frac(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect())
            .collect();
        out.push(Box::new(TupleSeminorm { tuple: FunctionalTuple(tuple), space: space.clone() }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::norm::norm_exact_polyhedral;

    #[test]
    fn family_stays_below_the_norm() {
        let space = SpaceSpec::fvl(3);
        let f = PwlFunction::free(parse("(t1 \\/ t2) + |t3| - t1 /\\ (2*t2)", 3).unwrap(), 3).unwrap();
        let cert = norm_exact_polyhedral(&f, &space).unwrap();
        let report = maximality_audit(&f, &standard_family(&space, 40, 3), &cert).unwrap();
        assert!(report.passed(), "{:?}", report.violations().collect::<Vec<_>>());
        assert_eq!(report.entries.len(), 46);
    }

    #[test]
    fn a_too_small_bound_is_caught() {
        let space = SpaceSpec::fvl(2);
        let f = PwlFunction::free(parse("t1 \\/ t2", 2).unwrap(), 2).unwrap();
        let mut cert = norm_exact_polyhedral(&f, &space).unwrap();
        cert.upper = frac(3, 2);
        let family: Vec<Box<dyn LatticeSeminorm>> = vec![Box::new(TupleSeminorm {
            tuple: cert.witness.clone(),
            space: space.clone(),
        })];
        let report = maximality_audit(&f, &family, &cert).unwrap();
        assert!(!report.passed());
    }
}

use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("a chain needs at least 2 nodes, got {0}")]
pub struct ClosedFormError(pub u64);

/// Mean orchestration path length over all pairs of a chain of `n`
/// nodes below the sink: `n + 1`.
pub fn mu_orchestration(n: u64) -> Result<Ratio<u64>, ClosedFormError> {
    if n < 2 {
        return Err(ClosedFormError(n));
    }
    Ok(Ratio::from_integer(n + 1))
}

/// Mean choreography path length over the same pairs: `(n + 1) / 3`.
pub fn mu_choreography(n: u64) -> Result<Ratio<u64>, ClosedFormError> {
    if n < 2 {
        return Err(ClosedFormError(n));
    }
    Ok(Ratio::new(n + 1, 3))
}

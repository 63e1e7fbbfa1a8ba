use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero has no square class")]
    ZeroSquareClass,
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("degenerate discriminant")]
    DegenerateDiscriminant,
    #[error("moduli are not pairwise coprime")]
    NonCoprimeModuli,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("matrix algebra: no division algebra")]
    SplitSymbol,
    #[error("no such algebra over Q: ramified-place count must be even")]
    RamificationParity,
    #[error("profiles have unequal degrees")]
    UnequalDegrees,
    #[error("invalid local profile: {0}")]
    InvalidProfile(String),
    #[error("m = {0} is a perfect square: use the square shortcut")]
    SquareShortcut(u64),
    #[error("algebra is indefinite: Eichler condition holds")]
    EichlerHolds,
    #[error("not a norm: fails Hasse-Maass-Schilling positivity")]
    NotPositive,
    #[error("input exceeds the supported range")]
    InputTooLarge,
    #[error("bound certificate requires m > M with v_q(m) <= 1 at every ramified q")]
    BoundPrecondition,
    #[error("square-class rank {0} exceeds the enumeration cap of 24")]
    RankTooLarge(u32),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid algebra spec `{0}`")]
    AlgebraSpec(String),
    #[error("band scan found an unexpected outlier at {0}")]
    BandCheckFailed(u64),
    #[error("{0}")]
    Usage(String),
}

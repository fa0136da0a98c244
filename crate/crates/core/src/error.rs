use core::fmt;

/// Error type shared by every kernel in this crate.
///
/// Singular configurations are hard errors, never silent NaN propagation:
/// the exact-identity checks downstream need to know *where* a denominator
/// vanished, not just that something went wrong.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A rational was constructed with denominator zero.
    ZeroDenominator,
    /// Division by an exactly vanishing quantity. `what` names the
    /// denominator expression that vanished.
    Pole { what: &'static str },
    /// The linear coefficient of the corner being solved for vanishes at
    /// the plaquette rooted at `(n, m)`.
    SingularCorner { n: i64, m: i64 },
    /// A face corner-solve of the consistency cube hit a vanishing
    /// coefficient; `face` identifies the face.
    SingularFace { face: &'static str },
    /// The gauge constraint `alpha1 * beta0^2 = alpha2 * alpha0^2` fails.
    ConstraintViolated,
    /// `beta0` cannot be written exactly: `alpha2 / alpha1` is not the
    /// square of a rational.
    NonSquareRatio,
    /// `alpha1 = alpha2`: the equation factorizes and the point-symmetry
    /// classification does not apply.
    DegenerateParameters,
    /// Parameter values outside the admissible set (e.g. a vanishing
    /// lattice parameter).
    InvalidParameters { what: &'static str },
    /// A catalog lookup by name did not match any entry.
    UnknownName,
    /// The combiner was fed a characteristic that is already a symmetry.
    ZeroResidual,
    /// Residual ratios disagree where a single constant was required.
    InconsistentFit,
    /// A pointwise ratio fit found genuinely different ratios.
    NotProportional,
    /// A site outside the window was addressed.
    OutOfWindow { n: i64, m: i64 },
    /// After erosion no cells remain to integrate or measure.
    CoreEmpty,
    /// A value of the wrong scalar kind reached a kind-restricted entry
    /// point (e.g. a rational window handed to a float-only flow).
    KindMismatch { expected: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroDenominator => write!(f, "denominator is zero"),
            Error::Pole { what } => write!(f, "pole: {what} vanishes"),
            Error::SingularCorner { n, m } => {
                write!(f, "singular corner solve at plaquette ({n}, {m})")
            }
            Error::SingularFace { face } => write!(f, "singular corner solve on cube face {face}"),
            Error::ConstraintViolated => {
                write!(f, "gauge constraint alpha1*beta0^2 = alpha2*alpha0^2 violated")
            }
            Error::NonSquareRatio => {
                write!(f, "alpha2/alpha1 is not a perfect rational square; beta0 not exact")
            }
            Error::DegenerateParameters => write!(f, "degenerate parameters: alpha1 = alpha2"),
            Error::InvalidParameters { what } => write!(f, "invalid parameters: {what}"),
            Error::UnknownName => write!(f, "unknown catalog name"),
            Error::ZeroResidual => write!(f, "characteristic is already a symmetry (zero residual)"),
            Error::InconsistentFit => write!(f, "residual ratios disagree; no single constant fits"),
            Error::NotProportional => write!(f, "values are not pointwise proportional"),
            Error::OutOfWindow { n, m } => write!(f, "site ({n}, {m}) lies outside the window"),
            Error::CoreEmpty => write!(f, "eroded core region is empty"),
            Error::KindMismatch { expected } => write!(f, "scalar kind mismatch: expected {expected}"),
        }
    }
}

impl core::error::Error for Error {}

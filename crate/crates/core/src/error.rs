use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },
    #[error("leading minor Delta_{0} vanishes: biorthogonal polynomials do not exist at this degree")]
    DegenerateMinor(usize),
    #[error("recurrence coefficient gamma vanishes at n = {0}")]
    ZeroGamma(usize),
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("degree assumption violated: deg B{which} + 1 > deg A{which}")]
    AssumptionAViolated { which: usize },
    #[error("degenerate quadratic case: det[[alpha1, beta1], [beta2, alpha2]] = 0 (leading-coefficient determinant condition fails)")]
    DegenerateQuadratic,
    #[error("A{which} and B{which} share more than one distinct root")]
    AssumptionBViolated { which: usize },
    #[error("seed block is not extendable: frontier {antidiagonal} residual {residual:e}")]
    InconsistentSeed { antidiagonal: usize, residual: f64 },
    #[error("frontier system on antidiagonal {0} is rank deficient")]
    SingularFrontier(usize),
    #[error("seed block has shape {got:?}, expected {expected:?}")]
    SeedShape { got: (usize, usize), expected: (usize, usize) },
    #[error("data not of the form A2 = a*y, B2 = 1")]
    NotReducible,
    #[error("A and B share more than one distinct root")]
    MultipleSharedRoots,
    #[error("A and B have no common root")]
    NoCommonFactor,
    #[error("B is identically zero")]
    ZeroB,
    #[error("anchor has no essential singularity")]
    NotEssential,
    #[error("z lies within {0:e} rad of a Stokes line")]
    StokesProximity(f64),
    #[error("two critical values coincide")]
    SaddleCollision,
    #[error("integrand does not decay along a ray of the contour")]
    DivergentTail,
    #[error("tolerance unreachable within the panel budget (error estimate {0:e})")]
    QuadratureStall(f64),
    #[error("quadratic coupling does not converge on a product of contours (|delta*sigma| <= 1 or non-definite form)")]
    DivergentCoupling,
    #[error("potential is not of the normalized form x^(d+1)/(d+1)")]
    NotNormalized,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

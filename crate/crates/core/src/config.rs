//! Runtime tolerances. `BIMOMENT_TOL` overrides the quadrature target.

/// Environment variable holding a relative quadrature tolerance override.
pub const TOL_ENV: &str = "BIMOMENT_TOL";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative error target for every contour integral.
    pub quad_rel: f64,
    /// Relative residual accepted for the moment recurrences.
    pub recurrence: f64,
    /// Singular values below `rank * sigma_max` are treated as zero.
    pub rank: f64,
    /// Relative leading-minor size below which biorthogonal polynomials are declared absent.
    pub degenerate_minor: f64,
    /// Half-angle margin inside each decay sector, in radians.
    pub sector_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_rel: 1e-12,
            recurrence: 1e-6,
            rank: 1e-8,
            degenerate_minor: 1e-12,
            sector_margin: 0.05,
        }
    }
}

impl Tolerances {
    /// Defaults, with `quad_rel` replaced by `BIMOMENT_TOL` when it parses as a positive float.
    pub fn from_env() -> Self {
        let mut t = Self::default();
        if let Some(v) = std::env::var(TOL_ENV).ok().and_then(|s| s.trim().parse::<f64>().ok()) {
            if v > 0.0 && v.is_finite() {
                t.quad_rel = v;
            }
        }
        t
    }
}

use thiserror::Error;

/// Errors surfaced by the lab's operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation point outside a profile or metric domain.
    #[error("point t = {t} outside domain [{t0}, {t1}]")]
    Domain { t: f64, t0: f64, t1: f64 },

    /// Warping function non-positive (or below the degeneracy cutoff) at the
    /// requested point; curvature is refused rather than extrapolated.
    #[error("degenerate warping f = {f} at t = {t} (cutoff {cutoff})")]
    Degeneracy { t: f64, f: f64, cutoff: f64 },

    /// Bad caller-supplied data (reversed intervals, parameters out of range,
    /// missing system coefficients, malformed grids).
    #[error("invalid input: {0}")]
    Input(String),

    /// A quadrature, extrapolation or fit failed to reach its tolerance.
    /// `achieved` carries the error estimate actually reached.
    #[error("numeric failure in {what}: requested {requested:e}, achieved {achieved:e}")]
    Numeric {
        what: &'static str,
        requested: f64,
        achieved: f64,
    },

    /// ODE integration failure (step-size underflow or step cap).
    #[error("ODE solver failure: {0}")]
    Ode(String),

    /// Area-radius to arclength conversion failed (non-integrable endpoint).
    #[error("arclength conversion failed: {0}")]
    Conversion(String),

    /// Even reflection requested through a core that is not totally geodesic.
    #[error("reflection error: |f'(0)| = {slope} exceeds tolerance {tol}")]
    Reflection { slope: f64, tol: f64 },

    /// Cap-to-bulk blending produced an unusable profile.
    #[error("assembly error: {0}")]
    Assembly(String),

    /// Scan minimizer landed on the grid boundary.
    #[error("scan error: minimizer on grid boundary at eps = {eps:e} (enlarge delta grid)")]
    ScanBoundary { eps: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the kernel can run on (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts a literal. Panics only if the literal is not representable, which
    /// cannot happen for the finite constants used in this crate.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Lossy conversion used for diagnostics and error payloads.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Default absolute/relative tolerance of the local Newton iteration.
    fn newton_tol() -> Self;

    /// Default tolerance of the global (stress balance) Newton iteration in kPa.
    fn global_tol() -> Self;
}

impl Real for f64 {
    fn newton_tol() -> Self {
        1e-10
    }

    fn global_tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn newton_tol() -> Self {
        2e-4
    }

    fn global_tol() -> Self {
        1e-3
    }
}

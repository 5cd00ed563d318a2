//! Exact flat geometry for the Arnoux–Yoccoz genus-3 translation surface and
//! its real-rel deformation family `x_r`, over the cubic field ℚ(α) with
//! `α + α² + α³ = 1`.

pub mod ay;
pub mod cylinders;
pub mod diagram;
pub mod field;
pub mod frame;
pub mod geom;
pub mod homology;
pub mod iet;
pub mod iso;
pub mod refine;
pub mod rel;
pub mod scalar;
pub mod surface;
pub mod twist;
pub mod trace;

pub use field::{FieldError, IsolatingInterval, NfElem};
pub use geom::{Mat2, Vec2};
pub use scalar::Scalar;
pub use surface::{Chain, EdgeRef, HalfEdge, Label, Stratum, Surface, SurfaceError, Vertices};

/// Rationals, the scalar for test surfaces that need no irrational data.
pub type Q = num_rational::BigRational;
pub type NfVec = Vec2<NfElem>;
pub type NfMat = Mat2<NfElem>;

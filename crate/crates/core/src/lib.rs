//! Shortest path distances in the Manhattan Poisson line Cox process.
//!
//! Axis-parallel lines are dropped with Poisson x- and y-intercepts of
//! density `lambda_l`, and every line carries an independent Poisson process
//! of points with density `lambda_c`. Travel is restricted to the lines. The
//! crate answers one question two ways: how far along the network is the
//! nearest point, seen from a typical line crossing or from a typical point?
//!
//! * [`sampler`] and [`pathnet`] simulate the process and run Dijkstra on the
//!   induced network.
//! * [`analytic`] evaluates the exact CDFs, in closed form for the crossing
//!   and by quadrature for the point.
//! * [`montecarlo`] compares the two.
//!
//! ```
//! use manhattan_cox::{analytic, pathnet, ModelParams, Palm};
//!
//! let params = ModelParams::new(1.0, 0.5)?;
//! let f = analytic::cdf_intersection(1.0, &params)?;
//! assert!((f - 0.9689).abs() < 1e-4);
//!
//! let draw = pathnet::simulate_distance(&params, Palm::TypicalIntersection, 7)?;
//! assert!(draw.exact);
//! # Ok::<(), manhattan_cox::Error>(())
//! ```

pub mod analytic;
mod error;
pub mod geom;
pub mod montecarlo;
pub mod pathnet;
pub mod sampler;

pub use error::{Error, Result};
pub use geom::{validate_params, CdfCurve, CurveKind, ModelParams, Window};
pub use sampler::Palm;

// Compiles the guide's code listings as doc-tests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/path-network.md")]
    mod path_network {}
    #[doc = include_str!("../../../book/src/typical-intersection.md")]
    mod typical_intersection {}
    #[doc = include_str!("../../../book/src/typical-point.md")]
    mod typical_point {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
}

//! Exact coefficient arithmetic: finite fields, Galois rings, polynomials and
//! rational functions in t, truncated Laurent series in π = 1/t, 2×2
//! matrices, and linear algebra over fields and Z.

pub mod frac;
pub mod galois;
pub mod integers;
pub mod linalg;
pub mod mat2;
pub mod poly;
pub mod ring;
pub mod series;
pub mod smith;

pub use frac::{Frac, FracRing};
pub use galois::{FieldDescriptor, GaloisRing, GaloisRingDescriptor};
pub use integers::Integers;
pub use mat2::{KMat, Mat2, Matrix2, PolyMat};
pub use poly::{Poly, PolyRing};
pub use ring::Ring;
pub use series::{Series, SeriesRing, TruncatedSeries, DEFAULT_PRECISION};
pub use smith::{smith_normal_form, IntegerMatrix, SmithForm};

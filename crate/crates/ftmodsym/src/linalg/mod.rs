//! Exact linear algebra: big-integer normal forms and rational matrices.

pub mod qmat;
pub mod zmat;

pub use qmat::QMat;
pub use zmat::ZMat;

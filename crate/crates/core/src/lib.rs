//! E-optimal designs for weighted polynomial regression via exact and
//! approximate Tchebycheff functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod design;
pub mod error;
pub mod gram_schmidt;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod tcheb;
pub mod weight;

pub use design::{
    criteria, e_efficiency, fisher_matrix, tcheb_design, Criteria, Design, TchebDesign,
};
pub use error::{Error, Result};
pub use poly::Polynomial;
pub use tcheb::{
    approx_tcheb_function, exact_tcheb_function, TchebFunction, TchebOptions, TchebPoints,
};
pub use weight::WeightFn;

//! Exact Chow-ring, Milnor K-theory and Galois-orbit computations for
//! moduli of plane cubics and their relatives.

pub mod checks;
pub mod cubic27;
pub mod etale;
pub mod groups;
pub mod intersect;
pub mod ksymbols;
pub mod polyring;
pub mod properties;

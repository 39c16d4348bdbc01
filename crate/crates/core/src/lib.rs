pub mod cli;
pub mod contact;
pub mod derlog;
pub mod hs;
pub mod isoscan;
pub mod linalg;
pub mod parse;
pub mod scalar;
pub mod tangent;
pub mod trunc;

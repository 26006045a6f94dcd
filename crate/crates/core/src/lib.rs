mod dd;
pub mod error;
pub mod fock;
pub mod quadrature;

pub mod error;
pub mod exact;
pub mod observables;
pub mod quadrature;
pub mod roots;
pub mod semiclassical;
pub mod special;
pub mod sweep;
pub mod thermo;

pub mod linear;
pub mod nonlinear;
pub mod symbol;
pub mod thermo;

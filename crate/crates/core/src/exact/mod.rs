//! Exact arithmetic: Laurent polynomials in `s = q^{1/2}` over the
//! rationals, polynomials in `K` over those, and cyclotomic extensions.

mod coeff;
pub mod cyclo;
mod kpoly;
mod laurent;
mod text;

pub use coeff::Coeff;
pub use cyclo::Cyclo;
pub use kpoly::KPoly;
pub use laurent::SLaurent;
pub use text::parse_kpoly;

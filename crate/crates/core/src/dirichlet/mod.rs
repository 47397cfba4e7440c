//! Dirichlet characters, 1-bounded multiplicative functions, and the
//! pretentious distance machinery built on them.

mod character;
mod distance;
mod multfn;

pub use character::{verify_orthogonality, CharacterGroup, DirichletCharacter};
pub use distance::{
    big_m, big_m_q, big_m_with, dirichlet_series_partial, gs_chain_report, triangle_check,
    triangle_check_with, BigMQResult, BigMResult, DistanceEngine, DistanceResult, GridMeta,
    GridSpec, GsChainReport,
};
pub use multfn::MultFn;

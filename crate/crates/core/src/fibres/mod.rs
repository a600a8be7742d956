//! Fibres of the KW map: a solver for Φ(x) = c, the parametrization of generic fibres by
//! centralizer groups, the GZ flows, and the Hessenberg section of gl(n).

mod flow;
mod hessenberg;
mod sampler;
mod solver;

pub use flow::gz_flow;
pub use hessenberg::{hessenberg_section, is_unit_hessenberg};
pub use sampler::{sample_fibre_point, FibreSampler};
pub use solver::{solve_fibre, target_from_spectra, SolveReport, SolverOptions};

//! Combinatorics of the Bruhat–Tits building of `PGL_{d+1}` and of the
//! strata of the semistable model of Drinfeld's upper half space.

pub mod building;
pub mod counting;
pub mod gf;

pub use building::{ball, typed_neighbors, v_n_m, vertex_neighbors, BuildingBall, LatticeClass};
pub use counting::{
    arrangement_closed_form, arrangement_poincare_gysin, arrangement_poincare_mobius, blowup_poincare, gaussian_binomial,
    point_count_oracle, rational_arrangement_poincare, simplices_through_vertex, stratum_poincare, stratum_type,
    PoincarePoly, SimplexType, SpaceSpec,
};

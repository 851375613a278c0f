//! Spectral sequences of filtered complexes, Čech complexes of covering
//! nerves and the Steenbrink double complex of a semistable degeneration.

pub mod cech;
pub mod complex;
pub mod steenbrink;

pub use cech::{cech_complex, cech_vs_total_check, flag_complex, lambda_flags, NerveDatum};
pub use complex::{Degeneration, FilteredComplex, GradedComplex, Page, Subquotient};
pub use steenbrink::{monodromy_endomorphism, steenbrink_double_complex, SteenbrinkDatum};

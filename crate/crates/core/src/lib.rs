//! Torus-equivariant geometry of the quiver Grassmannian `Gr_1(M)` for the
//! cyclic quiver with a nilpotent Jordan representation: fixed points,
//! Białynicki-Birula cells, the GKM graph and the dual (Knutson–Tao) basis.

pub mod cells;
pub mod cli;
pub mod cohomology;
pub mod exactalg;
pub mod fixpoints;
pub mod gkm;
pub mod model;
pub mod verify;

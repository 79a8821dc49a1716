//! Classification of `{v, *, 1}`-equations over commutative residuated
//! lattices, and-branching counter machines with bounded acceptance search,
//! the exponential encoding `M_K`, and finite residuated frames.

pub mod acm;
pub mod eqcore;
pub mod frames;
pub mod linear;
pub mod mk;
pub mod spine;

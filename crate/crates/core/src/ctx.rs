use crate::rat::{rq, Rat};

/// Engine limits and numeric knobs.
#[derive(Clone, Debug, PartialEq)]
pub struct Ctx {
    /// Maximum number of user variables (free plus bound) in a decomposition.
    pub max_vars: usize,
    /// Maximum total degree of input polynomials in the user variables.
    pub max_degree: u32,
    /// Depth m of the eps := eta^m reparametrization schedule.
    pub reparam_depth: u32,
    pub quadrature_radius: Rat,
    pub grid_depth: u32,
}

impl Default for Ctx {
    fn default() -> Self {
        Ctx { max_vars: 3, max_degree: 4, reparam_depth: 4, quadrature_radius: rq(1, 1_000_000_000), grid_depth: 12 }
    }
}

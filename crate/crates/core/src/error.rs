use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(&'static str),
    #[error("axis {axis} has {nodes} nodes; at least 3 are required")]
    TooCoarse { axis: usize, nodes: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("region contains no grid nodes")]
    EmptyRegion,
    #[error("parse error at position {position}: expected {}", expected.join(" or "))]
    Parse {
        position: usize,
        expected: Vec<String>,
    },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("evaluation failed at node {node}: {message}")]
    Eval { node: usize, message: String },
    #[error("tabulated potential has {found} values, grid has {expected} nodes")]
    TabulatedShape { expected: usize, found: usize },
    #[error("V + alpha must be positive (minimum {min})")]
    NonpositiveShift { min: f64 },
    #[error("dense oracle limited to {limit} unknowns, got {size}")]
    TooLarge { size: usize, limit: usize },
    #[error("eigensolver did not converge in {max_iter} iterations (residuals {residuals:?})")]
    NoConvergence { max_iter: usize, residuals: [f64; 2] },
    #[error("ground state changes sign")]
    NegativeGroundState,
    #[error("only {surviving} nodes survive the ground-state floor")]
    DegenerateGroundState { surviving: usize },
    #[error("mask is empty after erosion")]
    EmptyMask,
    #[error("g certificate dictionary is empty")]
    SentinelG,
    #[error("cutoff does not vanish on the boundary")]
    UnsupportedRho,
    #[error("ratio mask is degenerate")]
    DegenerateMask,
    #[error("no source nodes")]
    EmptySource,
    #[error("anchor node {node} lies outside the support of the cutoff")]
    AnchorOutsideSupport { node: usize },
    #[error("no nodes near the requested level after widening")]
    NoLevelNodes,
    #[error("boundary infimum of V is {value}; it must be positive")]
    BoundaryPotentialNonpositive { value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

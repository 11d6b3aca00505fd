use alloc::string::String;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EsrError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("incomplete gamma order {order} outside supported range |order| <= {bound}")]
    UnsupportedOrder { order: i64, bound: i64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("term count {count:.3e} for k={k}, L={l}, M_D={m_d} exceeds the budget of {budget:.3e}")]
    ComplexityBudget {
        k: u32,
        l: u32,
        m_d: u32,
        count: f64,
        budget: f64,
    },
    #[error(
        "numerical cancellation: {digits_lost:.1} decimal digits lost exceeds the {available:.0} available; use the quadrature method"
    )]
    NumericalCancellation { digits_lost: f64, available: f64 },
    #[error("contract violation: {0}")]
    Contract(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("quadrature failed to converge: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    OracleFailure {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },
}

pub type Result<T> = core::result::Result<T, EsrError>;

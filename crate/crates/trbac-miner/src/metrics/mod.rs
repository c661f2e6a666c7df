//! Policy and role quality metrics, attribute expressions, and role
//! suggestions for new users.

mod attrs;
mod quality;

pub use attrs::{
    annotate_fits, interpretability, suggest_roles, AttrExpr, AttributeData, EXACT_FIT_BUDGET,
};
pub use quality::{
    cls_sz, co_trap, cov_entit, format_rational, parse_rational, rat, ui_score, wsc, MetricKind,
    MetricSpec, QualityValue, WscWeights,
};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute data: {0}")]
    BadAttributeData(String),
    #[error("metric requires attribute data")]
    MissingAttributeData,
    #[error("{0}")]
    BadWeights(String),
    #[error("{0}")]
    BadNumber(String),
}

//! Roles, hierarchies, and timed user-permission assignments.

mod format;
mod ids;
#[allow(clippy::module_inception)]
mod policy;
mod tupa;

pub use format::{policy_from_json, policy_to_json};
pub use ids::{Interner, PermId, RoleId, UserId};
pub use policy::{InheritanceType, Role, RoleFit, TrbacPolicy};
pub use tupa::Tupa;

#[derive(Debug, thiserror::Error)]
pub enum PolicyError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Temporal(#[from] crate::temporal::TemporalError),
    #[error("{0}")]
    Format(String),
}

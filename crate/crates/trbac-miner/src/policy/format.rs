use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::temporal::parse_bpes;

use super::ids::{Interner, PermId, RoleId, UserId};
use super::policy::{InheritanceType, Role, RoleFit, TrbacPolicy};
use super::PolicyError;

/// On-disk shape. Role membership is recorded by name so files survive
/// renumbering; hierarchy edges use the explicit role ids.
#[derive(Serialize, Deserialize)]
struct PolicyDoc {
    it: String,
    users: Vec<String>,
    perms: Vec<String>,
    roles: Vec<RoleDoc>,
}

#[derive(Serialize, Deserialize)]
struct RoleDoc {
    id: u32,
    #[serde(rename = "asgndU")]
    asgnd_users: Vec<String>,
    #[serde(rename = "asgndP")]
    asgnd_perms: Vec<String>,
    ta: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    parents: Vec<u32>,
    #[serde(rename = "bestFit", default, skip_serializing_if = "Option::is_none")]
    best_fit: Option<BTreeMap<String, BTreeSet<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    am: Option<u64>,
}

pub fn policy_to_json(policy: &TrbacPolicy) -> Result<String, PolicyError> {
    let roles = policy
        .roles
        .iter()
        .map(|(&r, role)| RoleDoc {
            id: r.0,
            asgnd_users: role
                .asgnd_users
                .iter()
                .map(|u| policy.users.name(u.0).to_string())
                .collect(),
            asgnd_perms: role
                .asgnd_perms
                .iter()
                .map(|p| policy.perms.name(p.0).to_string())
                .collect(),
            ta: role.ta.to_string(),
            parents: role.parents.iter().map(|q| q.0).collect(),
            best_fit: role.fit.as_ref().map(|f| f.expr.clone()),
            am: role.fit.as_ref().map(|f| f.mismatch),
        })
        .collect();
    let doc = PolicyDoc {
        it: policy.it.to_string(),
        users: policy.users.names().to_vec(),
        perms: policy.perms.names().to_vec(),
        roles,
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| PolicyError::Format(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn policy_from_json(text: &str) -> Result<TrbacPolicy, PolicyError> {
    let doc: PolicyDoc =
        serde_json::from_str(text).map_err(|e| PolicyError::Format(e.to_string()))?;
    let users = Interner::from_names(doc.users);
    let perms = Interner::from_names(doc.perms);
    let mut roles: BTreeMap<RoleId, Role> = BTreeMap::new();
    for rd in &doc.roles {
        let lookup = |interner: &Interner, name: &str, what: &str| {
            interner.id(name).ok_or_else(|| {
                PolicyError::Format(format!("role {}: unknown {what} `{name}`", rd.id))
            })
        };
        let asgnd_users = rd
            .asgnd_users
            .iter()
            .map(|n| lookup(&users, n, "user").map(UserId))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let asgnd_perms = rd
            .asgnd_perms
            .iter()
            .map(|n| lookup(&perms, n, "perm").map(PermId))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let ta = parse_bpes(&rd.ta)
            .map_err(|e| PolicyError::Format(format!("role {}: {e}", rd.id)))?;
        let fit = match (&rd.best_fit, rd.am) {
            (None, None) => None,
            (Some(expr), Some(mismatch)) => {
                if expr.values().any(|vs| vs.is_empty()) {
                    return Err(PolicyError::Format(format!(
                        "role {}: empty bestFit conjunct",
                        rd.id
                    )));
                }
                Some(RoleFit {
                    expr: expr.clone(),
                    mismatch,
                })
            }
            _ => {
                return Err(PolicyError::Format(format!(
                    "role {}: bestFit and am must appear together",
                    rd.id
                )))
            }
        };
        let prev = roles.insert(
            RoleId(rd.id),
            Role {
                asgnd_users,
                asgnd_perms,
                ta,
                parents: rd.parents.iter().map(|&q| RoleId(q)).collect(),
                children: BTreeSet::new(),
                fit,
            },
        );
        if prev.is_some() {
            return Err(PolicyError::Format(format!("duplicate role id {}", rd.id)));
        }
    }
    let edges: Vec<(RoleId, RoleId)> = roles
        .iter()
        .flat_map(|(&r, role)| role.parents.iter().map(move |&q| (q, r)))
        .collect();
    for (parent, child) in edges {
        roles
            .get_mut(&parent)
            .ok_or_else(|| {
                PolicyError::Format(format!("role {child}: unknown parent {parent}"))
            })?
            .children
            .insert(child);
    }
    let policy = TrbacPolicy {
        it: doc.it.parse()?,
        users,
        perms,
        roles,
    };
    policy.validate()?;
    Ok(policy)
}

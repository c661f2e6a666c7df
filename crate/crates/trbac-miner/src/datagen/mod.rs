//! Seeded synthetic inputs: planted flat RBAC policies with attribute data,
//! temporal extension of their roles, and expansion to assignment form.

mod extend;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::metrics::{AttributeData, MetricsError};
use crate::policy::{
    InheritanceType, Interner, PermId, PolicyError, Role, RoleId, TrbacPolicy, Tupa, UserId,
};
use crate::temporal::TemporalError;

pub use extend::{extend_complex, extend_simple, WorkSchedule, SIMPLE_POOL};

#[derive(Debug, thiserror::Error)]
pub enum DatagenError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Temporal(#[from] TemporalError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CountRange {
    pub min: u32,
    pub max: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenParams {
    #[serde(rename = "nUsers")]
    pub n_users: u32,
    #[serde(rename = "nPerms")]
    pub n_perms: u32,
    #[serde(rename = "nRoles")]
    pub n_roles: u32,
    #[serde(rename = "rolesPerUser")]
    pub roles_per_user: CountRange,
    #[serde(rename = "permsPerRole")]
    pub perms_per_role: CountRange,
    #[serde(rename = "nAttrs")]
    pub n_attrs: u32,
    #[serde(default)]
    pub noise: f64,
    pub seed: u64,
}

impl GenParams {
    pub fn validate(&self) -> Result<(), DatagenError> {
        let err = |m: String| Err(DatagenError::Config(m));
        if self.n_users == 0 || self.n_perms == 0 || self.n_roles == 0 {
            return err("user, permission, and role counts must be positive".into());
        }
        for (name, range, cap) in [
            ("rolesPerUser", self.roles_per_user, self.n_roles),
            ("permsPerRole", self.perms_per_role, self.n_perms),
        ] {
            if range.min == 0 || range.min > range.max {
                return err(format!("{name}: need 1 <= min <= max"));
            }
            if range.max > cap {
                return err(format!("{name}: max {} exceeds pool {cap}", range.max));
            }
        }
        if self.n_attrs < self.n_roles {
            return err(format!(
                "nAttrs {} must cover one indicator per role ({})",
                self.n_attrs, self.n_roles
            ));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return err(format!("noise {} outside [0,1]", self.noise));
        }
        Ok(())
    }
}

/// Stream labels for the per-entity generators.
pub(crate) mod domain {
    pub const ROLE_PERMS: u64 = 1;
    pub const USER_ROLES: u64 = 2;
    pub const FIXUP: u64 = 3;
    pub const NOISE: u64 = 4;
    pub const DECOY: u64 = 5;
    pub const SIMPLE_TA: u64 = 6;
    pub const SCHEDULES: u64 = 7;
    pub const COMPLEX_TA: u64 = 8;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for one entity of one stream, so draws do not
/// depend on iteration order.
pub(crate) fn domain_rng(seed: u64, domain: u64, id: u64) -> ChaCha8Rng {
    let mixed = splitmix64(splitmix64(splitmix64(seed) ^ domain) ^ id);
    ChaCha8Rng::seed_from_u64(mixed)
}

fn padded(prefix: &str, i: u32, count: u32) -> String {
    let width = count.saturating_sub(1).to_string().len();
    format!("{prefix}{i:0width$}")
}

/// Plants a flat RBAC policy plus attribute data in which every role's
/// members share an indicator value, optionally flipped at the noise rate.
pub fn gen_rbac(params: &GenParams) -> Result<(TrbacPolicy, AttributeData), DatagenError> {
    params.validate()?;
    let users = Interner::from_names((0..params.n_users).map(|i| padded("u", i, params.n_users)));
    let perms = Interner::from_names((0..params.n_perms).map(|i| padded("p", i, params.n_perms)));

    let mut members: BTreeMap<u32, BTreeSet<UserId>> =
        (0..params.n_roles).map(|r| (r, BTreeSet::new())).collect();
    for u in 0..params.n_users {
        let mut rng = domain_rng(params.seed, domain::USER_ROLES, u as u64);
        let m = rng.gen_range(self::range(params.roles_per_user));
        for r in rand::seq::index::sample(&mut rng, params.n_roles as usize, m as usize) {
            members.get_mut(&(r as u32)).unwrap().insert(UserId(u));
        }
    }
    for r in 0..params.n_roles {
        if members[&r].is_empty() {
            let mut rng = domain_rng(params.seed, domain::FIXUP, r as u64);
            members
                .get_mut(&r)
                .unwrap()
                .insert(UserId(rng.gen_range(0..params.n_users)));
        }
    }

    let mut roles = BTreeMap::new();
    for r in 0..params.n_roles {
        let mut rng = domain_rng(params.seed, domain::ROLE_PERMS, r as u64);
        let k = rng.gen_range(self::range(params.perms_per_role));
        let perms_of: BTreeSet<PermId> =
            rand::seq::index::sample(&mut rng, params.n_perms as usize, k as usize)
                .iter()
                .map(|p| PermId(p as u32))
                .collect();
        roles.insert(
            RoleId(r),
            Role::flat(members[&r].clone(), perms_of, crate::temporal::Bpes::empty()),
        );
    }

    let attr_names: Vec<String> = (0..params.n_attrs)
        .map(|a| padded("a", a, params.n_attrs))
        .collect();
    let mut rows = Vec::with_capacity(params.n_users as usize);
    for u in 0..params.n_users {
        let mut noise_rng = domain_rng(params.seed, domain::NOISE, u as u64);
        let mut decoy_rng = domain_rng(params.seed, domain::DECOY, u as u64);
        let mut row = Vec::with_capacity(params.n_attrs as usize);
        for a in 0..params.n_attrs {
            if a < params.n_roles {
                let mut v = u64::from(members[&a].contains(&UserId(u)));
                if noise_rng.gen_bool(params.noise) {
                    v ^= 1;
                }
                row.push(v);
            } else {
                row.push(decoy_rng.gen_range(0..10));
            }
        }
        rows.push(row);
    }
    let attrs = AttributeData::from_rows(attr_names, rows)?;

    let policy = TrbacPolicy {
        it: InheritanceType::Weak,
        users,
        perms,
        roles,
    };
    Ok((policy, attrs))
}

fn range(r: CountRange) -> std::ops::RangeInclusive<u32> {
    r.min..=r.max
}

/// The assignment the policy denotes, in canonical form.
pub fn expand_to_tupa(policy: &TrbacPolicy) -> Result<Tupa, PolicyError> {
    Ok(Tupa::new(
        policy.users.clone(),
        policy.perms.clone(),
        policy.policy_meaning()?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::interpretability;
    use crate::policy::policy_to_json;

    fn small_params(seed: u64) -> GenParams {
        GenParams {
            n_users: 12,
            n_perms: 8,
            n_roles: 4,
            roles_per_user: CountRange { min: 1, max: 2 },
            perms_per_role: CountRange { min: 2, max: 3 },
            n_attrs: 6,
            noise: 0.0,
            seed,
        }
    }

    #[test]
    fn singleton_policy() {
        let params = GenParams {
            n_users: 1,
            n_perms: 1,
            n_roles: 1,
            roles_per_user: CountRange { min: 1, max: 1 },
            perms_per_role: CountRange { min: 1, max: 1 },
            n_attrs: 1,
            noise: 0.0,
            seed: 7,
        };
        let (pol, _) = gen_rbac(&params).unwrap();
        assert_eq!(pol.roles.len(), 1);
        let role = &pol.roles[&RoleId(0)];
        assert_eq!(role.asgnd_users.len(), 1);
        assert_eq!(role.asgnd_perms.len(), 1);
    }

    #[test]
    fn generation_is_replayable() {
        let (a, attrs_a) = gen_rbac(&small_params(42)).unwrap();
        let (b, attrs_b) = gen_rbac(&small_params(42)).unwrap();
        assert_eq!(policy_to_json(&a).unwrap(), policy_to_json(&b).unwrap());
        assert_eq!(attrs_a, attrs_b);
        let (c, _) = gen_rbac(&small_params(43)).unwrap();
        assert_ne!(policy_to_json(&a).unwrap(), policy_to_json(&c).unwrap());
    }

    #[test]
    fn noiseless_attributes_explain_every_role() {
        let (pol, attrs) = gen_rbac(&small_params(42)).unwrap();
        assert_eq!(interpretability(&pol, &attrs).unwrap(), 0);
        assert!(pol.roles.values().all(|r| !r.asgnd_users.is_empty()));
    }

    #[test]
    fn infeasible_shapes_are_rejected() {
        let mut p = small_params(1);
        p.perms_per_role.max = 9;
        assert!(matches!(gen_rbac(&p), Err(DatagenError::Config(_))));
        let mut p = small_params(1);
        p.n_attrs = 3;
        assert!(gen_rbac(&p).is_err());
        let mut p = small_params(1);
        p.noise = 1.5;
        assert!(gen_rbac(&p).is_err());
    }

    #[test]
    fn params_parse_from_json() {
        let text = r#"{
            "nUsers": 12, "nPerms": 8, "nRoles": 4,
            "rolesPerUser": {"min": 1, "max": 2},
            "permsPerRole": {"min": 2, "max": 3},
            "nAttrs": 6, "seed": 42
        }"#;
        let p: GenParams = serde_json::from_str(text).unwrap();
        assert_eq!(p.noise, 0.0);
        assert_eq!(p.seed, 42);
    }

    #[test]
    fn expansion_covers_every_membership_pair() {
        let (pol, _) = gen_rbac(&small_params(9)).unwrap();
        let mut pol = pol;
        extend_simple(&mut pol, 9);
        let tupa = expand_to_tupa(&pol).unwrap();
        for role in pol.roles.values() {
            for &u in &role.asgnd_users {
                for &p in &role.asgnd_perms {
                    assert!(tupa.get(u, p).is_some());
                }
            }
        }
        let empty = TrbacPolicy {
            it: InheritanceType::Weak,
            users: Interner::default(),
            perms: Interner::default(),
            roles: BTreeMap::new(),
        };
        assert!(expand_to_tupa(&empty).unwrap().is_empty());
    }

    #[test]
    fn flat_single_role_expands_to_full_product() {
        let params = GenParams {
            n_users: 5,
            n_perms: 4,
            n_roles: 1,
            roles_per_user: CountRange { min: 1, max: 1 },
            perms_per_role: CountRange { min: 4, max: 4 },
            n_attrs: 1,
            noise: 0.0,
            seed: 3,
        };
        let (mut pol, _) = gen_rbac(&params).unwrap();
        extend_simple(&mut pol, 3);
        let tupa = expand_to_tupa(&pol).unwrap();
        assert_eq!(tupa.len(), 5 * 4);
    }
}

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::temporal::Bpes;

use super::ids::{Interner, PermId, RoleId, UserId};
use super::tupa::Tupa;
use super::PolicyError;

/// How a role's temporal availability applies to inherited permissions.
/// Weak: an inherited permission is available at the inheriting role's times.
/// Strong: it stays restricted to the times of the role it is assigned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InheritanceType {
    Weak,
    Strong,
}

impl fmt::Display for InheritanceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InheritanceType::Weak => write!(f, "wr"),
            InheritanceType::Strong => write!(f, "sr"),
        }
    }
}

impl FromStr for InheritanceType {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<InheritanceType, PolicyError> {
        match s {
            "wr" => Ok(InheritanceType::Weak),
            "sr" => Ok(InheritanceType::Strong),
            other => Err(PolicyError::Format(format!(
                "unknown inheritance type `{other}` (expected wr or sr)"
            ))),
        }
    }
}

/// A stored best-fit characterization of a role's membership: conjuncts of
/// `attribute in values`, with its mismatch against the assigned users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleFit {
    pub expr: BTreeMap<String, BTreeSet<u64>>,
    pub mismatch: u64,
}

/// Hierarchy edges point from junior to senior: a parent is junior to its
/// children, holds fewer permissions, and covers more users. Permissions
/// flow down parent links to children; users accumulate up from children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Role {
    pub asgnd_users: BTreeSet<UserId>,
    pub asgnd_perms: BTreeSet<PermId>,
    pub ta: Bpes,
    pub parents: BTreeSet<RoleId>,
    pub children: BTreeSet<RoleId>,
    pub fit: Option<RoleFit>,
}

impl Role {
    pub fn flat(users: BTreeSet<UserId>, perms: BTreeSet<PermId>, ta: Bpes) -> Role {
        Role {
            asgnd_users: users,
            asgnd_perms: perms,
            ta,
            parents: BTreeSet::new(),
            children: BTreeSet::new(),
            fit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrbacPolicy {
    pub it: InheritanceType,
    pub users: Interner,
    pub perms: Interner,
    pub roles: BTreeMap<RoleId, Role>,
}

impl TrbacPolicy {
    pub fn role(&self, r: RoleId) -> &Role {
        self.roles.get(&r).expect("role id not in policy")
    }

    pub fn role_ids(&self) -> Vec<RoleId> {
        self.roles.keys().copied().collect()
    }

    fn closure(&self, r: RoleId, up: bool) -> BTreeSet<RoleId> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([r]);
        while let Some(cur) = queue.pop_front() {
            let role = self.role(cur);
            let next = if up { &role.parents } else { &role.children };
            for &n in next {
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen.remove(&r);
        seen
    }

    /// Transitive parents, excluding `r` itself.
    pub fn ancestors(&self, r: RoleId) -> BTreeSet<RoleId> {
        self.closure(r, true)
    }

    /// Transitive children, excluding `r` itself.
    pub fn descendants(&self, r: RoleId) -> BTreeSet<RoleId> {
        self.closure(r, false)
    }

    pub fn is_descendant(&self, x: RoleId, of: RoleId) -> bool {
        self.descendants(of).contains(&x)
    }

    pub fn auth_users(&self, r: RoleId) -> BTreeSet<UserId> {
        let mut users = self.role(r).asgnd_users.clone();
        for d in self.descendants(r) {
            users.extend(self.role(d).asgnd_users.iter().copied());
        }
        users
    }

    /// Permissions available through `r`, with the availability each carries.
    pub fn auth_perms(&self, r: RoleId) -> Result<BTreeMap<PermId, Bpes>, PolicyError> {
        let role = self.role(r);
        let mut map: BTreeMap<PermId, Bpes> = BTreeMap::new();
        for &p in &role.asgnd_perms {
            map.insert(p, role.ta.clone());
        }
        match self.it {
            InheritanceType::Weak => {
                for a in self.ancestors(r) {
                    for &p in &self.role(a).asgnd_perms {
                        map.entry(p).or_insert_with(|| role.ta.clone());
                    }
                }
            }
            InheritanceType::Strong => {
                for a in self.ancestors(r) {
                    let anc = self.role(a);
                    for &p in &anc.asgnd_perms {
                        let merged = match map.remove(&p) {
                            None => anc.ta.clone(),
                            Some(cur) => cur.union_merge(&anc.ta)?,
                        };
                        map.insert(p, merged);
                    }
                }
            }
        }
        Ok(map)
    }

    /// The user-permission grants `r` contributes, keyed by pair.
    pub fn role_meaning(
        &self,
        r: RoleId,
    ) -> Result<BTreeMap<(UserId, PermId), Bpes>, PolicyError> {
        let users = self.auth_users(r);
        let perms = self.auth_perms(r)?;
        let mut map = BTreeMap::new();
        for &u in &users {
            for (&p, b) in &perms {
                map.insert((u, p), b.clone());
            }
        }
        Ok(map)
    }

    pub fn policy_meaning(&self) -> Result<BTreeMap<(UserId, PermId), Bpes>, PolicyError> {
        let mut meaning: BTreeMap<(UserId, PermId), Bpes> = BTreeMap::new();
        for &r in self.roles.keys() {
            for (key, b) in self.role_meaning(r)? {
                let merged = match meaning.remove(&key) {
                    None => b,
                    Some(cur) => cur.union_merge(&b)?,
                };
                meaning.insert(key, merged);
            }
        }
        Ok(meaning)
    }

    /// Number of assignment pairs whose required availability the policy does
    /// not fully grant. Over-grants are not counted here.
    pub fn uncovered_pairs(&self, tupa: &Tupa) -> Result<u64, PolicyError> {
        let meaning = self.policy_meaning()?;
        let mut uncovered = 0;
        for (key, need) in tupa.entries() {
            let ok = match meaning.get(key) {
                Some(have) => have.contains_sem(need)?,
                None => false,
            };
            if !ok {
                uncovered += 1;
            }
        }
        Ok(uncovered)
    }

    /// Differences between the policy's grants and the assignment, in both
    /// directions. Empty means the two are semantically identical.
    pub fn consistency_violations(&self, tupa: &Tupa) -> Result<Vec<String>, PolicyError> {
        let meaning = self.policy_meaning()?;
        let mut out = Vec::new();
        for (&(u, p), need) in tupa.entries() {
            let missing = match meaning.get(&(u, p)) {
                Some(have) => !have.contains_sem(need)?,
                None => true,
            };
            if missing {
                out.push(format!(
                    "missing grant: user {} perm {} requires {}",
                    self.users.name(u.0),
                    self.perms.name(p.0),
                    need
                ));
            }
        }
        for (&(u, p), have) in &meaning {
            let excess = match tupa.get(u, p) {
                Some(need) => !need.contains_sem(have)?,
                None => !have.is_empty_sem(),
            };
            if excess {
                out.push(format!(
                    "excess grant: user {} perm {} granted {}",
                    self.users.name(u.0),
                    self.perms.name(p.0),
                    have
                ));
            }
        }
        Ok(out)
    }

    /// Replaces the hierarchy with directly assigned users. Permission
    /// assignments and availabilities are kept as they are.
    pub fn flatten(&mut self) {
        let auth: BTreeMap<RoleId, BTreeSet<UserId>> = self
            .roles
            .keys()
            .map(|&r| (r, self.auth_users(r)))
            .collect();
        for (r, role) in self.roles.iter_mut() {
            role.asgnd_users = auth[r].clone();
            role.parents.clear();
            role.children.clear();
        }
    }

    /// Checks that every pair of roles whose authorized sets nest is related
    /// in the hierarchy, so no inheritance opportunity is left unused.
    pub fn full_inheritance_holds(&self) -> Result<bool, PolicyError> {
        let ids = self.role_ids();
        let mut perms = BTreeMap::new();
        let mut users = BTreeMap::new();
        for &r in &ids {
            let p: BTreeSet<PermId> = self.auth_perms(r)?.into_keys().collect();
            perms.insert(r, p);
            users.insert(r, self.auth_users(r));
        }
        for &a in &ids {
            for &b in &ids {
                if a == b {
                    continue;
                }
                let nested = perms[&a].is_subset(&perms[&b]) && users[&b].is_subset(&users[&a]);
                let temporal_ok = match self.it {
                    InheritanceType::Weak => true,
                    InheritanceType::Strong => {
                        self.role(b).ta.contains_sem(&self.role(a).ta)?
                    }
                };
                if nested && temporal_ok && !self.ancestors(b).contains(&a) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        for (&r, role) in &self.roles {
            for &u in &role.asgnd_users {
                if u.0 as usize >= self.users.len() {
                    return Err(PolicyError::Format(format!("role {r}: unknown user id {u}")));
                }
            }
            for &p in &role.asgnd_perms {
                if p.0 as usize >= self.perms.len() {
                    return Err(PolicyError::Format(format!("role {r}: unknown perm id {p}")));
                }
            }
            for &q in role.parents.iter().chain(role.children.iter()) {
                if !self.roles.contains_key(&q) {
                    return Err(PolicyError::Format(format!(
                        "role {r}: reference to missing role {q}"
                    )));
                }
            }
            for &q in &role.parents {
                if q == r || !self.roles[&q].children.contains(&r) {
                    return Err(PolicyError::Format(format!(
                        "role {r}: parent link to {q} is not mirrored"
                    )));
                }
            }
            for &q in &role.children {
                if q == r || !self.roles[&q].parents.contains(&r) {
                    return Err(PolicyError::Format(format!(
                        "role {r}: child link to {q} is not mirrored"
                    )));
                }
            }
        }
        // Kahn's algorithm over child edges; leftovers mean a cycle.
        let mut indegree: BTreeMap<RoleId, usize> = self
            .roles
            .iter()
            .map(|(&r, role)| (r, role.parents.len()))
            .collect();
        let mut queue: VecDeque<RoleId> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&r, _)| r)
            .collect();
        let mut visited = 0usize;
        while let Some(r) = queue.pop_front() {
            visited += 1;
            for &c in &self.roles[&r].children {
                let d = indegree.get_mut(&c).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push_back(c);
                }
            }
        }
        if visited != self.roles.len() {
            return Err(PolicyError::Format("hierarchy contains a cycle".into()));
        }
        Ok(())
    }
}

use std::collections::{BTreeMap, BTreeSet};

use crate::policy::{Interner, RoleFit, RoleId, TrbacPolicy, UserId};

use super::MetricsError;

/// Conjunction of per-attribute membership tests. Attributes absent from the
/// map are unconstrained; present conjunct sets must be non-empty.
pub type AttrExpr = BTreeMap<String, BTreeSet<u64>>;

/// Candidate-product ceiling below which best-fit search is exhaustive.
pub const EXACT_FIT_BUDGET: u64 = 10_000;

/// Attribute values for every user, one natural number per attribute.
/// Attributes are kept in sorted name order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeData {
    attrs: Vec<String>,
    values: Vec<Vec<u64>>,
}

impl AttributeData {
    pub fn from_rows(attrs: Vec<String>, rows: Vec<Vec<u64>>) -> Result<AttributeData, MetricsError> {
        let mut order: Vec<usize> = (0..attrs.len()).collect();
        order.sort_by(|&a, &b| attrs[a].cmp(&attrs[b]));
        let sorted: Vec<String> = order.iter().map(|&i| attrs[i].clone()).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(MetricsError::BadAttributeData(
                "duplicate attribute name".into(),
            ));
        }
        let mut values = Vec::with_capacity(rows.len());
        for row in &rows {
            if row.len() != attrs.len() {
                return Err(MetricsError::BadAttributeData(format!(
                    "row with {} values, expected {}",
                    row.len(),
                    attrs.len()
                )));
            }
            values.push(order.iter().map(|&i| row[i]).collect());
        }
        Ok(AttributeData {
            attrs: sorted,
            values,
        })
    }

    /// Header `user,attr1,...`; one row per declared user, in any order.
    pub fn from_csv(text: &str, users: &Interner) -> Result<AttributeData, MetricsError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| MetricsError::BadAttributeData(e.to_string()))?
            .clone();
        let mut cols = header.iter();
        if cols.next() != Some("user") {
            return Err(MetricsError::BadAttributeData(
                "first column must be `user`".into(),
            ));
        }
        let attrs: Vec<String> = cols.map(str::to_string).collect();
        let mut by_user: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
        for record in reader.records() {
            let record = record.map_err(|e| MetricsError::BadAttributeData(e.to_string()))?;
            let mut fields = record.iter();
            let name = fields.next().unwrap_or_default();
            let uid = users
                .id(name)
                .ok_or_else(|| MetricsError::BadAttributeData(format!("unknown user `{name}`")))?;
            let row = fields
                .map(|v| {
                    v.trim().parse::<u64>().map_err(|_| {
                        MetricsError::BadAttributeData(format!("bad value `{v}` for `{name}`"))
                    })
                })
                .collect::<Result<Vec<u64>, _>>()?;
            if row.len() != attrs.len() {
                return Err(MetricsError::BadAttributeData(format!(
                    "user `{name}`: {} values, expected {}",
                    row.len(),
                    attrs.len()
                )));
            }
            if by_user.insert(uid, row).is_some() {
                return Err(MetricsError::BadAttributeData(format!(
                    "duplicate row for user `{name}`"
                )));
            }
        }
        if by_user.len() != users.len() {
            return Err(MetricsError::BadAttributeData(format!(
                "{} of {} users have attribute rows",
                by_user.len(),
                users.len()
            )));
        }
        let rows = by_user.into_values().collect();
        AttributeData::from_rows(attrs, rows)
    }

    pub fn to_csv(&self, users: &Interner) -> String {
        let mut out = String::from("user");
        for a in &self.attrs {
            out.push(',');
            out.push_str(a);
        }
        out.push('\n');
        for (i, row) in self.values.iter().enumerate() {
            out.push_str(users.name(i as u32));
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn attrs(&self) -> &[String] {
        &self.attrs
    }

    pub fn n_users(&self) -> usize {
        self.values.len()
    }

    fn attr_index(&self, name: &str) -> Result<usize, MetricsError> {
        self.attrs
            .binary_search_by(|a| a.as_str().cmp(name))
            .map_err(|_| MetricsError::UnknownAttribute(name.to_string()))
    }

    pub fn value(&self, u: UserId, attr: &str) -> Result<u64, MetricsError> {
        let idx = self.attr_index(attr)?;
        self.values
            .get(u.0 as usize)
            .map(|row| row[idx])
            .ok_or_else(|| MetricsError::BadAttributeData(format!("no row for user id {u}")))
    }

    pub fn satisfies(&self, u: UserId, expr: &AttrExpr) -> Result<bool, MetricsError> {
        for (attr, set) in expr {
            if !set.contains(&self.value(u, attr)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn satisfying_users(&self, expr: &AttrExpr) -> Result<BTreeSet<UserId>, MetricsError> {
        let mut out = BTreeSet::new();
        for u in 0..self.values.len() {
            if self.satisfies(UserId(u as u32), expr)? {
                out.insert(UserId(u as u32));
            }
        }
        Ok(out)
    }

    /// Size of the symmetric difference between the users satisfying the
    /// expression and the given set.
    pub fn mismatch(&self, expr: &AttrExpr, users: &BTreeSet<UserId>) -> Result<u64, MetricsError> {
        let sat = self.satisfying_users(expr)?;
        Ok(sat.symmetric_difference(users).count() as u64)
    }

    /// An expression minimizing mismatch against `users`, with that mismatch.
    /// Per attribute, candidate conjuncts are the non-empty subsets of the
    /// values held by members, plus unconstrained. The search is exhaustive
    /// while the candidate product stays within the budget; beyond it, a
    /// greedy pass restricts one attribute at a time until no restriction
    /// helps. Either way the result is never worse than constraining every
    /// attribute to its full member value set.
    pub fn best_fit(&self, users: &BTreeSet<UserId>) -> Result<(AttrExpr, u64), MetricsError> {
        let n = self.values.len();
        if users.is_empty() {
            // Over all expressions the minimum is an unsatisfiable conjunct,
            // available whenever there is an attribute to constrain.
            if let Some(first) = self.attrs.first() {
                let unused = 1 + self
                    .values
                    .iter()
                    .map(|row| row[0])
                    .max()
                    .unwrap_or_default();
                let expr = AttrExpr::from([(first.clone(), BTreeSet::from([unused]))]);
                return Ok((expr, 0));
            }
            return Ok((AttrExpr::new(), n as u64));
        }
        let member_vals: Vec<Vec<u64>> = (0..self.attrs.len())
            .map(|a| {
                let mut vals: Vec<u64> = users.iter().map(|u| self.values[u.0 as usize][a]).collect();
                vals.sort_unstable();
                vals.dedup();
                vals
            })
            .collect();
        let mut product: u64 = 1;
        for vals in &member_vals {
            if vals.len() >= 14 {
                product = EXACT_FIT_BUDGET + 1;
                break;
            }
            product = product.saturating_mul(1 << vals.len());
            if product > EXACT_FIT_BUDGET {
                break;
            }
        }
        let mut best = if product <= EXACT_FIT_BUDGET {
            self.exact_fit(users, &member_vals)?
        } else {
            self.greedy_fit(users, &member_vals)?
        };
        let full: AttrExpr = self
            .attrs
            .iter()
            .zip(&member_vals)
            .map(|(a, vals)| (a.clone(), vals.iter().copied().collect()))
            .collect();
        let full_mis = self.mismatch(&full, users)?;
        if full_mis < best.1 {
            best = (full, full_mis);
        }
        Ok(best)
    }

    fn exact_fit(
        &self,
        users: &BTreeSet<UserId>,
        member_vals: &[Vec<u64>],
    ) -> Result<(AttrExpr, u64), MetricsError> {
        // Candidates per attribute: unconstrained first, then subsets ordered
        // by size and value list. The first minimum encountered wins.
        let per_attr: Vec<Vec<Option<Vec<u64>>>> = member_vals
            .iter()
            .map(|vals| {
                let mut subs: Vec<Vec<u64>> = (1u32..1 << vals.len())
                    .map(|bits| {
                        (0..vals.len())
                            .filter(|i| bits >> i & 1 == 1)
                            .map(|i| vals[i])
                            .collect()
                    })
                    .collect();
                subs.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
                std::iter::once(None).chain(subs.into_iter().map(Some)).collect()
            })
            .collect();
        let mut pick = vec![0usize; per_attr.len()];
        let mut best: Option<(AttrExpr, u64)> = None;
        loop {
            let expr: AttrExpr = pick
                .iter()
                .enumerate()
                .filter_map(|(a, &c)| {
                    per_attr[a][c]
                        .as_ref()
                        .map(|vals| (self.attrs[a].clone(), vals.iter().copied().collect()))
                })
                .collect();
            let mis = self.mismatch(&expr, users)?;
            if best.as_ref().is_none_or(|(_, b)| mis < *b) {
                best = Some((expr, mis));
            }
            // Odometer with the last attribute fastest.
            let mut i = per_attr.len();
            loop {
                if i == 0 {
                    return Ok(best.unwrap());
                }
                i -= 1;
                pick[i] += 1;
                if pick[i] < per_attr[i].len() {
                    break;
                }
                pick[i] = 0;
            }
        }
    }

    fn greedy_fit(
        &self,
        users: &BTreeSet<UserId>,
        member_vals: &[Vec<u64>],
    ) -> Result<(AttrExpr, u64), MetricsError> {
        let mut expr = AttrExpr::new();
        let mut current = self.mismatch(&expr, users)?;
        loop {
            let mut best_step: Option<(usize, u64)> = None;
            for (a, vals) in member_vals.iter().enumerate() {
                if expr.contains_key(&self.attrs[a]) {
                    continue;
                }
                let mut trial = expr.clone();
                trial.insert(self.attrs[a].clone(), vals.iter().copied().collect());
                let mis = self.mismatch(&trial, users)?;
                if mis < current && best_step.as_ref().is_none_or(|&(_, b)| mis < b) {
                    best_step = Some((a, mis));
                }
            }
            match best_step {
                Some((a, mis)) => {
                    expr.insert(self.attrs[a].clone(), member_vals[a].iter().copied().collect());
                    current = mis;
                }
                None => return Ok((expr, current)),
            }
        }
    }
}

/// Sum over roles of the best-fit mismatch for the directly assigned users.
pub fn interpretability(policy: &TrbacPolicy, data: &AttributeData) -> Result<u64, MetricsError> {
    let mut total = 0;
    for role in policy.roles.values() {
        total += data.best_fit(&role.asgnd_users)?.1;
    }
    Ok(total)
}

/// Computes and stores a best-fit expression on every role.
pub fn annotate_fits(policy: &mut TrbacPolicy, data: &AttributeData) -> Result<(), MetricsError> {
    let ids = policy.role_ids();
    for r in ids {
        let users = policy.roles[&r].asgnd_users.clone();
        let (expr, mismatch) = data.best_fit(&users)?;
        policy.roles.get_mut(&r).unwrap().fit = Some(RoleFit { expr, mismatch });
    }
    Ok(())
}

/// Roles whose stored best-fit expression the new user satisfies, ordered by
/// stored mismatch then role id.
pub fn suggest_roles(
    policy: &TrbacPolicy,
    data: &AttributeData,
    new_user: &BTreeMap<String, u64>,
) -> Result<Vec<(RoleId, u64)>, MetricsError> {
    for attr in new_user.keys() {
        data.attr_index(attr)?;
    }
    if policy.roles.values().all(|r| r.fit.is_none()) {
        return Err(MetricsError::BadAttributeData(
            "policy carries no stored best-fit expressions".into(),
        ));
    }
    let mut hits = Vec::new();
    for (&r, role) in &policy.roles {
        let Some(fit) = &role.fit else { continue };
        let mut ok = true;
        for (attr, set) in &fit.expr {
            let v = new_user
                .get(attr)
                .ok_or_else(|| MetricsError::UnknownAttribute(attr.clone()))?;
            if !set.contains(v) {
                ok = false;
                break;
            }
        }
        if ok {
            hits.push((r, fit.mismatch));
        }
    }
    hits.sort_by_key(|&(r, m)| (m, r));
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> (AttributeData, Interner) {
        // Unsorted header exercises the column permutation.
        let users = Interner::from_names(["ann", "bob", "cyd", "dee", "eli"]);
        let csv = "\
user,level,dept
ann,2,1
bob,3,1
cyd,2,2
dee,1,1
eli,2,1
";
        (AttributeData::from_csv(csv, &users).unwrap(), users)
    }

    fn uset(ids: &[u32]) -> BTreeSet<UserId> {
        ids.iter().copied().map(UserId).collect()
    }

    #[test]
    fn csv_sorts_attributes_and_requires_all_users() {
        let (d, users) = data();
        assert_eq!(d.attrs(), ["dept", "level"]);
        assert_eq!(d.value(UserId(0), "dept").unwrap(), 1);
        assert_eq!(d.value(UserId(0), "level").unwrap(), 2);
        let short = "user,level,dept\nann,2,1\n";
        assert!(AttributeData::from_csv(short, &users).is_err());
        let back = AttributeData::from_csv(&d.to_csv(&users), &users).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn mismatch_is_symmetric_difference() {
        let (d, _) = data();
        // dept=1 and level in {2,3}: ann, bob, eli.
        let expr = AttrExpr::from([
            ("dept".into(), BTreeSet::from([1])),
            ("level".into(), BTreeSet::from([2, 3])),
        ]);
        assert_eq!(d.satisfying_users(&expr).unwrap(), uset(&[0, 1, 4]));
        assert_eq!(d.mismatch(&expr, &uset(&[0, 1, 4])).unwrap(), 0);
        assert_eq!(d.mismatch(&expr, &uset(&[0, 3])).unwrap(), 3);
        assert!(d.mismatch(&AttrExpr::from([("age".into(), BTreeSet::from([1]))]), &uset(&[]))
            .is_err());
    }

    #[test]
    fn best_fit_finds_exact_characterizations() {
        let (d, _) = data();
        // bob alone holds level 3.
        let (expr, mis) = d.best_fit(&uset(&[1])).unwrap();
        assert_eq!(mis, 0);
        assert_eq!(expr, AttrExpr::from([("level".into(), BTreeSet::from([3]))]));
        // The whole user set needs no constraints.
        let (expr, mis) = d.best_fit(&uset(&[0, 1, 2, 3, 4])).unwrap();
        assert_eq!(mis, 0);
        assert!(expr.is_empty());
        // No expression separates ann from eli (identical rows).
        let (_, mis) = d.best_fit(&uset(&[0])).unwrap();
        assert_eq!(mis, 1);
    }

    #[test]
    fn best_fit_matches_exhaustive_oracle() {
        let (d, _) = data();
        for target in 0u32..1 << 5 {
            let users: BTreeSet<UserId> = (0..5)
                .filter(|i| target >> i & 1 == 1)
                .map(UserId)
                .collect();
            if users.is_empty() {
                continue;
            }
            let (_, mis) = d.best_fit(&users).unwrap();
            // Oracle: all conjunct products over full per-attribute value sets.
            let dept_sets: Vec<Option<Vec<u64>>> = subsets(&[1, 2]);
            let level_sets: Vec<Option<Vec<u64>>> = subsets(&[1, 2, 3]);
            let mut oracle = u64::MAX;
            for ds in &dept_sets {
                for ls in &level_sets {
                    let mut expr = AttrExpr::new();
                    if let Some(v) = ds {
                        expr.insert("dept".into(), v.iter().copied().collect());
                    }
                    if let Some(v) = ls {
                        expr.insert("level".into(), v.iter().copied().collect());
                    }
                    oracle = oracle.min(d.mismatch(&expr, &users).unwrap());
                }
            }
            assert_eq!(mis, oracle, "user set {users:?}");
        }
    }

    fn subsets(vals: &[u64]) -> Vec<Option<Vec<u64>>> {
        let mut out = vec![None];
        for bits in 1u32..1 << vals.len() {
            out.push(Some(
                (0..vals.len())
                    .filter(|i| bits >> i & 1 == 1)
                    .map(|i| vals[i])
                    .collect(),
            ));
        }
        out
    }

    #[test]
    fn empty_member_set_fits_unsatisfiable_conjunct() {
        let (d, _) = data();
        let (expr, mis) = d.best_fit(&uset(&[])).unwrap();
        assert_eq!(mis, 0);
        assert!(d.satisfying_users(&expr).unwrap().is_empty());
    }

    #[test]
    fn oversized_instances_use_greedy_and_stay_bounded() {
        // 14 distinct member values push the candidate product past the
        // budget on a single attribute.
        let users = Interner::from_names((0..20).map(|i| format!("u{i:02}")));
        let attrs = vec!["grp".to_string(), "site".to_string()];
        let rows: Vec<Vec<u64>> = (0..20).map(|i| vec![i % 16, i % 2]).collect();
        let d = AttributeData::from_rows(attrs, rows).unwrap();
        let members: BTreeSet<UserId> = (0..14).map(UserId).collect();
        let (expr, mis) = d.best_fit(&members).unwrap();
        let full = AttrExpr::from([
            ("grp".into(), (0..14).map(|i| i % 16).collect()),
            ("site".into(), BTreeSet::from([0, 1])),
        ]);
        assert!(mis <= d.mismatch(&full, &members).unwrap());
        assert_eq!(d.mismatch(&expr, &members).unwrap(), mis);
    }

    #[test]
    fn suggestions_sort_by_stored_mismatch() {
        let (d, users) = data();
        let perms = Interner::from_names(["p"]);
        let ta = crate::temporal::parse_bpes("[*,*][9,17]").unwrap();
        let mut roles = std::collections::BTreeMap::new();
        for (i, (vals, am)) in [(vec![1, 2], 0u64), (vec![1], 2), (vec![1, 2, 3], 1)]
            .into_iter()
            .enumerate()
        {
            let mut role = crate::policy::Role::flat(BTreeSet::new(), BTreeSet::new(), ta.clone());
            role.fit = Some(RoleFit {
                expr: AttrExpr::from([("level".into(), vals.into_iter().collect())]),
                mismatch: am,
            });
            roles.insert(RoleId(i as u32), role);
        }
        let pol = TrbacPolicy {
            it: crate::policy::InheritanceType::Weak,
            users,
            perms,
            roles,
        };
        let got = suggest_roles(&pol, &d, &BTreeMap::from([("level".into(), 2)])).unwrap();
        assert_eq!(got, vec![(RoleId(0), 0), (RoleId(2), 1)]);
        let got = suggest_roles(&pol, &d, &BTreeMap::from([("level".into(), 9)])).unwrap();
        assert!(got.is_empty());
        assert!(suggest_roles(&pol, &d, &BTreeMap::from([("age".into(), 2)])).is_err());
    }
}

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};

use crate::policy::{PermId, Role, TrbacPolicy, Tupa, UserId};
use crate::temporal::Bpes;

use super::attrs::{interpretability, AttributeData};
use super::MetricsError;

pub fn rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Accepts integers, decimals, and `num/den` fractions, all exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, MetricsError> {
    let t = s.trim();
    let err = || MetricsError::BadNumber(format!("cannot parse `{s}` as a rational"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if (!int_part.is_empty() && !digits(int_part)) || (!frac_part.is_empty() && !digits(frac_part))
    {
        return Err(err());
    }
    let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
    let whole: BigInt = if int_part.is_empty() {
        BigInt::zero()
    } else {
        int_part.parse().map_err(|_| err())?
    };
    let frac: BigInt = if frac_part.is_empty() {
        BigInt::zero()
    } else {
        frac_part.parse().map_err(|_| err())?
    };
    let num = whole * &scale + frac;
    Ok(BigRational::new(if neg { -num } else { num }, scale))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Weights for the five structural components: roles, user assignment,
/// permission assignment, hierarchy edges, temporal assignment size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WscWeights(pub [BigRational; 5]);

impl WscWeights {
    pub fn new(w: [BigRational; 5]) -> Result<WscWeights, MetricsError> {
        if w.iter().any(|x| x.is_negative()) {
            return Err(MetricsError::BadWeights("weights must be non-negative".into()));
        }
        if w.iter().all(|x| x.is_zero()) {
            return Err(MetricsError::BadWeights(
                "at least one weight must be positive".into(),
            ));
        }
        Ok(WscWeights(w))
    }

    pub fn ones() -> WscWeights {
        WscWeights([rat(1), rat(1), rat(1), rat(1), rat(1)])
    }
}

/// Weighted structural complexity of a policy.
pub fn wsc(policy: &TrbacPolicy, weights: &WscWeights) -> BigRational {
    let mut counts = [0u64; 5];
    counts[0] = policy.roles.len() as u64;
    for role in policy.roles.values() {
        counts[1] += role.asgnd_users.len() as u64;
        counts[2] += role.asgnd_perms.len() as u64;
        counts[3] += role.parents.len() as u64;
        counts[4] += role.ta.wsc_size();
    }
    weights
        .0
        .iter()
        .zip(counts)
        .map(|(w, c)| w * rat(c))
        .sum()
}

/// Cumulative overhead of temporal roles and permissions: a weighted count of
/// temporal assignments (one per BPE) and direct permission assignments.
pub fn co_trap(policy: &TrbacPolicy, w_ta: &BigRational, w_pa: &BigRational) -> BigRational {
    let mut ta = 0u64;
    let mut pa = 0u64;
    for role in policy.roles.values() {
        ta += role.ta.members().len() as u64;
        pa += role.asgnd_perms.len() as u64;
    }
    w_ta * rat(ta) + w_pa * rat(pa)
}

/// Sum over assigned pairs of the fraction of each entitlement's time the
/// role's availability covers.
pub fn cov_entit(
    ta: &Bpes,
    users: &BTreeSet<UserId>,
    perms: &BTreeSet<PermId>,
    t: &Tupa,
) -> BigRational {
    let dur_ta = ta.duration_fraction();
    let mut sum = BigRational::zero();
    for &u in users {
        for &p in perms {
            if let Some(need) = t.get(u, p) {
                sum += &dur_ta / need.duration_fraction();
            }
        }
    }
    sum
}

/// Coverage per entitlement held by the role's members; 0 when they hold none.
pub fn cls_sz(role: &Role, t: &Tupa) -> BigRational {
    let denom = t.entitlements_of(&role.asgnd_users) as u64;
    if denom == 0 {
        return BigRational::zero();
    }
    cov_entit(&role.ta, &role.asgnd_users, &role.asgnd_perms, t) / rat(denom)
}

/// Usefulness-for-intersection score from its four features. The constants
/// were fit offline and are used as given.
pub fn ui_score(
    size: u64,
    cov_entit: &BigRational,
    perm_pop: &BigRational,
    pe_pop: &BigRational,
) -> BigRational {
    let w = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(10_000));
    w(-27_357) * rat(size) + w(-16_484) * cov_entit + w(23_417) * perm_pop + w(-6_017) * pe_pop
}

/// Tuple of rationals compared lexicographically. Smaller is better when
/// scoring policies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct QualityValue(pub Vec<BigRational>);

impl fmt::Display for QualityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Roles,
    Wsc,
    Int,
    WscInt,
    CoTrap,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MetricKind::Roles => "roles",
            MetricKind::Wsc => "wsc",
            MetricKind::Int => "int",
            MetricKind::WscInt => "wsc-int",
            MetricKind::CoTrap => "co-trap",
        };
        write!(f, "{name}")
    }
}

impl FromStr for MetricKind {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<MetricKind, MetricsError> {
        match s {
            "roles" => Ok(MetricKind::Roles),
            "wsc" => Ok(MetricKind::Wsc),
            "int" => Ok(MetricKind::Int),
            "wsc-int" => Ok(MetricKind::WscInt),
            "co-trap" => Ok(MetricKind::CoTrap),
            other => Err(MetricsError::BadWeights(format!(
                "unknown metric `{other}`"
            ))),
        }
    }
}

/// A policy quality metric ready to evaluate: the kind plus whatever weights
/// and attribute data it needs.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub weights: WscWeights,
    pub w_ta: BigRational,
    pub w_pa: BigRational,
    pub attrs: Option<AttributeData>,
}

impl MetricSpec {
    pub fn new(
        kind: MetricKind,
        weights: WscWeights,
        w_ta: BigRational,
        w_pa: BigRational,
        attrs: Option<AttributeData>,
    ) -> Result<MetricSpec, MetricsError> {
        if matches!(kind, MetricKind::Int | MetricKind::WscInt) && attrs.is_none() {
            return Err(MetricsError::MissingAttributeData);
        }
        Ok(MetricSpec {
            kind,
            weights,
            w_ta,
            w_pa,
            attrs,
        })
    }

    fn attrs(&self) -> Result<&AttributeData, MetricsError> {
        self.attrs.as_ref().ok_or(MetricsError::MissingAttributeData)
    }

    pub fn evaluate(&self, policy: &TrbacPolicy) -> Result<QualityValue, MetricsError> {
        let v = match self.kind {
            MetricKind::Roles => vec![rat(policy.roles.len() as u64)],
            MetricKind::Wsc => vec![wsc(policy, &self.weights)],
            MetricKind::Int => vec![rat(interpretability(policy, self.attrs()?)?)],
            MetricKind::WscInt => vec![
                wsc(policy, &self.weights),
                rat(interpretability(policy, self.attrs()?)?),
            ],
            MetricKind::CoTrap => vec![co_trap(policy, &self.w_ta, &self.w_pa)],
        };
        Ok(QualityValue(v))
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use crate::temporal::Bpes;

use super::ids::{Interner, PermId, UserId};
use super::PolicyError;

/// Timed user-permission assignment: for each (user, permission) pair, the
/// BPES of instants at which the permission is granted. BPESs are stored in
/// canonical form, so structural equality is semantic equality here.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tupa {
    pub users: Interner,
    pub perms: Interner,
    entries: BTreeMap<(UserId, PermId), Bpes>,
}

impl Tupa {
    pub fn new(
        users: Interner,
        perms: Interner,
        entries: BTreeMap<(UserId, PermId), Bpes>,
    ) -> Tupa {
        let entries = entries
            .into_iter()
            .filter(|(_, b)| !b.is_empty_sem())
            .map(|(k, b)| (k, b.canonicalize()))
            .collect();
        Tupa {
            users,
            perms,
            entries,
        }
    }

    /// Tab-separated rows `user perm bpes`; blank lines and `#` comments are
    /// skipped. Rows repeating a pair union their BPESs.
    pub fn load_tsv<R: BufRead>(reader: R) -> Result<Tupa, PolicyError> {
        let mut raw: Vec<(String, String, Bpes)> = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let mut fields = text.split('\t');
            let (user, perm, bpes) = match (fields.next(), fields.next(), fields.next()) {
                (Some(u), Some(p), Some(b)) if fields.next().is_none() => (u, p, b),
                _ => {
                    return Err(PolicyError::Format(format!(
                        "line {}: expected `user<TAB>perm<TAB>bpes`",
                        lineno + 1
                    )))
                }
            };
            let bpes = crate::temporal::parse_bpes(bpes).map_err(|e| {
                PolicyError::Format(format!("line {}: {e}", lineno + 1))
            })?;
            raw.push((user.to_string(), perm.to_string(), bpes));
        }
        let users = Interner::from_names(raw.iter().map(|(u, _, _)| u.clone()));
        let perms = Interner::from_names(raw.iter().map(|(_, p, _)| p.clone()));
        let mut entries: BTreeMap<(UserId, PermId), Bpes> = BTreeMap::new();
        for (u, p, b) in raw {
            let key = (UserId(users.id(&u).unwrap()), PermId(perms.id(&p).unwrap()));
            let merged = match entries.remove(&key) {
                None => b,
                Some(prev) => prev.union_merge(&b)?,
            };
            entries.insert(key, merged);
        }
        Ok(Tupa::new(users, perms, entries))
    }

    pub fn save_tsv<W: Write>(&self, mut writer: W) -> Result<(), PolicyError> {
        for ((u, p), b) in &self.entries {
            writeln!(
                writer,
                "{}\t{}\t{}",
                self.users.name(u.0),
                self.perms.name(p.0),
                b
            )?;
        }
        Ok(())
    }

    pub fn get(&self, u: UserId, p: PermId) -> Option<&Bpes> {
        self.entries.get(&(u, p))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(UserId, PermId), &Bpes)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn user_ids(&self) -> impl Iterator<Item = UserId> + '_ {
        (0..self.users.len() as u32).map(UserId)
    }

    /// Pairs of one user, in key order.
    pub fn entries_of(&self, u: UserId) -> impl Iterator<Item = (PermId, &Bpes)> {
        self.entries
            .range((u, PermId(0))..=(u, PermId(u32::MAX)))
            .map(|((_, p), b)| (*p, b))
    }

    /// Number of entitlement pairs held by any user in the set.
    pub fn entitlements_of(&self, users: &BTreeSet<UserId>) -> usize {
        users.iter().map(|u| self.entries_of(*u).count()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Tupa {
        let text = "\
# comment
alice\topen\t[*,*][9,17]
bob\topen\t[*,*][9,12]
alice\taudit\t[*,*][9,12];[*,*][14,15]
";
        Tupa::load_tsv(text.as_bytes()).unwrap()
    }

    #[test]
    fn loads_and_interns_sorted() {
        let t = sample();
        assert_eq!(t.users.names(), ["alice", "bob"]);
        assert_eq!(t.perms.names(), ["audit", "open"]);
        assert_eq!(t.len(), 3);
        let alice = UserId(t.users.id("alice").unwrap());
        let open = PermId(t.perms.id("open").unwrap());
        assert_eq!(t.get(alice, open).unwrap().to_string(), "[*,*][9,17]");
    }

    #[test]
    fn duplicate_rows_union() {
        let text = "u\tp\t[*,*][9,12]\nu\tp\t[*,*][12,17]\n";
        let t = Tupa::load_tsv(text.as_bytes()).unwrap();
        let (_, b) = t.entries().next().unwrap();
        assert_eq!(b.to_string(), "[*,*][9,17]");
    }

    #[test]
    fn round_trips_tsv() {
        let t = sample();
        let mut out = Vec::new();
        t.save_tsv(&mut out).unwrap();
        let back = Tupa::load_tsv(out.as_slice()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(Tupa::load_tsv("only two\tfields\n".as_bytes()).is_err());
        assert!(Tupa::load_tsv("u\tp\tnot-a-bpes\n".as_bytes()).is_err());
    }
}

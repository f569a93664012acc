//! Named reference systems with golden rank values.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{LocalRule, SlidingBlockFactor};
use crate::substitution::Substitution;
use crate::system::System;
use crate::toeplitz::ToeplitzSkeleton;
use crate::words::{Symbol, Word};

const BUILTIN: &str = include_str!("catalog.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    Paper,
    Derived,
    Trivial,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Paper => "PAPER",
            Provenance::Derived => "DERIVED",
            Provenance::Trivial => "TRIVIAL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Golden {
    /// `r_c`, `r_m` or `r_M`.
    pub rank: String,
    pub value: u64,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemSpec {
    /// Selector including parameters, e.g. `toeplitz-rank:r=3`.
    pub name: String,
    pub system: System,
    pub goldens: Vec<Golden>,
    pub exact: bool,
    pub note: Option<String>,
}

impl SystemSpec {
    pub fn golden(&self, rank: &str) -> Option<&Golden> {
        self.goldens.iter().find(|g| g.rank == rank)
    }
}

#[derive(Clone, Debug, Default)]
struct Entry {
    name: String,
    fields: Vec<(String, String)>,
}

impl Entry {
    fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.fields.iter().filter(move |(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct Catalog {
    entries: Vec<Entry>,
}

impl Catalog {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("built-in catalog parses")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<Entry> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                entries.push(Entry {
                    name: name.trim().to_string(),
                    fields: Vec::new(),
                });
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("catalog line {}: expected key = value", n + 1)))?;
            entries
                .last_mut()
                .ok_or_else(|| Error::Parse(format!("catalog line {}: field outside a section", n + 1)))?
                .fields
                .push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Catalog { entries })
    }

    pub fn list(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    /// Selectors for every constructible entry, with default parameters
    /// spelled out for families.
    pub fn selectors(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.get("nonconstructive").is_none())
            .map(|e| match e.get("params") {
                Some(p) => format!("{}:{p}", e.name),
                None => e.name.clone(),
            })
            .collect()
    }

    /// `name` or `name:key=value,..`.
    pub fn get_selector(&self, selector: &str) -> Result<SystemSpec> {
        match selector.split_once(':') {
            Some((name, params)) => self.get(name, Some(params)),
            None => self.get(selector, None),
        }
    }

    pub fn get(&self, name: &str, params: Option<&str>) -> Result<SystemSpec> {
        let e = self
            .entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::UnknownSystem(name.to_string()))?;
        if let Some(why) = e.get("nonconstructive") {
            return Err(Error::Nonconstructive(format!("{name}: {why}")));
        }
        let mut p = parse_params(e.get("params").unwrap_or(""))?;
        if let Some(given) = params {
            if e.get("family").is_none() {
                return Err(Error::UnknownSystem(format!("{name} takes no parameters")));
            }
            for (k, v) in parse_params(given)? {
                if !p.contains_key(&k) {
                    return Err(Error::UnknownSystem(format!("{name} has no parameter {k:?}")));
                }
                p.insert(k, v);
            }
        }
        let system = if let Some(rules) = e.get("rules") {
            System::Substitution(rules.parse::<Substitution>()?)
        } else if let Some(pats) = e.get("patterns") {
            let pats: Vec<&str> = pats.split_whitespace().collect();
            System::Toeplitz(ToeplitzSkeleton::from_patterns(&pats)?)
        } else if let Some(f) = e.get("factor") {
            self.factor(f)?
        } else if let Some(fam) = e.get("family") {
            family(fam, &p)?
        } else {
            return Err(Error::Parse(format!("catalog entry {name} has no construction")));
        };
        let goldens = e
            .all("golden")
            .map(|g| parse_golden(g, &p))
            .collect::<Result<Vec<_>>>()?;
        let full = if p.is_empty() {
            name.to_string()
        } else {
            let ps: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{name}:{}", ps.join(","))
        };
        Ok(SystemSpec {
            name: full,
            system,
            goldens,
            exact: e.get("exact") == Some("true"),
            note: e.get("note").map(str::to_string),
        })
    }

    fn factor(&self, spec: &str) -> Result<System> {
        let parts: Vec<&str> = spec.split_whitespace().collect();
        let [source, span, rule] = parts[..] else {
            return Err(Error::Parse(format!("factor spec {spec:?}")));
        };
        let span: usize = span
            .strip_prefix("span=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("factor span in {spec:?}")))?;
        let modulus: u8 = rule
            .strip_prefix("sum-mod-")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("factor rule in {spec:?}")))?;
        let src = self.get_selector(source)?.system;
        Ok(System::Factor(SlidingBlockFactor::new(src, span, LocalRule::SumMod(modulus))?))
    }
}

fn parse_params(s: &str) -> Result<BTreeMap<String, String>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::UnknownSystem(format!("bad parameter {p:?}")))
        })
        .collect()
}

fn parse_golden(g: &str, params: &BTreeMap<String, String>) -> Result<Golden> {
    let bad = || Error::Parse(format!("golden {g:?}"));
    let (rank, rest) = g.split_once('=').ok_or_else(bad)?;
    let (value, tag) = rest.trim().split_once('[').ok_or_else(bad)?;
    let mut value = value.trim().to_string();
    for (k, v) in params {
        value = value.replace(&format!("{{{k}}}"), v);
    }
    let provenance = match tag.trim_end_matches(']').trim() {
        "PAPER" => Provenance::Paper,
        "DERIVED" => Provenance::Derived,
        "TRIVIAL" => Provenance::Trivial,
        _ => return Err(bad()),
    };
    Ok(Golden {
        rank: rank.trim().to_string(),
        value: value.parse().map_err(|_| bad())?,
        provenance,
    })
}

fn family(name: &str, p: &BTreeMap<String, String>) -> Result<System> {
    match name {
        // 0 -> w, 1 -> complement of w
        "gen-morse" => {
            let w: Word = p["block"].parse()?;
            if w.is_empty() || w.0[0] != Symbol(0) || w.0.iter().any(|s| s.0 > 1) {
                return Err(Error::UnknownSystem(format!("block {w} must be binary and start with 0")));
            }
            let bar = Word(w.0.iter().map(|s| Symbol(1 - s.0)).collect());
            Ok(System::Substitution(Substitution::new(vec![w, bar])?))
        }
        "toeplitz-rank" => {
            let r: usize = p["r"]
                .parse()
                .map_err(|_| Error::UnknownSystem(format!("bad r {:?}", p["r"])))?;
            if !(2..=36).contains(&r) {
                return Err(Error::UnknownSystem(format!("r = {r} outside 2..=36")));
            }
            let pats: Vec<String> = (0..r).map(|i| format!("{}?", Symbol(i as u8))).collect();
            let pats: Vec<&str> = pats.iter().map(String::as_str).collect();
            Ok(System::Toeplitz(ToeplitzSkeleton::from_patterns(&pats)?))
        }
        other => Err(Error::UnknownSystem(format!("family {other}"))),
    }
}

/// [`Catalog::builtin`] lookup by selector.
pub fn get(selector: &str) -> Result<SystemSpec> {
    Catalog::builtin().get_selector(selector)
}

pub fn list() -> Vec<String> {
    Catalog::builtin().list()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::Subshift;

    #[test]
    fn every_constructible_entry_builds() {
        let c = Catalog::builtin();
        for s in c.selectors() {
            let spec = c.get_selector(&s).unwrap();
            assert!(spec.system.alphabet().size() >= 1, "{s}");
        }
        assert!(matches!(c.get("glasner-weiss", None), Err(Error::Nonconstructive(_))));
        assert!(matches!(c.get("nope", None), Err(Error::UnknownSystem(_))));
        assert!(c.get_selector("thue-morse:x=1").is_err());
        assert!(c.get_selector("toeplitz-rank:q=1").is_err());
    }

    #[test]
    fn families_take_parameters() {
        let t = get("toeplitz-rank:r=4").unwrap();
        assert_eq!(t.name, "toeplitz-rank:r=4");
        assert_eq!(t.golden("r_M").unwrap().value, 4);
        let g = get("gen-morse:block=0110").unwrap();
        assert_eq!(g.system.describe(), "0 -> 0110, 1 -> 1001");
        assert!(get("gen-morse:block=10").is_err());
    }

    #[test]
    fn thue_morse_goldens() {
        let tm = get("thue-morse").unwrap();
        assert_eq!(tm.golden("r_m").unwrap().provenance, Provenance::Paper);
        assert_eq!(tm.golden("r_M").unwrap().value, 4);
    }
}

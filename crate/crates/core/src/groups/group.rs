use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical form of a group element.
///
/// The interpretation depends on the owning [`Group`]:
/// free-abelian groups use integer tuples, cyclic and finite-table groups a
/// single residue or row index, the Heisenberg group the triple `(a, b, c)`,
/// and free groups a freely reduced word whose letters are `±(i + 1)` for
/// generator `i`. Two elements are equal iff their canonical forms are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub Vec<i64>);

impl Element {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        Element(coords.into())
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Multiplication table of a finite group on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteTable {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteTable {
    /// Validates closure, associativity, identity and inverses exhaustively.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Group("empty multiplication table".into()));
        }
        if n > 256 {
            return Err(Error::Group(format!("table of order {n} exceeds 256")));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Group(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(Error::Group(format!("entry {bad} in row {i} is out of range")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::Group("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Group(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let mut inverse = Vec::with_capacity(n);
        for g in 0..n {
            let inv = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::Group(format!("element {g} has no inverse")))?;
            inverse.push(inv);
        }
        Ok(FiniteTable { table, identity, inverse })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.table
    }
}

/// Description of a group instance, as parsed from configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupDescriptor {
    FreeAbelian(usize),
    Cyclic(i64),
    Heisenberg,
    Free(usize),
    FiniteTable(Vec<Vec<usize>>),
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    /// Accepts `Z`, `Z^d`, `free-abelian(d)`, `cyclic(n)`, `Z_n`,
    /// `heisenberg`, `free(k)` and `F_k`. Finite tables are not expressible
    /// as a single token and must be given through [`GroupDescriptor::FiniteTable`].
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        let arg = |prefix: &str| -> Option<&str> {
            lower.strip_prefix(prefix).and_then(|r| r.strip_suffix(')'))
        };
        let int = |t: &str| -> Result<i64> {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad integer in group descriptor `{s}`")))
        };
        let desc = if lower == "z" {
            GroupDescriptor::FreeAbelian(1)
        } else if lower == "heisenberg" || lower == "h3" {
            GroupDescriptor::Heisenberg
        } else if let Some(d) = lower.strip_prefix("z^") {
            GroupDescriptor::FreeAbelian(to_rank(int(d)?)?)
        } else if let Some(n) = lower.strip_prefix("z_") {
            GroupDescriptor::Cyclic(int(n)?)
        } else if let Some(k) = lower.strip_prefix("f_") {
            GroupDescriptor::Free(to_rank(int(k)?)?)
        } else if let Some(d) = arg("free-abelian(") {
            GroupDescriptor::FreeAbelian(to_rank(int(d)?)?)
        } else if let Some(n) = arg("cyclic(") {
            GroupDescriptor::Cyclic(int(n)?)
        } else if let Some(k) = arg("free(") {
            GroupDescriptor::Free(to_rank(int(k)?)?)
        } else {
            return Err(Error::Parse(format!("unknown group descriptor `{s}`")));
        };
        Ok(desc)
    }
}

fn to_rank(v: i64) -> Result<usize> {
    if (1..=64).contains(&v) {
        Ok(v as usize)
    } else {
        Err(Error::Group(format!("rank {v} must lie in 1..=64")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    FreeAbelian { rank: usize },
    Cyclic { order: i64 },
    Heisenberg,
    Free { rank: usize },
    Finite(FiniteTable),
}

/// A finitely generated discrete group with a symmetric generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    kind: GroupKind,
    generators: Vec<Element>,
    standard: bool,
}

/// Builds a group from its descriptor with the standard generating set.
pub fn make_group(desc: &GroupDescriptor) -> Result<Group> {
    let kind = match desc {
        GroupDescriptor::FreeAbelian(d) if *d >= 1 => GroupKind::FreeAbelian { rank: *d },
        GroupDescriptor::Cyclic(n) if *n >= 2 => GroupKind::Cyclic { order: *n },
        GroupDescriptor::Heisenberg => GroupKind::Heisenberg,
        GroupDescriptor::Free(k) if *k >= 1 => GroupKind::Free { rank: *k },
        GroupDescriptor::FiniteTable(t) => GroupKind::Finite(FiniteTable::new(t.clone())?),
        other => return Err(Error::Group(format!("ill-formed descriptor {other:?}"))),
    };
    let generators = standard_generators(&kind);
    let group = Group { kind, generators, standard: true };
    group.check_generator_axioms()?;
    Ok(group)
}

fn standard_generators(kind: &GroupKind) -> Vec<Element> {
    match kind {
        GroupKind::FreeAbelian { rank } => {
            let mut gens = Vec::with_capacity(2 * rank);
            for i in 0..*rank {
                for s in [1, -1] {
                    let mut v = vec![0; *rank];
                    v[i] = s;
                    gens.push(Element(v));
                }
            }
            gens
        }
        GroupKind::Cyclic { order } => {
            if *order == 2 {
                vec![Element(vec![1])]
            } else {
                vec![Element(vec![1]), Element(vec![order - 1])]
            }
        }
        GroupKind::Heisenberg => vec![
            Element(vec![1, 0, 0]),
            Element(vec![-1, 0, 0]),
            Element(vec![0, 1, 0]),
            Element(vec![0, -1, 0]),
        ],
        GroupKind::Free { rank } => (1..=*rank as i64)
            .flat_map(|i| [Element(vec![i]), Element(vec![-i])])
            .collect(),
        GroupKind::Finite(t) => (0..t.order())
            .filter(|&g| g != t.identity)
            .map(|g| Element(vec![g as i64]))
            .collect(),
    }
}

impl Group {
    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    /// True when the generating set is the standard one of the descriptor.
    pub fn has_standard_generators(&self) -> bool {
        self.standard
    }

    /// Same group with a different generating set. The set is symmetrized
    /// and the identity removed.
    pub fn with_generators(&self, gens: &[Element]) -> Result<Group> {
        let id = self.identity();
        let mut out: Vec<Element> = Vec::new();
        for g in gens {
            if !self.is_element(g) {
                return Err(Error::Group(format!("{g} is not a canonical element")));
            }
            for h in [g.clone(), self.inverse(g)] {
                if h != id && !out.contains(&h) {
                    out.push(h);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Group("generating set is empty".into()));
        }
        let mut sorted_std = standard_generators(&self.kind);
        sorted_std.sort();
        let mut sorted_new = out.clone();
        sorted_new.sort();
        let standard = sorted_std == sorted_new;
        let group = Group { kind: self.kind.clone(), generators: out, standard };
        group.check_generator_axioms()?;
        Ok(group)
    }

    fn check_generator_axioms(&self) -> Result<()> {
        let e = self.identity();
        for g in &self.generators {
            let gi = self.inverse(g);
            if self.multiply(g, &gi) != e || self.multiply(&gi, g) != e {
                return Err(Error::Group(format!("inverse axiom fails at {g}")));
            }
            if self.multiply(&e, g) != *g || self.multiply(g, &e) != *g {
                return Err(Error::Group(format!("identity axiom fails at {g}")));
            }
            if !self.generators.contains(&gi) {
                return Err(Error::Group(format!("generator {g} lacks its inverse")));
            }
        }
        Ok(())
    }

    pub fn identity(&self) -> Element {
        match &self.kind {
            GroupKind::FreeAbelian { rank } => Element(vec![0; *rank]),
            GroupKind::Cyclic { .. } => Element(vec![0]),
            GroupKind::Heisenberg => Element(vec![0, 0, 0]),
            GroupKind::Free { .. } => Element(Vec::new()),
            GroupKind::Finite(t) => Element(vec![t.identity as i64]),
        }
    }

    /// Whether `g` is a valid canonical form for this group.
    pub fn is_element(&self, g: &Element) -> bool {
        let v = &g.0;
        match &self.kind {
            GroupKind::FreeAbelian { rank } => v.len() == *rank,
            GroupKind::Cyclic { order } => v.len() == 1 && (0..*order).contains(&v[0]),
            GroupKind::Heisenberg => v.len() == 3,
            GroupKind::Free { rank } => {
                let r = *rank as i64;
                v.iter().all(|&x| x != 0 && x.abs() <= r) && v.windows(2).all(|w| w[0] != -w[1])
            }
            GroupKind::Finite(t) => v.len() == 1 && v[0] >= 0 && (v[0] as usize) < t.order(),
        }
    }

    pub fn multiply(&self, g: &Element, h: &Element) -> Element {
        let (a, b) = (&g.0, &h.0);
        match &self.kind {
            GroupKind::FreeAbelian { .. } => {
                Element(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            GroupKind::Cyclic { order } => Element(vec![(a[0] + b[0]).rem_euclid(*order)]),
            GroupKind::Heisenberg => {
                Element(vec![a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]])
            }
            GroupKind::Free { .. } => {
                let mut word = a.clone();
                for &x in b {
                    if word.last() == Some(&-x) {
                        word.pop();
                    } else {
                        word.push(x);
                    }
                }
                Element(word)
            }
            GroupKind::Finite(t) => Element(vec![t.table[a[0] as usize][b[0] as usize] as i64]),
        }
    }

    pub fn inverse(&self, g: &Element) -> Element {
        let a = &g.0;
        match &self.kind {
            GroupKind::FreeAbelian { .. } => Element(a.iter().map(|x| -x).collect()),
            GroupKind::Cyclic { order } => Element(vec![(-a[0]).rem_euclid(*order)]),
            GroupKind::Heisenberg => Element(vec![-a[0], -a[1], -a[2] + a[0] * a[1]]),
            GroupKind::Free { .. } => Element(a.iter().rev().map(|x| -x).collect()),
            GroupKind::Finite(t) => Element(vec![t.inverse[a[0] as usize] as i64]),
        }
    }

    /// Number of elements, for finite groups.
    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::Cyclic { order } => Some(*order as usize),
            GroupKind::Finite(t) => Some(t.order()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    /// All elements of a finite group, indexed consistently with [`Group::finite_index`].
    pub fn elements(&self) -> Option<Vec<Element>> {
        self.order().map(|n| (0..n as i64).map(|i| Element(vec![i])).collect())
    }

    pub fn finite_index(&self, g: &Element) -> Option<usize> {
        match &self.kind {
            GroupKind::Cyclic { .. } | GroupKind::Finite(_) if self.is_element(g) => {
                Some(g.0[0] as usize)
            }
            _ => None,
        }
    }

    /// Rank of a free-abelian group; `None` otherwise.
    pub fn abelian_rank(&self) -> Option<usize> {
        match self.kind {
            GroupKind::FreeAbelian { rank } => Some(rank),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            GroupKind::FreeAbelian { rank: 1 } => "Z".into(),
            GroupKind::FreeAbelian { rank } => format!("Z^{rank}"),
            GroupKind::Cyclic { order } => format!("Z_{order}"),
            GroupKind::Heisenberg => "heisenberg".into(),
            GroupKind::Free { rank } => format!("free({rank})"),
            GroupKind::Finite(t) => format!("finite({})", t.order()),
        }
    }
}

//! Finite groups given by a multiplication table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite group presented by element names and a full multiplication table,
/// `mult[a][b] = a·b`. Construction checks the group axioms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupDoc", into = "GroupDoc")]
pub struct FiniteGroup {
    elements: Vec<String>,
    mult: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GroupDoc {
    elements: Vec<String>,
    mult_table: Vec<Vec<usize>>,
}

impl TryFrom<GroupDoc> for FiniteGroup {
    type Error = Error;
    fn try_from(d: GroupDoc) -> Result<Self> {
        FiniteGroup::new(d.elements, d.mult_table)
    }
}

impl From<FiniteGroup> for GroupDoc {
    fn from(g: FiniteGroup) -> Self {
        GroupDoc {
            elements: g.elements,
            mult_table: g.mult,
        }
    }
}

impl FiniteGroup {
    pub fn new(elements: Vec<String>, mult: Vec<Vec<usize>>) -> Result<Self> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::Degenerate("group with no elements".into()));
        }
        if mult.len() != n || mult.iter().any(|row| row.len() != n) {
            return Err(Error::Malformed(format!(
                "multiplication table must be {n}x{n}"
            )));
        }
        if mult.iter().flatten().any(|&x| x >= n) {
            return Err(Error::Malformed("multiplication table entry out of range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mult[e][a] == a && mult[a][e] == a))
            .ok_or_else(|| Error::Malformed("group has no identity".into()))?;
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| mult[a][b] == identity && mult[b][a] == identity)
                .ok_or_else(|| {
                    Error::Malformed(format!("element '{}' has no inverse", elements[a]))
                })?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return Err(Error::Malformed(format!(
                            "multiplication is not associative at ({}, {}, {})",
                            elements[a], elements[b], elements[c]
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            elements,
            mult,
            identity,
            inverse,
        })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// ℤ/nℤ with elements named "0".."n-1".
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        let elements = (0..n).map(|i| i.to_string()).collect();
        let mult = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        FiniteGroup {
            elements,
            mult,
            identity: 0,
            inverse: (0..n).map(|a| (n - a) % n).collect(),
        }
    }

    /// Direct product; element (a, b) has index `a * |other| + b` and name "a.b".
    pub fn product(&self, other: &FiniteGroup) -> Self {
        let m = other.order();
        let mut elements = Vec::with_capacity(self.order() * m);
        for a in &self.elements {
            for b in &other.elements {
                elements.push(format!("{a}.{b}"));
            }
        }
        let n = elements.len();
        let mult = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| self.mult[x / m][y / m] * m + other.mult[x % m][y % m])
                    .collect()
            })
            .collect();
        FiniteGroup::new(elements, mult).expect("product of groups is a group")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.elements[a]
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn mult_table(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }
}

//! Finite abelian groups as products of cyclic factors, and metric groups.

use serde::{Deserialize, Serialize};

use super::qz::Qz;
use crate::error::{Error, Result};

/// Largest group this module will enumerate.
pub const MAX_ORDER: usize = 1 << 16;

/// ⊕ ℤ/n_i, elements indexed in mixed radix with the first factor most significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

impl TryFrom<Vec<u64>> for AbelianGroup {
    type Error = Error;
    fn try_from(f: Vec<u64>) -> Result<Self> {
        AbelianGroup::new(f)
    }
}

impl From<AbelianGroup> for Vec<u64> {
    fn from(a: AbelianGroup) -> Self {
        a.factors
    }
}

impl AbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.iter().any(|&n| n == 0) {
            return Err(Error::Malformed("cyclic factor of order 0".into()));
        }
        let order = factors.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n as usize));
        match order {
            Some(o) if o <= MAX_ORDER => Ok(AbelianGroup { factors }),
            _ => Err(Error::TooLarge(format!("abelian group with factors {factors:?}"))),
        }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product::<u64>() as usize
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn element(&self, mut idx: usize) -> Vec<u64> {
        let mut v = vec![0; self.factors.len()];
        for (slot, &n) in v.iter_mut().zip(&self.factors).rev() {
            *slot = (idx % n as usize) as u64;
            idx /= n as usize;
        }
        v
    }

    /// Index of a residue vector; entries are reduced first.
    pub fn index(&self, v: &[u64]) -> usize {
        v.iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&x, &n)| acc * n as usize + (x % n) as usize)
    }

    pub fn index_signed(&self, v: &[i64]) -> usize {
        v.iter().zip(&self.factors).fold(0usize, |acc, (&x, &n)| {
            acc * n as usize + x.rem_euclid(n as i64) as usize
        })
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.element(a), self.element(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        self.index(&s)
    }

    pub fn neg(&self, a: usize) -> usize {
        let x = self.element(a);
        let s: Vec<u64> = x.iter().zip(&self.factors).map(|(p, n)| (n - p) % n).collect();
        self.index(&s)
    }

    pub fn scale(&self, a: usize, k: i64) -> usize {
        let x = self.element(a);
        let s: Vec<i64> = x.iter().map(|&p| p as i64 * k).collect();
        self.index_signed(&s)
    }

    pub fn order_of(&self, a: usize) -> u64 {
        let x = self.element(a);
        x.iter()
            .zip(&self.factors)
            .map(|(&p, &n)| n / num_integer::gcd(p, n))
            .fold(1, num_integer::lcm)
    }

    /// Standard pairing Σ x_i y_i / n_i, identifying the group with its dual.
    pub fn pairing(&self, x: &[u64], y: &[u64]) -> Qz {
        x.iter()
            .zip(y)
            .zip(&self.factors)
            .map(|((&a, &b), &n)| Qz::new(((a * b) % n) as i64, n as i64))
            .sum()
    }

    pub fn name(&self, a: usize) -> String {
        let v = self.element(a);
        if v.is_empty() {
            return "0".into();
        }
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
    }

    pub fn product(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut f = self.factors.clone();
        f.extend_from_slice(&other.factors);
        AbelianGroup { factors: f }
    }

    /// Smallest subgroup containing `gens`, as sorted element indices.
    pub fn span(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.add(x, g);
                if !seen[y] {
                    seen[y] = true;
                    frontier.push(y);
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }
}

/// A finite abelian group with a quadratic form q valued in ℚ/ℤ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricGroup {
    group: AbelianGroup,
    q: Vec<Qz>,
    bichar: Option<Vec<Vec<Qz>>>,
}

#[derive(Serialize, Deserialize)]
struct MetricDoc {
    factors: AbelianGroup,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<Vec<Qz>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bichar: Option<Vec<Vec<Qz>>>,
}

impl Serialize for MetricGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MetricDoc {
            factors: self.group.clone(),
            q: if self.bichar.is_some() { None } else { Some(self.q.clone()) },
            bichar: self.bichar.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MetricGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = MetricDoc::deserialize(d)?;
        match (doc.q, doc.bichar) {
            (Some(q), None) => MetricGroup::from_q(doc.factors, q).map_err(D::Error::custom),
            (None, Some(b)) => MetricGroup::from_bicharacter(doc.factors, b).map_err(D::Error::custom),
            _ => Err(D::Error::custom("give exactly one of q or bichar")),
        }
    }
}

impl MetricGroup {
    /// From the table of q over all elements in index order.
    pub fn from_q(group: AbelianGroup, q: Vec<Qz>) -> Result<Self> {
        if q.len() != group.order() {
            return Err(Error::Malformed(format!(
                "q has {} values for a group of order {}",
                q.len(),
                group.order()
            )));
        }
        let m = MetricGroup { group, q, bichar: None };
        m.check()?;
        Ok(m)
    }

    /// From a bicharacter on the generators, b(e_i, e_j) = β_ij, with q(x) = b(x, x).
    pub fn from_bicharacter(group: AbelianGroup, beta: Vec<Vec<Qz>>) -> Result<Self> {
        let r = group.rank();
        if beta.len() != r || beta.iter().any(|row| row.len() != r) {
            return Err(Error::Malformed(format!("bicharacter must be {r}x{r}")));
        }
        let f = group.factors();
        for i in 0..r {
            for j in 0..r {
                if !(beta[i][j] * f[i] as i64).is_zero() || !(beta[i][j] * f[j] as i64).is_zero() {
                    return Err(Error::Malformed(format!(
                        "bicharacter entry ({i},{j}) = {} is not well defined on the factors",
                        beta[i][j]
                    )));
                }
            }
        }
        let q = (0..group.order())
            .map(|a| {
                let x = group.element(a);
                let mut s = Qz::ZERO;
                for i in 0..r {
                    for j in 0..r {
                        s += beta[i][j] * (x[i] * x[j]) as i64;
                    }
                }
                s
            })
            .collect();
        let m = MetricGroup {
            group,
            q,
            bichar: Some(beta),
        };
        m.check()?;
        Ok(m)
    }

    /// Â×A with q(φ, a) = φ(a).
    pub fn hyperbolic(a: &AbelianGroup) -> MetricGroup {
        let b = a.product(a);
        let r = a.rank();
        let q = (0..b.order())
            .map(|i| {
                let x = b.element(i);
                a.pairing(&x[..r], &x[r..])
            })
            .collect();
        MetricGroup { group: b, q, bichar: None }
    }

    fn check(&self) -> Result<()> {
        let g = &self.group;
        if !self.q[0].is_zero() {
            return Err(Error::DegenerateForm("q(0) must be 0".into()));
        }
        for a in 0..g.order() {
            if self.q[g.neg(a)] != self.q[a] {
                return Err(Error::DegenerateForm(format!("q(-x) != q(x) at {}", g.name(a))));
            }
        }
        // bi-additivity of χ in the second argument (symmetry gives the first)
        for a in 0..g.order() {
            for x in 0..g.order() {
                for y in 0..g.order() {
                    if self.chi(a, g.add(x, y)) != self.chi(a, x) + self.chi(a, y) {
                        return Err(Error::DegenerateForm(format!(
                            "χ is not bi-additive at ({}, {}, {})",
                            g.name(a),
                            g.name(x),
                            g.name(y)
                        )));
                    }
                }
            }
        }
        for a in 1..g.order() {
            if (0..g.order()).all(|x| self.chi(a, x).is_zero()) {
                return Err(Error::DegenerateForm(format!(
                    "χ_{} is trivial, so the form is degenerate",
                    g.name(a)
                )));
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn q(&self, a: usize) -> Qz {
        self.q[a]
    }

    /// χ_a(x) = q(a+x) − q(a) − q(x).
    pub fn chi(&self, a: usize, x: usize) -> Qz {
        self.q[self.group.add(a, x)] - self.q[a] - self.q[x]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_radix_indexing() {
        let a = AbelianGroup::new(vec![2, 3]).unwrap();
        assert_eq!(a.order(), 6);
        assert_eq!(a.element(5), vec![1, 2]);
        assert_eq!(a.index(&[1, 2]), 5);
        assert_eq!(a.add(5, 5), a.index(&[0, 1]));
        assert_eq!(a.neg(a.index(&[1, 1])), a.index(&[1, 2]));
        assert_eq!(a.order_of(a.index(&[1, 1])), 6);
        assert_eq!(a.span(&[a.index(&[0, 1])]).len(), 3);
    }

    #[test]
    fn hyperbolic_z2_values() {
        let b = MetricGroup::hyperbolic(&AbelianGroup::new(vec![2]).unwrap());
        let vals: Vec<String> = (0..4).map(|i| b.q(i).to_string()).collect();
        // index order (φ,a): (0,0),(0,1),(1,0),(1,1)
        assert_eq!(vals, vec!["0", "0", "0", "1/2"]);
    }

    #[test]
    fn hyperbolic_z3_and_klein() {
        let b = MetricGroup::hyperbolic(&AbelianGroup::new(vec![3]).unwrap());
        assert_eq!(b.order(), 9);
        assert_eq!(b.q(b.group().index(&[2, 2])), Qz::new(1, 3));
        let k = MetricGroup::hyperbolic(&AbelianGroup::new(vec![2, 2]).unwrap());
        assert_eq!(k.order(), 16);
    }

    #[test]
    fn semion_from_bicharacter() {
        let m = MetricGroup::from_bicharacter(AbelianGroup::new(vec![2]).unwrap(), vec![vec![Qz::new(1, 4)]]);
        // b(1,1)=1/4 is not well defined on ℤ/2
        assert!(m.is_err());
        let s = MetricGroup::from_q(AbelianGroup::new(vec![2]).unwrap(), vec![Qz::ZERO, Qz::new(1, 4)]).unwrap();
        assert_eq!(s.chi(1, 1), Qz::new(1, 2));
    }

    #[test]
    fn degenerate_form_rejected() {
        let g = AbelianGroup::new(vec![2]).unwrap();
        assert!(matches!(
            MetricGroup::from_q(g, vec![Qz::ZERO, Qz::ZERO]),
            Err(Error::DegenerateForm(_))
        ));
    }

    #[test]
    fn serde_round_trip() {
        let b = MetricGroup::hyperbolic(&AbelianGroup::new(vec![2]).unwrap());
        let s = serde_json::to_string(&b).unwrap();
        let back: MetricGroup = serde_json::from_str(&s).unwrap();
        assert_eq!(b, back);
    }
}

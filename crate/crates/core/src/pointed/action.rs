//! Orthogonal actions of a finite group on a metric group, with a 2-cocycle.

use serde::{Deserialize, Serialize};

use super::metric::{AbelianGroup, MetricGroup};
use super::qz::Qz;
use super::subgroup::{lagrangian_from_pair, LagrangianSubgroup};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// π: G → O(B, q) given by integer matrices, and ω: G×G → B.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalAction {
    group: FiniteGroup,
    matrices: Vec<Vec<Vec<i64>>>,
    omega: Vec<Vec<usize>>,
    perm: Vec<Vec<usize>>,
    inv_perm: Vec<Vec<usize>>,
}

fn apply(b: &AbelianGroup, m: &[Vec<i64>], x: usize) -> usize {
    let v = b.element(x);
    let w: Vec<i64> = m
        .iter()
        .map(|row| row.iter().zip(&v).map(|(a, &c)| a * c as i64).sum())
        .collect();
    b.index_signed(&w)
}

impl OrthogonalAction {
    /// `omega[g][h]` are residue vectors in B.
    pub fn new(
        metric: &MetricGroup,
        group: FiniteGroup,
        matrices: Vec<Vec<Vec<i64>>>,
        omega: Vec<Vec<Vec<i64>>>,
    ) -> Result<Self> {
        let b = metric.group();
        let r = b.rank();
        let m = group.order();
        let f = b.factors();
        if matrices.len() != m {
            return Err(Error::InvalidAction(format!("{} matrices for {m} group elements", matrices.len())));
        }
        for (g, mat) in matrices.iter().enumerate() {
            if mat.len() != r || mat.iter().any(|row| row.len() != r) {
                return Err(Error::InvalidAction(format!("matrix of '{}' must be {r}x{r}", group.name(g))));
            }
            for i in 0..r {
                for j in 0..r {
                    if (mat[i][j] * f[j] as i64).rem_euclid(f[i] as i64) != 0 {
                        return Err(Error::InvalidAction(format!(
                            "matrix of '{}' is not well defined at ({i},{j})",
                            group.name(g)
                        )));
                    }
                }
            }
        }
        let perm: Vec<Vec<usize>> = matrices
            .iter()
            .map(|mat| (0..b.order()).map(|x| apply(b, mat, x)).collect())
            .collect();
        let mut inv_perm = Vec::with_capacity(m);
        for (g, p) in perm.iter().enumerate() {
            let mut inv = vec![usize::MAX; b.order()];
            for (x, &y) in p.iter().enumerate() {
                inv[y] = x;
            }
            if inv.contains(&usize::MAX) {
                return Err(Error::InvalidAction(format!("π({}) is not bijective", group.name(g))));
            }
            for x in 0..b.order() {
                if metric.q(p[x]) != metric.q(x) {
                    return Err(Error::InvalidAction(format!(
                        "π({}) does not preserve q at {}",
                        group.name(g),
                        b.name(x)
                    )));
                }
            }
            inv_perm.push(inv);
        }
        for g in 0..m {
            for h in 0..m {
                let gh = group.mul(g, h);
                if (0..b.order()).any(|x| perm[gh][x] != perm[g][perm[h][x]]) {
                    return Err(Error::InvalidAction(format!(
                        "π is not a homomorphism at ({}, {})",
                        group.name(g),
                        group.name(h)
                    )));
                }
            }
        }
        let omega = if omega.is_empty() {
            vec![vec![0; m]; m]
        } else {
            if omega.len() != m || omega.iter().any(|row| row.len() != m || row.iter().any(|v| v.len() != r)) {
                return Err(Error::InvalidAction(format!("ω must be {m}x{m} residue vectors of length {r}")));
            }
            omega
                .iter()
                .map(|row| row.iter().map(|v| b.index_signed(v)).collect())
                .collect()
        };
        let act = OrthogonalAction {
            group,
            matrices,
            omega,
            perm,
            inv_perm,
        };
        act.check_cocycle(metric)?;
        Ok(act)
    }

    /// Trivial π and ω.
    pub fn trivial(metric: &MetricGroup, group: FiniteGroup) -> Self {
        let r = metric.group().rank();
        let id: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
        let m = group.order();
        OrthogonalAction::new(metric, group, vec![id; m], Vec::new()).expect("trivial action")
    }

    fn check_cocycle(&self, metric: &MetricGroup) -> Result<()> {
        let b = metric.group();
        let grp = &self.group;
        let m = grp.order();
        for g in 0..m {
            for h in 0..m {
                for k in 0..m {
                    let lhs = b.add(self.omega[g][grp.mul(h, k)], self.act(g, self.omega[h][k]));
                    let rhs = b.add(self.omega[g][h], self.omega[grp.mul(g, h)][k]);
                    if lhs != rhs {
                        return Err(Error::InvalidAction(format!(
                            "ω fails the cocycle identity at ({}, {}, {})",
                            grp.name(g),
                            grp.name(h),
                            grp.name(k)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.perm[g][x]
    }

    pub fn act_inv(&self, g: usize, x: usize) -> usize {
        self.inv_perm[g][x]
    }

    pub fn omega(&self, g: usize, h: usize) -> usize {
        self.omega[g][h]
    }

    pub fn to_doc(&self, metric: &MetricGroup) -> ActionDoc {
        let b = metric.group();
        ActionDoc {
            group: self.group.clone(),
            pi: self.matrices.clone(),
            omega: Some(
                self.omega
                    .iter()
                    .map(|row| row.iter().map(|&x| b.element(x).iter().map(|&v| v as i64).collect()).collect())
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDoc {
    #[serde(rename = "G")]
    pub group: FiniteGroup,
    pub pi: Vec<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<Vec<Vec<i64>>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricInput {
    Hyperbolic { hyperbolic: Vec<u64> },
    Explicit(MetricGroup),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LagrangianInput {
    Generators {
        generators: Vec<Vec<u64>>,
    },
    Pair {
        #[serde(rename = "H")]
        h: Vec<Vec<u64>>,
        b: Vec<Vec<Qz>>,
    },
}

/// Input document for the pointed closed form and spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointedInput {
    #[serde(default = "crate::schema_version")]
    pub schema_version: u32,
    pub metric: MetricInput,
    pub lagrangian: LagrangianInput,
    pub action: ActionDoc,
}

impl PointedInput {
    pub fn build(&self) -> Result<(MetricGroup, LagrangianSubgroup, OrthogonalAction)> {
        let (metric, lag) = match (&self.metric, &self.lagrangian) {
            (MetricInput::Hyperbolic { hyperbolic }, LagrangianInput::Pair { h, b }) => {
                let a = AbelianGroup::new(hyperbolic.clone())?;
                let gens: Vec<usize> = h.iter().map(|v| a.index(v)).collect();
                lagrangian_from_pair(&a, &gens, b)?
            }
            (_, LagrangianInput::Pair { .. }) => {
                return Err(Error::Malformed("an (H, b) Lagrangian needs a hyperbolic metric group".into()))
            }
            (m, LagrangianInput::Generators { generators }) => {
                let metric = match m {
                    MetricInput::Hyperbolic { hyperbolic } => {
                        MetricGroup::hyperbolic(&AbelianGroup::new(hyperbolic.clone())?)
                    }
                    MetricInput::Explicit(mg) => mg.clone(),
                };
                let gens: Vec<usize> = generators.iter().map(|v| metric.group().index(v)).collect();
                let l = LagrangianSubgroup::generated(&metric, &gens)?;
                (metric, l)
            }
        };
        let act = OrthogonalAction::new(
            &metric,
            self.action.group.clone(),
            self.action.pi.clone(),
            self.action.omega.clone().unwrap_or_default(),
        )?;
        Ok((metric, lag, act))
    }
}

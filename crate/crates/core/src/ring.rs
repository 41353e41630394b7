//! Based fusion rings, their G-graded refinements, and the axiom checks every
//! ring produced by this crate has to pass.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::SCHEMA_VERSION;

/// Separator used for composite labels of Deligne products.
pub const BOXTIMES: &str = "⊠";

pub fn join_labels<S: AsRef<str>>(parts: &[S]) -> String {
    parts
        .iter()
        .map(|s| s.as_ref())
        .collect::<Vec<_>>()
        .join(BOXTIMES)
}

/// A based ring with nonnegative integer structure constants
/// `n[x][y][z] = N^z_{xy}`, a distinguished unit and a duality involution.
///
/// Construction only checks shapes; the ring axioms are checked by
/// [`FusionRing::verify`], which reports violations as data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionRing {
    labels: Vec<String>,
    unit: usize,
    dual: Vec<usize>,
    n: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    LeftUnit,
    RightUnit,
    Associativity,
    Rigidity,
    DualInvolution,
    Grading,
    FusionDimension,
}

/// One failed axiom instance, naming the offending label indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub indices: Vec<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {:?}: {}", self.axiom, self.indices, self.detail)
    }
}

impl FusionRing {
    pub fn new(labels: Vec<String>, unit: usize, dual: Vec<usize>, n: Vec<u64>) -> Result<Self> {
        let r = labels.len();
        if r == 0 {
            return Err(Error::Degenerate("fusion ring of rank 0".into()));
        }
        if unit >= r {
            return Err(Error::Degenerate(format!("unit index {unit} out of range for rank {r}")));
        }
        if dual.len() != r || dual.iter().any(|&d| d >= r) {
            return Err(Error::Malformed("dual must map each label to a label index".into()));
        }
        if n.len() != r * r * r {
            return Err(Error::Malformed(format!(
                "fusion tensor has {} entries, expected {}",
                n.len(),
                r * r * r
            )));
        }
        Ok(FusionRing { labels, unit, dual, n })
    }

    /// Builds a ring from a tensor alone, reading off the unit and duals.
    pub fn from_tensor(labels: Vec<String>, n: Vec<u64>) -> Result<Self> {
        let r = labels.len();
        if r == 0 || n.len() != r * r * r {
            return Err(Error::Malformed("tensor shape does not match labels".into()));
        }
        let at = |x: usize, y: usize, z: usize| n[(x * r + y) * r + z];
        let units: Vec<usize> = (0..r)
            .filter(|&u| (0..r).all(|y| (0..r).all(|z| at(u, y, z) == u64::from(y == z))))
            .collect();
        let unit = match units.as_slice() {
            [u] => *u,
            _ => return Err(Error::Degenerate(format!("expected one unit, found {}", units.len()))),
        };
        let mut dual = Vec::with_capacity(r);
        for x in 0..r {
            let ys: Vec<usize> = (0..r).filter(|&y| at(x, y, unit) > 0).collect();
            match ys.as_slice() {
                [y] => dual.push(*y),
                _ => {
                    return Err(Error::NoDual {
                        label: labels[x].clone(),
                        detail: format!("{} candidates pair to the unit", ys.len()),
                    })
                }
            }
        }
        FusionRing::new(labels, unit, dual, n)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn dual(&self, x: usize) -> usize {
        self.dual[x]
    }

    pub fn duals(&self) -> &[usize] {
        &self.dual
    }

    #[inline]
    pub fn n(&self, x: usize, y: usize, z: usize) -> u64 {
        let r = self.rank();
        self.n[(x * r + y) * r + z]
    }

    pub fn tensor(&self) -> &[u64] {
        &self.n
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Multiplicity vector of `x ⊗ y`.
    pub fn product_of(&self, x: usize, y: usize) -> Vec<u64> {
        (0..self.rank()).map(|z| self.n(x, y, z)).collect()
    }

    /// Checks unit law, associativity, rigidity normalization and that the
    /// duality map is an involution. Empty iff all hold.
    pub fn verify(&self) -> Vec<Violation> {
        let r = self.rank();
        let u = self.unit;
        let mut out = Vec::new();
        for y in 0..r {
            for z in 0..r {
                let want = u64::from(y == z);
                if self.n(u, y, z) != want {
                    out.push(Violation {
                        axiom: Axiom::LeftUnit,
                        indices: vec![y, z],
                        detail: format!("N[unit][{y}][{z}] = {}, expected {want}", self.n(u, y, z)),
                    });
                }
                if self.n(y, u, z) != want {
                    out.push(Violation {
                        axiom: Axiom::RightUnit,
                        indices: vec![y, z],
                        detail: format!("N[{y}][unit][{z}] = {}, expected {want}", self.n(y, u, z)),
                    });
                }
            }
        }
        for x in 0..r {
            for y in 0..r {
                let want = u64::from(y == self.dual[x]);
                let got = self.n(x, y, u);
                if got != want {
                    out.push(Violation {
                        axiom: Axiom::Rigidity,
                        indices: vec![x, y],
                        detail: format!("N[{x}][{y}][unit] = {got}, expected {want}"),
                    });
                }
            }
            if self.dual[self.dual[x]] != x {
                out.push(Violation {
                    axiom: Axiom::DualInvolution,
                    indices: vec![x],
                    detail: format!("dual(dual({x})) = {}", self.dual[self.dual[x]]),
                });
            }
        }
        // sparse rows: prod[a·r + b] lists (m, N^m_{ab}) with N > 0
        let prod: Vec<Vec<(usize, u64)>> = (0..r * r)
            .map(|ab| {
                let (x, y) = (ab / r, ab % r);
                (0..r).filter_map(|m| Some((m, self.n(x, y, m))).filter(|p| p.1 > 0)).collect()
            })
            .collect();
        let assoc: Vec<Violation> = (0..r)
            .into_par_iter()
            .flat_map_iter(|a| {
                let mut v = Vec::new();
                let mut lhs = vec![0u64; r];
                let mut rhs = vec![0u64; r];
                for b in 0..r {
                    for c in 0..r {
                        lhs.iter_mut().for_each(|x| *x = 0);
                        rhs.iter_mut().for_each(|x| *x = 0);
                        for &(m, ab) in &prod[a * r + b] {
                            for &(d, mc) in &prod[m * r + c] {
                                lhs[d] += ab * mc;
                            }
                        }
                        for &(m, bc) in &prod[b * r + c] {
                            for &(d, am) in &prod[a * r + m] {
                                rhs[d] += bc * am;
                            }
                        }
                        for d in 0..r {
                            if lhs[d] != rhs[d] {
                                v.push(Violation {
                                    axiom: Axiom::Associativity,
                                    indices: vec![a, b, c, d],
                                    detail: format!("(ab)c gives {}, a(bc) gives {}", lhs[d], rhs[d]),
                                });
                            }
                        }
                    }
                }
                v
            })
            .collect();
        out.extend(assoc);
        out
    }

    /// Frobenius-Perron dimensions: the positive common eigenvector of the
    /// left multiplication matrices, normalized so the unit has dimension 1.
    pub fn fp_dims(&self) -> Result<Vec<f64>> {
        const MAX_ITER: usize = 10_000;
        const TOL: f64 = 1e-12;
        let r = self.rank();
        // M[y][z] = Σ_x N[x][y][z]; the FP vector d satisfies M d = (Σ d_x) d.
        let mut m = vec![0f64; r * r];
        for x in 0..r {
            for y in 0..r {
                for z in 0..r {
                    m[y * r + z] += self.n(x, y, z) as f64;
                }
            }
        }
        let mut v = vec![1f64; r];
        let mut residual = f64::INFINITY;
        for _ in 0..MAX_ITER {
            let mut w = vec![0f64; r];
            for y in 0..r {
                w[y] = (0..r).map(|z| m[y * r + z] * v[z]).sum();
            }
            let scale = w[self.unit];
            if !(scale > 0.0) {
                break;
            }
            w.iter_mut().for_each(|x| *x /= scale);
            let step = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = w;
            if step < TOL {
                residual = self.fp_residual(&v);
                if residual < 1e-9 {
                    return Ok(v);
                }
            }
        }
        if residual.is_infinite() {
            residual = self.fp_residual(&v);
        }
        Err(Error::NonConvergence {
            iterations: MAX_ITER,
            residual,
        })
    }

    /// max |d_x d_y - Σ_z N^z_{xy} d_z| relative to d_x d_y.
    pub fn fp_residual(&self, d: &[f64]) -> f64 {
        let r = self.rank();
        let mut worst: f64 = 0.0;
        for x in 0..r {
            for y in 0..r {
                let lhs = d[x] * d[y];
                let rhs: f64 = (0..r).map(|z| self.n(x, y, z) as f64 * d[z]).sum();
                worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
            }
        }
        worst
    }

    /// Deligne product of fusion rings; labels are "x⊠y" with index `x * rank(other) + y`.
    pub fn product(&self, other: &FusionRing) -> FusionRing {
        let (ra, rb) = (self.rank(), other.rank());
        let r = ra * rb;
        let mut labels = Vec::with_capacity(r);
        for a in &self.labels {
            for b in &other.labels {
                labels.push(join_labels(&[a, b]));
            }
        }
        let mut n = vec![0u64; r * r * r];
        for x in 0..r {
            for y in 0..r {
                for z in 0..r {
                    n[(x * r + y) * r + z] = self.n(x / rb, y / rb, z / rb) * other.n(x % rb, y % rb, z % rb);
                }
            }
        }
        let dual = (0..r)
            .map(|x| self.dual[x / rb] * rb + other.dual[x % rb])
            .collect();
        FusionRing {
            labels,
            unit: self.unit * rb + other.unit,
            dual,
            n,
        }
    }

    /// The group ring ℤ[ℤ/m] with labels "0".."m-1".
    pub fn cyclic_group_ring(m: usize) -> FusionRing {
        let labels = (0..m).map(|i| i.to_string()).collect();
        let mut n = vec![0u64; m * m * m];
        for x in 0..m {
            for y in 0..m {
                n[(x * m + y) * m + (x + y) % m] = 1;
            }
        }
        FusionRing {
            labels,
            unit: 0,
            dual: (0..m).map(|x| (m - x) % m).collect(),
            n,
        }
    }

    /// Nested-array view `N[x][y][z]`.
    pub fn nested(&self) -> Vec<Vec<Vec<u64>>> {
        let r = self.rank();
        (0..r)
            .map(|x| (0..r).map(|y| self.product_of(x, y)).collect())
            .collect()
    }

    /// Decomposition of `x ⊗ y` as "a·Z + b·W".
    pub fn format_product(&self, x: usize, y: usize) -> String {
        let terms: Vec<String> = (0..self.rank())
            .filter(|&z| self.n(x, y, z) > 0)
            .map(|z| match self.n(x, y, z) {
                1 => self.labels[z].clone(),
                k => format!("{k}{}", self.labels[z]),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FusionRingDoc {
    #[serde(default = "default_schema")]
    schema_version: u32,
    labels: Vec<String>,
    unit: usize,
    dual: Vec<usize>,
    #[serde(rename = "N")]
    n: Vec<Vec<Vec<u64>>>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn flatten_tensor(n: &[Vec<Vec<u64>>], r: usize) -> Result<Vec<u64>> {
    if n.len() != r || n.iter().any(|row| row.len() != r || row.iter().any(|c| c.len() != r)) {
        return Err(Error::Malformed(format!("N must be a {r}x{r}x{r} nested array")));
    }
    Ok(n.iter().flatten().flatten().copied().collect())
}

impl Serialize for FusionRing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FusionRingDoc {
            schema_version: SCHEMA_VERSION,
            labels: self.labels.clone(),
            unit: self.unit,
            dual: self.dual.clone(),
            n: self.nested(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FusionRing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = FusionRingDoc::deserialize(d)?;
        let r = doc.labels.len();
        let n = flatten_tensor(&doc.n, r).map_err(serde::de::Error::custom)?;
        FusionRing::new(doc.labels, doc.unit, doc.dual, n).map_err(serde::de::Error::custom)
    }
}

/// A fusion ring graded by a finite group, with the positive fusion
/// dimensions d⁺ attached to each label.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedFusionRing {
    group: FiniteGroup,
    grading: Vec<usize>,
    local_labels: Vec<String>,
    ring: FusionRing,
    fusion_dims: Vec<f64>,
    fp_dims: Vec<f64>,
}

impl GradedFusionRing {
    /// Assembles and verifies a graded ring. `sectors[g]` lists the labels of
    /// sector `g` (group element index); global label indices run through the
    /// sectors in group order. `n` is indexed by global labels.
    pub fn assemble(
        group: FiniteGroup,
        sectors: Vec<Vec<String>>,
        n: Vec<u64>,
        fusion_dims: Vec<f64>,
        tolerance: f64,
    ) -> Result<Self> {
        if sectors.len() != group.order() {
            return Err(Error::Malformed(format!(
                "{} sectors for a group of order {}",
                sectors.len(),
                group.order()
            )));
        }
        if let Some(g) = sectors.iter().position(|s| s.is_empty()) {
            return Err(Error::Degenerate(format!("sector '{}' is empty", group.name(g))));
        }
        let mut grading = Vec::new();
        let mut local_labels = Vec::new();
        let mut labels = Vec::new();
        for (g, sec) in sectors.iter().enumerate() {
            for l in sec {
                grading.push(g);
                local_labels.push(l.clone());
                labels.push(format!("({},{})", group.name(g), l));
            }
        }
        if fusion_dims.len() != labels.len() {
            return Err(Error::Malformed("one fusion dimension per label required".into()));
        }
        let ring = FusionRing::from_tensor(labels, n)?;
        let mut graded = GradedFusionRing {
            group,
            grading,
            local_labels,
            ring,
            fusion_dims,
            fp_dims: Vec::new(),
        };
        let violations = graded.verify(tolerance);
        if !violations.is_empty() {
            return Err(Error::Unverified(violations));
        }
        graded.fp_dims = graded.ring.fp_dims()?;
        Ok(graded)
    }

    /// Ring axioms of the underlying ring plus grading and d⁺ consistency.
    pub fn verify(&self, tolerance: f64) -> Vec<Violation> {
        let mut out = self.ring.verify();
        let r = self.ring.rank();
        let grp = &self.group;
        for x in 0..r {
            for y in 0..r {
                let gh = grp.mul(self.grading[x], self.grading[y]);
                for z in 0..r {
                    if self.grading[z] != gh && self.ring.n(x, y, z) != 0 {
                        out.push(Violation {
                            axiom: Axiom::Grading,
                            indices: vec![x, y, z],
                            detail: format!("N = {} outside sector {}", self.ring.n(x, y, z), grp.name(gh)),
                        });
                    }
                }
            }
        }
        let u = self.ring.unit();
        if self.grading[u] != grp.identity() {
            out.push(Violation {
                axiom: Axiom::Grading,
                indices: vec![u],
                detail: "unit is not in the trivial sector".into(),
            });
        }
        if (self.fusion_dims[u] - 1.0).abs() > tolerance {
            out.push(Violation {
                axiom: Axiom::FusionDimension,
                indices: vec![u],
                detail: format!("d+ of unit is {}", self.fusion_dims[u]),
            });
        }
        for x in 0..r {
            let xd = self.ring.dual(x);
            if self.grading[xd] != grp.inv(self.grading[x]) {
                out.push(Violation {
                    axiom: Axiom::Grading,
                    indices: vec![x, xd],
                    detail: "dual does not lie in the inverse sector".into(),
                });
            }
            if (self.fusion_dims[x] - self.fusion_dims[xd]).abs() > tolerance * self.fusion_dims[x].max(1.0) {
                out.push(Violation {
                    axiom: Axiom::FusionDimension,
                    indices: vec![x, xd],
                    detail: "d+ differs between a label and its dual".into(),
                });
            }
        }
        let res = self.dplus_residual();
        if res > tolerance {
            out.push(Violation {
                axiom: Axiom::FusionDimension,
                indices: vec![],
                detail: format!("d+ multiplicativity residual {res:.3e}"),
            });
        }
        out
    }

    /// max over x, y of |Σ_z N d⁺_z - d⁺_x d⁺_y| / (d⁺_x d⁺_y).
    pub fn dplus_residual(&self) -> f64 {
        let d = &self.fusion_dims;
        let r = self.ring.rank();
        let mut worst: f64 = 0.0;
        for x in 0..r {
            for y in 0..r {
                let lhs: f64 = (0..r).map(|z| self.ring.n(x, y, z) as f64 * d[z]).sum();
                let rhs = d[x] * d[y];
                worst = worst.max((lhs - rhs).abs() / rhs.max(1.0));
            }
        }
        worst
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn grading(&self) -> &[usize] {
        &self.grading
    }

    pub fn local_label(&self, x: usize) -> &str {
        &self.local_labels[x]
    }

    pub fn fusion_dims(&self) -> &[f64] {
        &self.fusion_dims
    }

    pub fn fp_dims(&self) -> &[f64] {
        &self.fp_dims
    }

    /// Global label indices of sector `g`, in order.
    pub fn sector(&self, g: usize) -> Vec<usize> {
        (0..self.ring.rank()).filter(|&x| self.grading[x] == g).collect()
    }

    pub fn sector_labels(&self, g: usize) -> Vec<String> {
        self.sector(g).into_iter().map(|x| self.local_labels[x].clone()).collect()
    }

    /// Global index of the label `local` in sector `g`.
    pub fn find(&self, g: usize, local: &str) -> Option<usize> {
        self.sector(g).into_iter().find(|&x| self.local_labels[x] == local)
    }

    /// Same group, same sector labels in the same order, same tensor.
    pub fn same_fusion_rules(&self, other: &GradedFusionRing) -> bool {
        self.group == other.group
            && self.grading == other.grading
            && self.local_labels == other.local_labels
            && self.ring.tensor() == other.ring.tensor()
    }

    /// Human-readable description of the first disagreement with `other`.
    pub fn first_difference(&self, other: &GradedFusionRing) -> Option<String> {
        if self.group != other.group {
            return Some("groups differ".into());
        }
        if self.grading != other.grading || self.local_labels != other.local_labels {
            return Some("sector labels differ".into());
        }
        let r = self.ring.rank();
        for x in 0..r {
            for y in 0..r {
                for z in 0..r {
                    let (a, b) = (self.ring.n(x, y, z), other.ring.n(x, y, z));
                    if a != b {
                        let l = self.ring.labels();
                        return Some(format!("N^{}_{{{},{}}}: {a} vs {b}", l[z], l[x], l[y]));
                    }
                }
            }
        }
        None
    }
}

#[derive(Serialize, Deserialize)]
struct SectorDoc {
    element: String,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct GradedDoc {
    #[serde(default = "default_schema")]
    schema_version: u32,
    group: FiniteGroup,
    sectors: Vec<SectorDoc>,
    labels: Vec<String>,
    unit: usize,
    dual: Vec<usize>,
    #[serde(rename = "N")]
    n: Vec<Vec<Vec<u64>>>,
    fusion_dims: Vec<f64>,
    fp_dims: Vec<f64>,
}

impl Serialize for GradedFusionRing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let sectors = (0..self.group.order())
            .map(|g| SectorDoc {
                element: self.group.name(g).to_string(),
                labels: self.sector_labels(g),
            })
            .collect();
        GradedDoc {
            schema_version: SCHEMA_VERSION,
            group: self.group.clone(),
            sectors,
            labels: self.ring.labels().to_vec(),
            unit: self.ring.unit(),
            dual: self.ring.duals().to_vec(),
            n: self.ring.nested(),
            fusion_dims: self.fusion_dims.clone(),
            fp_dims: self.fp_dims.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GradedFusionRing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = GradedDoc::deserialize(d)?;
        if doc.sectors.len() != doc.group.order() {
            return Err(D::Error::custom("one sector per group element required"));
        }
        let mut grading = Vec::new();
        let mut local_labels = Vec::new();
        for (g, s) in doc.sectors.iter().enumerate() {
            if s.element != doc.group.name(g) {
                return Err(D::Error::custom("sectors must follow group element order"));
            }
            for l in &s.labels {
                grading.push(g);
                local_labels.push(l.clone());
            }
        }
        let r = doc.labels.len();
        if grading.len() != r || doc.fusion_dims.len() != r || doc.fp_dims.len() != r {
            return Err(D::Error::custom("label counts disagree"));
        }
        let n = flatten_tensor(&doc.n, r).map_err(D::Error::custom)?;
        let ring = FusionRing::new(doc.labels, doc.unit, doc.dual, n).map_err(D::Error::custom)?;
        Ok(GradedFusionRing {
            group: doc.group,
            grading,
            local_labels,
            ring,
            fusion_dims: doc.fusion_dims,
            fp_dims: doc.fp_dims,
        })
    }
}

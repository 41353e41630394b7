//! Structure constants of the convolution (∗) and composition (∘) products on
//! the sectors V_g of a graded algebra.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::SCHEMA_VERSION;

/// Upper bound on the number of stored structure constants.
pub const MAX_CONSTANTS: usize = 1 << 26;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Random probes per associativity check; a trilinear identity failing anywhere
/// fails on a random triple with probability one.
const PROBES: usize = 3;

fn probe_rng(slot: usize, t: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(((slot as u64) << 8) | t as u64)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn mismatch(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    let size = a.iter().chain(b).map(|z| z.norm()).fold(1.0, f64::max);
    a.iter().zip(b).any(|(x, y)| (x - y).norm() > tol * size)
}

/// `conv[g]` is dense n_g³ with index (i·n + j)·n + k for b_i ∗ b_j ∋ b_k;
/// `comp[g·|G| + h]` is dense n_g·n_h·n_gh for b_i ∘ b_j ∋ b_k.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedAlgebraSpec {
    group: FiniteGroup,
    basis: Vec<Vec<String>>,
    conv: Vec<Vec<Complex64>>,
    comp: Vec<Vec<Complex64>>,
}

impl GradedAlgebraSpec {
    /// All-zero constants over the given per-sector bases.
    pub fn new(group: FiniteGroup, basis: Vec<Vec<String>>) -> Result<Self> {
        let m = group.order();
        if basis.len() != m {
            return Err(Error::Malformed(format!("{} sector bases for {m} group elements", basis.len())));
        }
        if let Some(g) = basis.iter().position(|b| b.is_empty()) {
            return Err(Error::InvalidSpec(format!("sector {} is zero-dimensional", group.name(g))));
        }
        let dims: Vec<usize> = basis.iter().map(|b| b.len()).collect();
        let mut total = 0usize;
        for g in 0..m {
            total = total.saturating_add(dims[g].saturating_pow(3));
            for h in 0..m {
                let gh = group.mul(g, h);
                total = total.saturating_add(dims[g] * dims[h] * dims[gh]);
            }
        }
        if total > MAX_CONSTANTS {
            return Err(Error::TooLarge(format!("{total} structure constants")));
        }
        let conv = dims.iter().map(|&n| vec![ZERO; n * n * n]).collect();
        let mut comp = Vec::with_capacity(m * m);
        for g in 0..m {
            for h in 0..m {
                comp.push(vec![ZERO; dims[g] * dims[h] * dims[group.mul(g, h)]]);
            }
        }
        Ok(GradedAlgebraSpec { group, basis, conv, comp })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self, g: usize) -> usize {
        self.basis[g].len()
    }

    pub fn basis(&self, g: usize) -> &[String] {
        &self.basis[g]
    }

    pub fn conv(&self, g: usize, i: usize, j: usize, k: usize) -> Complex64 {
        let n = self.dim(g);
        self.conv[g][(i * n + j) * n + k]
    }

    pub fn set_conv(&mut self, g: usize, i: usize, j: usize, k: usize, v: Complex64) {
        let n = self.dim(g);
        self.conv[g][(i * n + j) * n + k] = v;
    }

    fn comp_index(&self, g: usize, h: usize, i: usize, j: usize, k: usize) -> usize {
        let gh = self.group.mul(g, h);
        (i * self.dim(h) + j) * self.dim(gh) + k
    }

    pub fn comp(&self, g: usize, h: usize, i: usize, j: usize, k: usize) -> Complex64 {
        let idx = self.comp_index(g, h, i, j, k);
        self.comp[g * self.group.order() + h][idx]
    }

    pub fn set_comp(&mut self, g: usize, h: usize, i: usize, j: usize, k: usize, v: Complex64) {
        let idx = self.comp_index(g, h, i, j, k);
        let m = self.group.order();
        self.comp[g * m + h][idx] = v;
    }

    /// x ∗ y in V_g.
    pub fn conv_mul(&self, g: usize, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim(g);
        let t = &self.conv[g];
        let mut out = vec![ZERO; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == ZERO {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == ZERO {
                    continue;
                }
                let f = xi * yj;
                let row = &t[(i * n + j) * n..(i * n + j + 1) * n];
                for (o, &c) in out.iter_mut().zip(row) {
                    if c != ZERO {
                        *o += f * c;
                    }
                }
            }
        }
        out
    }

    /// x ∘ y in V_{gh} for x ∈ V_g, y ∈ V_h.
    pub fn comp_mul(&self, g: usize, h: usize, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        let gh = self.group.mul(g, h);
        let (nh, nk) = (self.dim(h), self.dim(gh));
        let t = &self.comp[g * self.group.order() + h];
        let mut out = vec![ZERO; nk];
        for (i, &xi) in x.iter().enumerate() {
            if xi == ZERO {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == ZERO {
                    continue;
                }
                let f = xi * yj;
                let row = &t[(i * nh + j) * nk..(i * nh + j + 1) * nk];
                for (o, &c) in out.iter_mut().zip(row) {
                    if c != ZERO {
                        *o += f * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of y ↦ x ∘ y from V_h to V_{gh}, for x ∈ V_g.
    pub fn comp_matrix(&self, g: usize, h: usize, x: &[Complex64]) -> DMatrix<Complex64> {
        let gh = self.group.mul(g, h);
        let (nh, nk) = (self.dim(h), self.dim(gh));
        let t = &self.comp[g * self.group.order() + h];
        let mut m = DMatrix::from_element(nk, nh, ZERO);
        for (i, &xi) in x.iter().enumerate() {
            if xi == ZERO {
                continue;
            }
            for j in 0..nh {
                let row = &t[(i * nh + j) * nk..(i * nh + j + 1) * nk];
                for (k, &c) in row.iter().enumerate() {
                    if c != ZERO {
                        m[(k, j)] += xi * c;
                    }
                }
            }
        }
        m
    }

    /// Matrix of y ↦ v ∗ y on V_g.
    pub fn conv_matrix(&self, g: usize, v: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.dim(g);
        let mut m = DMatrix::from_element(n, n, ZERO);
        for (i, &vi) in v.iter().enumerate() {
            if vi == ZERO {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    m[(k, j)] += vi * self.conv(g, i, j, k);
                }
            }
        }
        m
    }

    fn scale(&self) -> f64 {
        self.conv
            .iter()
            .chain(&self.comp)
            .flatten()
            .map(|c| c.norm())
            .fold(1.0, f64::max)
    }

    /// The two-sided ∘-unit of V_e, if there is one.
    pub fn comp_unit(&self, tol: f64) -> Option<Vec<Complex64>> {
        let e = self.group.identity();
        let n = self.dim(e);
        // rows (j,k) of Σ_i u_i comp[e][e][i][j][k] = δ_jk, then the right-unit rows
        let mut a = DMatrix::from_element(2 * n * n, n, ZERO);
        let mut b = DVector::from_element(2 * n * n, ZERO);
        for j in 0..n {
            for k in 0..n {
                let r = j * n + k;
                for i in 0..n {
                    a[(r, i)] = self.comp(e, e, i, j, k);
                    a[(n * n + r, i)] = self.comp(e, e, j, i, k);
                }
                if j == k {
                    b[r] = Complex64::new(1.0, 0.0);
                    b[n * n + r] = Complex64::new(1.0, 0.0);
                }
            }
        }
        let svd = a.clone().svd(true, true);
        let u = svd.solve(&b, 1e-12).ok()?;
        let res = (&a * &u - &b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        (res <= tol * self.scale()).then(|| u.iter().copied().collect())
    }

    /// Checks commutativity and associativity of ∗ in each sector,
    /// associativity of ∘ across sectors and the existence of a ∘-unit.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let m = self.group.order();
        let thr = tol * self.scale().powi(2);
        let name = |g: usize| self.group.name(g).to_string();
        for g in 0..m {
            let n = self.dim(g);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if (self.conv(g, i, j, k) - self.conv(g, j, i, k)).norm() > thr {
                            return Err(Error::InvalidSpec(format!(
                                "∗ is not commutative in sector {} at ({i}, {j})",
                                name(g)
                            )));
                        }
                    }
                }
            }
            let bad = (0..PROBES).find(|&t| {
                let mut rng = probe_rng(g, t);
                let (x, y, z) = (random_vec(&mut rng, n), random_vec(&mut rng, n), random_vec(&mut rng, n));
                let lhs = self.conv_mul(g, &self.conv_mul(g, &x, &y), &z);
                let rhs = self.conv_mul(g, &x, &self.conv_mul(g, &y, &z));
                mismatch(&lhs, &rhs, tol)
            });
            if bad.is_some() {
                return Err(Error::InvalidSpec(format!("∗ is not associative in sector {}", name(g))));
            }
        }
        let triples: Vec<(usize, usize, usize)> = (0..m)
            .flat_map(|g| (0..m).flat_map(move |h| (0..m).map(move |k| (g, h, k))))
            .collect();
        let bad = triples.par_iter().find_first(|&&(g, h, k)| {
            let gh = self.group.mul(g, h);
            let hk = self.group.mul(h, k);
            (0..PROBES).any(|t| {
                let mut rng = probe_rng((g * m + h) * m + k, t);
                let x = random_vec(&mut rng, self.dim(g));
                let y = random_vec(&mut rng, self.dim(h));
                let z = random_vec(&mut rng, self.dim(k));
                let lhs = self.comp_mul(gh, k, &self.comp_mul(g, h, &x, &y), &z);
                let rhs = self.comp_mul(g, hk, &x, &self.comp_mul(h, k, &y, &z));
                mismatch(&lhs, &rhs, tol)
            })
        });
        if let Some(&(g, h, k)) = bad {
            return Err(Error::InvalidSpec(format!(
                "∘ is not associative on sectors ({}, {}, {})",
                name(g),
                name(h),
                name(k)
            )));
        }
        if self.comp_unit(tol).is_none() {
            return Err(Error::InvalidSpec("the trivial sector has no ∘-unit".into()));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ConvEntry {
    g: String,
    i: usize,
    j: usize,
    k: usize,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct CompEntry {
    g: String,
    h: String,
    i: usize,
    j: usize,
    k: usize,
    re: f64,
    #[serde(default)]
    im: f64,
}

type Dense = Vec<Vec<Vec<[f64; 2]>>>;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ConvRepr {
    Sparse(Vec<ConvEntry>),
    Dense(BTreeMap<String, Dense>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CompRepr {
    Sparse(Vec<CompEntry>),
    Dense(BTreeMap<String, BTreeMap<String, Dense>>),
}

#[derive(Serialize, Deserialize)]
struct SpecDoc {
    #[serde(default = "schema")]
    schema_version: u32,
    group: FiniteGroup,
    sectors: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis: Option<BTreeMap<String, Vec<String>>>,
    conv: ConvRepr,
    comp: CompRepr,
}

fn schema() -> u32 {
    SCHEMA_VERSION
}

impl Serialize for GradedAlgebraSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = self.group.order();
        let name = |g: usize| self.group.name(g).to_string();
        let mut conv = Vec::new();
        for g in 0..m {
            let n = self.dim(g);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let v = self.conv(g, i, j, k);
                        if v != ZERO {
                            conv.push(ConvEntry { g: name(g), i, j, k, re: v.re, im: v.im });
                        }
                    }
                }
            }
        }
        let mut comp = Vec::new();
        for g in 0..m {
            for h in 0..m {
                let gh = self.group.mul(g, h);
                for i in 0..self.dim(g) {
                    for j in 0..self.dim(h) {
                        for k in 0..self.dim(gh) {
                            let v = self.comp(g, h, i, j, k);
                            if v != ZERO {
                                comp.push(CompEntry { g: name(g), h: name(h), i, j, k, re: v.re, im: v.im });
                            }
                        }
                    }
                }
            }
        }
        SpecDoc {
            schema_version: SCHEMA_VERSION,
            group: self.group.clone(),
            sectors: (0..m).map(|g| (name(g), self.dim(g))).collect(),
            basis: Some((0..m).map(|g| (name(g), self.basis[g].clone())).collect()),
            conv: ConvRepr::Sparse(conv),
            comp: CompRepr::Sparse(comp),
        }
        .serialize(s)
    }
}

impl TryFrom<SpecDoc> for GradedAlgebraSpec {
    type Error = Error;
    fn try_from(doc: SpecDoc) -> Result<Self> {
        let grp = doc.group;
        let m = grp.order();
        let lookup = |name: &str| {
            grp.index_of(name)
                .ok_or_else(|| Error::Malformed(format!("unknown group element '{name}'")))
        };
        let mut basis = vec![Vec::new(); m];
        for (name, &dim) in &doc.sectors {
            let g = lookup(name)?;
            basis[g] = match doc.basis.as_ref().and_then(|b| b.get(name)) {
                Some(labels) if labels.len() == dim => labels.clone(),
                Some(_) => return Err(Error::Malformed(format!("basis of sector '{name}' has the wrong size"))),
                None => (0..dim).map(|i| format!("b{i}")).collect(),
            };
        }
        let mut spec = GradedAlgebraSpec::new(grp.clone(), basis)?;
        let range = |what: &str, v: usize, n: usize| {
            if v < n {
                Ok(())
            } else {
                Err(Error::Malformed(format!("{what} index {v} out of range {n}")))
            }
        };
        let dense_dims = |t: &Dense, a: usize, b: usize, c: usize, what: &str| {
            if t.len() != a || t.iter().any(|r| r.len() != b || r.iter().any(|x| x.len() != c)) {
                Err(Error::Malformed(format!("dense {what} tensor must be {a}x{b}x{c}")))
            } else {
                Ok(())
            }
        };
        match doc.conv {
            ConvRepr::Sparse(entries) => {
                for e in entries {
                    let g = lookup(&e.g)?;
                    let n = spec.dim(g);
                    range("conv", e.i, n)?;
                    range("conv", e.j, n)?;
                    range("conv", e.k, n)?;
                    spec.set_conv(g, e.i, e.j, e.k, Complex64::new(e.re, e.im));
                }
            }
            ConvRepr::Dense(map) => {
                for (name, t) in map {
                    let g = lookup(&name)?;
                    let n = spec.dim(g);
                    dense_dims(&t, n, n, n, "conv")?;
                    for (i, row) in t.iter().enumerate() {
                        for (j, col) in row.iter().enumerate() {
                            for (k, v) in col.iter().enumerate() {
                                spec.set_conv(g, i, j, k, Complex64::new(v[0], v[1]));
                            }
                        }
                    }
                }
            }
        }
        match doc.comp {
            CompRepr::Sparse(entries) => {
                for e in entries {
                    let (g, h) = (lookup(&e.g)?, lookup(&e.h)?);
                    range("comp", e.i, spec.dim(g))?;
                    range("comp", e.j, spec.dim(h))?;
                    range("comp", e.k, spec.dim(grp.mul(g, h)))?;
                    spec.set_comp(g, h, e.i, e.j, e.k, Complex64::new(e.re, e.im));
                }
            }
            CompRepr::Dense(map) => {
                for (gname, inner) in map {
                    let g = lookup(&gname)?;
                    for (hname, t) in inner {
                        let h = lookup(&hname)?;
                        let (a, b, c) = (spec.dim(g), spec.dim(h), spec.dim(grp.mul(g, h)));
                        dense_dims(&t, a, b, c, "comp")?;
                        for (i, row) in t.iter().enumerate() {
                            for (j, col) in row.iter().enumerate() {
                                for (k, v) in col.iter().enumerate() {
                                    spec.set_comp(g, h, i, j, k, Complex64::new(v[0], v[1]));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(spec)
    }
}

impl<'de> Deserialize<'de> for GradedAlgebraSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = SpecDoc::deserialize(d)?;
        GradedAlgebraSpec::try_from(doc).map_err(serde::de::Error::custom)
    }
}

//! Modular data: unnormalized S-matrices, the Verlinde formula, genus-g fusion
//! coefficients, Deligne products and the built-in catalog.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{round_nonneg, Error, Result};
use crate::pointed::metric::{AbelianGroup, MetricGroup};
use crate::ring::{join_labels, FusionRing};
use crate::{DEFAULT_TOLERANCE, SCHEMA_VERSION};

/// Modular data in the unnormalized convention S_{𝟙,𝟙} = 1, S_{𝟙,X} = d_X.
/// The unit is label index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularData {
    labels: Vec<String>,
    s: DMatrix<Complex64>,
    ring: FusionRing,
    dims: Vec<Complex64>,
    global_dim: f64,
    tolerance: f64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl ModularData {
    /// Validates S (symmetry, S_{00} = 1, S² = dim·C) and derives the fusion
    /// ring by the Verlinde formula.
    pub fn new(labels: Vec<String>, s: DMatrix<Complex64>, tolerance: f64) -> Result<Self> {
        let r = labels.len();
        if r == 0 {
            return Err(Error::Degenerate("modular data of rank 0".into()));
        }
        if s.nrows() != r || s.ncols() != r {
            return Err(Error::Malformed(format!("S must be {r}x{r}")));
        }
        if !(tolerance > 0.0 && tolerance <= 1e-2) {
            return Err(Error::Malformed(format!("tolerance {tolerance} outside (0, 1e-2]")));
        }
        if (s[(0, 0)] - c(1.0)).norm() > tolerance {
            return Err(Error::Degenerate(format!("S_(1,1) = {} instead of 1", s[(0, 0)])));
        }
        let scale = s.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..r {
            for j in 0..i {
                if (s[(i, j)] - s[(j, i)]).norm() > tolerance * scale {
                    return Err(Error::Malformed(format!(
                        "S is not symmetric at ({}, {})",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        let dims: Vec<Complex64> = (0..r).map(|x| s[(0, x)]).collect();
        if let Some(x) = dims.iter().position(|d| d.norm() < tolerance) {
            return Err(Error::Degenerate(format!("d_{} = 0", labels[x])));
        }
        let dsum: Complex64 = dims.iter().map(|d| d * d).sum();
        if dsum.im.abs() > tolerance * dsum.norm() || dsum.re <= 0.0 {
            return Err(Error::Degenerate(format!("global dimension {dsum} is not positive")));
        }
        let global_dim = dsum.re;
        let s2 = &s * &s;
        let mut dual = vec![usize::MAX; r];
        for x in 0..r {
            for y in 0..r {
                let v = s2[(x, y)] / global_dim;
                if (v - c(1.0)).norm() <= tolerance {
                    if dual[x] != usize::MAX {
                        return Err(Error::Malformed("S² is not dim·C".into()));
                    }
                    dual[x] = y;
                } else if v.norm() > tolerance {
                    return Err(Error::Malformed(format!(
                        "S² is not dim·C: entry ({}, {}) is {}",
                        labels[x],
                        labels[y],
                        s2[(x, y)]
                    )));
                }
            }
            if dual[x] == usize::MAX {
                return Err(Error::Malformed(format!("S² gives no dual for {}", labels[x])));
            }
        }
        let n = verlinde_tensor(&labels, &s, &dual, global_dim, tolerance)?;
        let ring = FusionRing::new(labels.clone(), 0, dual, n)?;
        let violations = ring.verify();
        if !violations.is_empty() {
            return Err(Error::Unverified(violations));
        }
        Ok(ModularData {
            labels,
            s,
            ring,
            dims,
            global_dim,
            tolerance,
        })
    }

    pub fn from_real(labels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let r = labels.len();
        if rows.len() != r || rows.iter().any(|row| row.len() != r) {
            return Err(Error::Malformed(format!("S must be {r}x{r}")));
        }
        let s = DMatrix::from_fn(r, r, |i, j| c(rows[i][j]));
        ModularData::new(labels, s, DEFAULT_TOLERANCE)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn s(&self) -> &DMatrix<Complex64> {
        &self.s
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn dims(&self) -> &[Complex64] {
        &self.dims
    }

    /// Real parts of the dimensions d_X.
    pub fn real_dims(&self) -> Vec<f64> {
        self.dims.iter().map(|d| d.re).collect()
    }

    pub fn global_dim(&self) -> f64 {
        self.global_dim
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn dual(&self, x: usize) -> usize {
        self.ring.dual(x)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance <= 1e-2) {
            return Err(Error::Malformed(format!("tolerance {tolerance} outside (0, 1e-2]")));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Same data under new label names.
    pub fn relabel(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.rank() {
            return Err(Error::Malformed("relabel needs one name per label".into()));
        }
        self.ring = FusionRing::new(
            labels.clone(),
            0,
            self.ring.duals().to_vec(),
            self.ring.tensor().to_vec(),
        )?;
        self.labels = labels;
        Ok(self)
    }

    /// The unrounded sum dim^{g-1} Σ_Y Π S_{X_i,Y} / d_Y^{n+2g-2}.
    pub fn genus_value(&self, g: u32, insertions: &[usize]) -> Result<Complex64> {
        let r = self.rank();
        if let Some(&x) = insertions.iter().find(|&&x| x >= r) {
            return Err(Error::Malformed(format!("insertion index {x} out of range")));
        }
        let exp = insertions.len() as i32 + 2 * g as i32 - 2;
        let terms: Vec<Complex64> = (0..r)
            .into_par_iter()
            .map(|y| {
                let num: Complex64 = insertions.iter().map(|&x| self.s[(x, y)]).product();
                num * self.dims[y].powi(-exp)
            })
            .collect();
        let sum: Complex64 = terms.iter().sum();
        Ok(sum * self.global_dim.powi(g as i32 - 1))
    }

    /// Genus-g fusion coefficient with all insertions incoming.
    pub fn genus_coefficient(&self, g: u32, insertions: &[usize]) -> Result<u64> {
        let v = self.genus_value(g, insertions)?;
        round_nonneg(v, self.tolerance, "genus coefficient", || {
            let names: Vec<&str> = insertions.iter().map(|&x| self.labels[x].as_str()).collect();
            format!("g={g}, insertions [{}]", names.join(","))
        })
    }

    /// max over (Z, V, W) of the residual in
    /// (1/dim) Σ_{X,Y} N^Z_{XY} (d_V S_{X,V})(d_W S_{Y,W}) = δ_{V,W} d_V S_{Z,V}.
    pub fn convolution_basis_residual(&self) -> f64 {
        let r = self.rank();
        let d = &self.dims;
        let rows: Vec<f64> = (0..r)
            .into_par_iter()
            .map(|z| {
                let mut worst: f64 = 0.0;
                for v in 0..r {
                    for w in 0..r {
                        let mut acc = c(0.0);
                        for x in 0..r {
                            for y in 0..r {
                                let n = self.ring.n(x, y, z);
                                if n != 0 {
                                    acc += d[v] * self.s[(x, v)] * d[w] * self.s[(y, w)] * n as f64;
                                }
                            }
                        }
                        acc /= self.global_dim;
                        let want = if v == w { d[v] * self.s[(z, v)] } else { c(0.0) };
                        worst = worst.max((acc - want).norm());
                    }
                }
                worst
            })
            .collect();
        rows.into_iter().fold(0.0, f64::max)
    }

    /// max |S² − dim·C|.
    pub fn s_squared_residual(&self) -> f64 {
        let r = self.rank();
        let s2 = &self.s * &self.s;
        let mut worst: f64 = 0.0;
        for x in 0..r {
            for y in 0..r {
                let want = if y == self.dual(x) { self.global_dim } else { 0.0 };
                worst = worst.max((s2[(x, y)] - c(want)).norm());
            }
        }
        worst
    }

    /// Pointed modular data of a metric group, S_{a,b} = e^{-2πi χ_a(b)}.
    pub fn pointed(m: &MetricGroup) -> Result<Self> {
        let g = m.group();
        let r = m.order();
        let labels = (0..r).map(|a| g.name(a)).collect();
        let s = DMatrix::from_fn(r, r, |a, b| (-m.chi(a, b)).root_of_unity());
        ModularData::new(labels, s, DEFAULT_TOLERANCE)
    }
}

/// N^Z_{XY} = (1/dim) Σ_W S_{X,W} S_{Y,W} S_{dual Z,W} / S_{𝟙,W}, rounded.
pub fn verlinde_tensor(
    labels: &[String],
    s: &DMatrix<Complex64>,
    dual: &[usize],
    global_dim: f64,
    tolerance: f64,
) -> Result<Vec<u64>> {
    let r = labels.len();
    let blocks: Vec<Result<Vec<u64>>> = (0..r)
        .into_par_iter()
        .map(|x| {
            let mut out = vec![0u64; r * r];
            for y in 0..r {
                for z in 0..r {
                    let zb = dual[z];
                    let mut acc = c(0.0);
                    for w in 0..r {
                        acc += s[(x, w)] * s[(y, w)] * s[(zb, w)] / s[(0, w)];
                    }
                    acc /= global_dim;
                    out[y * r + z] = round_nonneg(acc, tolerance, "Verlinde formula", || {
                        format!("N^{}_{{{},{}}}", labels[z], labels[x], labels[y])
                    })?;
                }
            }
            Ok(out)
        })
        .collect();
    let mut n = Vec::with_capacity(r * r * r);
    for b in blocks {
        n.extend(b?);
    }
    Ok(n)
}

/// Recomputes the fusion ring of `md` from its S-matrix.
pub fn verlinde(md: &ModularData) -> Result<FusionRing> {
    let n = verlinde_tensor(
        &md.labels,
        &md.s,
        md.ring.duals(),
        md.global_dim,
        md.tolerance,
    )?;
    FusionRing::new(md.labels.clone(), 0, md.ring.duals().to_vec(), n)
}

/// Multiplicity vector of X_1 ⊗ … ⊗ X_n (the unit for an empty list).
pub fn tensor_vector(ring: &FusionRing, xs: &[usize]) -> Vec<u64> {
    let r = ring.rank();
    let mut v = vec![0u64; r];
    v[ring.unit()] = 1;
    for &x in xs {
        v = multiply_vector(ring, &v, x);
    }
    v
}

fn multiply_vector(ring: &FusionRing, v: &[u64], x: usize) -> Vec<u64> {
    let r = ring.rank();
    let mut w = vec![0u64; r];
    for (m, &vm) in v.iter().enumerate() {
        if vm == 0 {
            continue;
        }
        for (z, wz) in w.iter_mut().enumerate() {
            *wz += vm * ring.n(m, x, z);
        }
    }
    w
}

/// ^gN^{out}_{in} = Σ_{Z_0..Z_g} N^{Z_0..Z_g}_{in} N^{out}_{Z_0..Z_g}, by direct contraction.
pub fn genus_coefficient_bruteforce(ring: &FusionRing, g: u32, ins_in: &[usize], ins_out: &[usize]) -> u64 {
    let v_in = tensor_vector(ring, ins_in);
    let v_out = tensor_vector(ring, ins_out);
    let r = ring.rank();
    let dot = |a: &[u64], b: &[u64]| -> u64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    // depth-first over (Z_0, …, Z_g) carrying the partial tensor product
    fn walk(
        ring: &FusionRing,
        prefix: &[u64],
        remaining: u32,
        r: usize,
        leaf: &dyn Fn(&[u64]) -> u64,
    ) -> u64 {
        if remaining == 0 {
            return leaf(prefix);
        }
        (0..r)
            .map(|z| walk(ring, &multiply_vector(ring, prefix, z), remaining - 1, r, leaf))
            .sum()
    }
    let leaf = |vz: &[u64]| dot(&v_in, vz) * dot(vz, &v_out);
    walk(ring, &tensor_vector(ring, &[]), g + 1, r, &leaf)
}

/// Deligne product; with `reverse` the second factor's S is conjugated.
pub fn deligne_product(a: &ModularData, b: &ModularData, reverse: bool) -> Result<ModularData> {
    let (ra, rb) = (a.rank(), b.rank());
    let mut labels = Vec::with_capacity(ra * rb);
    for x in &a.labels {
        for y in &b.labels {
            labels.push(join_labels(&[x, y]));
        }
    }
    let s = DMatrix::from_fn(ra * rb, ra * rb, |i, j| {
        let sb = b.s[(i % rb, j % rb)];
        a.s[(i / rb, j / rb)] * if reverse { sb.conj() } else { sb }
    });
    ModularData::new(labels, s, a.tolerance.max(b.tolerance))
}

/// C^⊠n; the trivial category for n = 0.
pub fn deligne_power(md: &ModularData, n: u32) -> Result<ModularData> {
    let mut out = trivial();
    for _ in 0..n {
        out = if out.rank() == 1 {
            md.clone()
        } else {
            deligne_product(&out, md, false)?
        };
    }
    Ok(out)
}

pub fn trivial() -> ModularData {
    ModularData::from_real(vec!["𝟙".into()], &[vec![1.0]]).expect("trivial modular data")
}

pub fn fibonacci() -> ModularData {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    ModularData::from_real(vec!["𝟙".into(), "τ".into()], &[vec![1.0, phi], vec![phi, -1.0]])
        .expect("Fibonacci modular data")
}

pub fn ising() -> ModularData {
    let r2 = 2f64.sqrt();
    ModularData::from_real(
        vec!["𝟙".into(), "σ".into(), "ψ".into()],
        &[vec![1.0, r2, 1.0], vec![r2, 0.0, -r2], vec![1.0, -r2, 1.0]],
    )
    .expect("Ising modular data")
}

pub fn semion() -> ModularData {
    use crate::pointed::qz::Qz;
    let g = AbelianGroup::new(vec![2]).expect("ℤ/2");
    let m = MetricGroup::from_q(g, vec![Qz::ZERO, Qz::new(1, 4)]).expect("semion form");
    ModularData::pointed(&m)
        .and_then(|md| md.relabel(vec!["𝟙".into(), "s".into()]))
        .expect("semion modular data")
}

/// Drinfeld center of Vec(A) for A = ⊕ ℤ/n_i.
pub fn double(factors: &[u64]) -> Result<ModularData> {
    let a = AbelianGroup::new(factors.to_vec())?;
    let b = MetricGroup::hyperbolic(&a);
    if b.order() > 4096 {
        return Err(Error::TooLarge(format!("double of a group of order {}", a.order())));
    }
    ModularData::pointed(&b)
}

pub fn toric_code() -> ModularData {
    double(&[2])
        .and_then(|md| md.relabel(vec!["𝟙".into(), "e".into(), "m".into(), "f".into()]))
        .expect("toric code modular data")
}

/// Names accepted by [`catalog`], besides `double:<n1,n2,…>` and `<name>^<k>`.
pub const CATALOG_NAMES: &[&str] = &["trivial", "fibonacci", "ising", "semion", "toric-code"];

/// Representative catalog entries used for browsing and exhaustive tests.
pub fn catalog_entries() -> Vec<String> {
    let mut v: Vec<String> = CATALOG_NAMES.iter().map(|s| s.to_string()).collect();
    v.extend(["double:3", "double:2,2", "fibonacci^2", "ising^2"].map(String::from));
    v
}

/// Looks up a built-in category by name.
pub fn catalog(name: &str) -> Result<ModularData> {
    let name = name.trim();
    if let Some((base, k)) = name.rsplit_once('^') {
        let k: u32 = k
            .parse()
            .map_err(|_| Error::UnknownCategory(name.to_string()))?;
        let md = catalog(base)?;
        let rank = (md.rank() as u64).checked_pow(k);
        if rank.is_none_or(|r| r > 4096) {
            return Err(Error::TooLarge(format!("{name} has more than 4096 simples")));
        }
        return deligne_power(&md, k);
    }
    if let Some(f) = name.strip_prefix("double:") {
        let factors: std::result::Result<Vec<u64>, _> = f.split(',').map(|s| s.trim().parse()).collect();
        return match factors {
            Ok(v) if !v.is_empty() && v.iter().all(|&n| n > 0) => double(&v),
            _ => Err(Error::UnknownCategory(name.to_string())),
        };
    }
    match name {
        "trivial" => Ok(trivial()),
        "fibonacci" | "fib" => Ok(fibonacci()),
        "ising" => Ok(ising()),
        "semion" => Ok(semion()),
        "toric-code" | "toric_code" => Ok(toric_code()),
        _ => Err(Error::UnknownCategory(name.to_string())),
    }
}

#[derive(Serialize, Deserialize)]
struct ModularDoc {
    #[serde(default = "schema")]
    schema_version: u32,
    labels: Vec<String>,
    #[serde(rename = "S")]
    s: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
}

fn schema() -> u32 {
    SCHEMA_VERSION
}

impl Serialize for ModularData {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let r = self.rank();
        ModularDoc {
            schema_version: SCHEMA_VERSION,
            labels: self.labels.clone(),
            s: (0..r)
                .map(|i| (0..r).map(|j| [self.s[(i, j)].re, self.s[(i, j)].im]).collect())
                .collect(),
            tolerance: Some(self.tolerance),
        }
        .serialize(ser)
    }
}

impl ModularDoc {
    fn build(self) -> Result<ModularData> {
        let r = self.labels.len();
        if self.s.len() != r || self.s.iter().any(|row| row.len() != r) {
            return Err(Error::Malformed(format!("S must be {r}x{r}")));
        }
        let s = DMatrix::from_fn(r, r, |i, j| Complex64::new(self.s[i][j][0], self.s[i][j][1]));
        ModularData::new(self.labels, s, self.tolerance.unwrap_or(DEFAULT_TOLERANCE))
    }
}

impl ModularData {
    /// Parses a modular data document, keeping integrality and duality
    /// failures as typed errors rather than parse errors.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModularDoc = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        doc.build()
    }
}

impl<'de> Deserialize<'de> for ModularData {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        ModularDoc::deserialize(d)?.build().map_err(D::Error::custom)
    }
}

//! Fusion rules from minimal idempotents: composition coefficients, duals,
//! fusion dimensions and the rounded multiplicities.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::idempotents::{extract_idempotents, IdempotentBasis};
use super::spec::GradedAlgebraSpec;
use crate::error::{round_nonneg, Error, Result};
use crate::modular::ModularData;
use crate::ring::GradedFusionRing;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub x: String,
    pub y: String,
    pub z: String,
    pub re: f64,
    pub im: f64,
}

/// Result of the recovery algorithm, with the raw coefficients kept for audit.
#[derive(Debug, Clone)]
pub struct RecoveryOutput {
    pub graded: GradedFusionRing,
    /// Dense C^z_{xy} over global labels, index (x·r + y)·r + z.
    pub c_coeffs: Vec<Complex64>,
    pub dplus: Vec<f64>,
    /// Idempotents in the label order of `graded`.
    pub idempotents: IdempotentBasis,
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn columns(vs: &[Vec<Complex64>], n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, vs.len(), |i, j| vs[j][i])
}

fn quantize(x: f64) -> i64 {
    (x * 1e6).round() as i64
}

/// Runs the recovery algorithm on `spec` with idempotents extracted under `seed`.
pub fn recover_fusion(spec: &GradedAlgebraSpec, seed: u64, tol: f64) -> Result<RecoveryOutput> {
    spec.validate(tol)?;
    let idems = extract_idempotents(spec, seed)?;
    recover_with(spec, idems, tol)
}

/// Runs the recovery algorithm from a given complete set of idempotents.
pub fn recover_with(spec: &GradedAlgebraSpec, idems: IdempotentBasis, tol: f64) -> Result<RecoveryOutput> {
    let grp = spec.group();
    let m = grp.order();
    let e = grp.identity();
    let sizes: Vec<usize> = idems.sectors.iter().map(|s| s.len()).collect();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &n| {
            let o = *acc;
            *acc += n;
            Some(o)
        })
        .collect();
    let r: usize = sizes.iter().sum();
    let sector_of = |x: usize| (0..m).rev().find(|&g| offsets[g] <= x).expect("index in range");
    let vec_of = |x: usize| {
        let g = sector_of(x);
        &idems.sectors[g][x - offsets[g]]
    };

    let unit_hits: Vec<usize> = (0..sizes[e])
        .filter(|&i| {
            let u = &idems.sectors[e][i];
            let n = spec.dim(e);
            (0..n).all(|j| {
                let mut b = vec![Complex64::new(0.0, 0.0); n];
                b[j] = Complex64::new(1.0, 0.0);
                let l = spec.comp_mul(e, e, u, &b);
                let rr = spec.comp_mul(e, e, &b, u);
                l.iter().chain(&rr).zip(b.iter().chain(&b)).all(|(p, q)| (p - q).norm() <= tol)
            })
        })
        .collect();
    let unit = match unit_hits.as_slice() {
        [i] => offsets[e] + i,
        _ => return Err(Error::NoUnit),
    };

    // e_X ∘ e_Y = Σ_Z C e_Z, solved in the idempotent basis of the target sector
    let inverses: Vec<DMatrix<Complex64>> = (0..m)
        .map(|g| {
            let f = columns(&idems.sectors[g], spec.dim(g));
            f.try_inverse().ok_or_else(|| Error::NotSemisimple {
                sector: grp.name(g).to_string(),
                found: sizes[g],
                expected: spec.dim(g),
            })
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<(usize, usize, Complex64)>> = (0..r)
        .into_par_iter()
        .map(|x| {
            let g = sector_of(x);
            let ex = vec_of(x);
            let mut out = Vec::new();
            for h in 0..m {
                let gh = grp.mul(g, h);
                let mx = spec.comp_matrix(g, h, ex);
                let a = &inverses[gh] * (mx * columns(&idems.sectors[h], spec.dim(h)));
                for yi in 0..sizes[h] {
                    for zi in 0..sizes[gh] {
                        out.push((offsets[h] + yi, offsets[gh] + zi, a[(zi, yi)]));
                    }
                }
            }
            out
        })
        .collect();
    let mut c = vec![Complex64::new(0.0, 0.0); r * r * r];
    for (x, row) in rows.iter().enumerate() {
        for &(y, z, v) in row {
            c[(x * r + y) * r + z] = v;
        }
    }

    let mut dplus = vec![0.0; r];
    for x in 0..r {
        let ginv = grp.inv(sector_of(x));
        let cands: Vec<usize> = (offsets[ginv]..offsets[ginv] + sizes[ginv])
            .filter(|&y| {
                let v = c[(x * r + y) * r + unit];
                v.re > tol && v.im.abs() <= tol.max(1e-9 * v.norm())
            })
            .collect();
        match cands.as_slice() {
            [y] => dplus[x] = c[(x * r + y) * r + unit].re.sqrt(),
            _ => {
                return Err(Error::NoDual {
                    label: format!("idempotent {} of sector {}", x - offsets[sector_of(x)], grp.name(sector_of(x))),
                    detail: format!("{} candidates with positive coefficient at the unit", cands.len()),
                })
            }
        }
    }

    // canonical order: unit first, then by d⁺, then by rounded coordinates
    let mut order: Vec<Vec<usize>> = Vec::with_capacity(m);
    for g in 0..m {
        let mut idx: Vec<usize> = (offsets[g]..offsets[g] + sizes[g]).collect();
        idx.sort_by(|&a, &b| {
            (b == unit)
                .cmp(&(a == unit))
                .then(quantize(dplus[a]).cmp(&quantize(dplus[b])))
                .then_with(|| {
                    let (va, vb) = (vec_of(a), vec_of(b));
                    for (p, q) in va.iter().zip(vb) {
                        let o = quantize(p.re)
                            .cmp(&quantize(q.re))
                            .then(quantize(p.im).cmp(&quantize(q.im)));
                        if o != Ordering::Equal {
                            return o;
                        }
                    }
                    Ordering::Equal
                })
        });
        order.push(idx);
    }
    let perm: Vec<usize> = order.iter().flatten().copied().collect(); // new -> old
    let labels: Vec<Vec<String>> = (0..m).map(|g| (0..sizes[g]).map(|i| format!("e{i}")).collect()).collect();
    let result = finish(spec, &labels, &perm, &c, &dplus, tol)?;
    let sectors = order
        .iter()
        .map(|idx| idx.iter().map(|&x| vec_of(x).clone()).collect())
        .collect();
    Ok(RecoveryOutput {
        graded: result.0,
        c_coeffs: result.1,
        dplus: result.2,
        idempotents: IdempotentBasis {
            sectors,
            provenance: idems.provenance,
        },
    })
}

type Finished = (GradedFusionRing, Vec<Complex64>, Vec<f64>);

/// Permutes C and d⁺ by `perm` (new → old), rounds N and assembles the graded ring.
fn finish(
    spec: &GradedAlgebraSpec,
    labels: &[Vec<String>],
    perm: &[usize],
    c_old: &[Complex64],
    dplus_old: &[f64],
    tol: f64,
) -> Result<Finished> {
    let r = perm.len();
    let flat: Vec<&String> = labels.iter().flatten().collect();
    let dplus: Vec<f64> = perm.iter().map(|&p| dplus_old[p]).collect();
    let mut c = vec![Complex64::new(0.0, 0.0); r * r * r];
    let mut n = vec![0u64; r * r * r];
    for x in 0..r {
        for y in 0..r {
            for z in 0..r {
                let v = c_old[(perm[x] * r + perm[y]) * r + perm[z]];
                let i = (x * r + y) * r + z;
                c[i] = v;
                let val = v.norm() * dplus[z] / (dplus[x] * dplus[y]);
                n[i] = round_nonneg(Complex64::new(val, 0.0), tol, "fusion coefficient |C d+_Z / (d+_X d+_Y)|", || {
                    format!("(X, Y, Z) = ({}, {}, {})", flat[x], flat[y], flat[z])
                })?;
            }
        }
    }
    let graded = GradedFusionRing::assemble(spec.group().clone(), labels.to_vec(), n, dplus.clone(), tol)?;
    Ok((graded, c, dplus))
}

impl RecoveryOutput {
    /// Renames the recovered labels by matching idempotents against a reference basis
    /// whose sectors are labeled by `labels`.
    pub fn relabel(
        &self,
        spec: &GradedAlgebraSpec,
        reference: &IdempotentBasis,
        labels: &[Vec<String>],
        tol: f64,
    ) -> Result<RecoveryOutput> {
        let matching = self.idempotents.matching(reference, 1e-6)?;
        // new global index (reference order) -> old global index
        let mut perm = Vec::new();
        let mut offset = 0;
        for p in &matching {
            let mut inv = vec![0; p.len()];
            for (ours, &theirs) in p.iter().enumerate() {
                inv[theirs] = offset + ours;
            }
            perm.extend(inv);
            offset += p.len();
        }
        let (graded, c_coeffs, dplus) = finish(spec, labels, &perm, &self.c_coeffs, &self.dplus, tol)?;
        Ok(RecoveryOutput {
            graded,
            c_coeffs,
            dplus,
            idempotents: self.idempotents.reorder_to(reference, 1e-6)?,
        })
    }

    /// Nonzero C coefficients with global label names.
    pub fn coefficient_list(&self) -> Vec<Coefficient> {
        let labels = self.graded.ring().labels();
        let r = labels.len();
        let mut out = Vec::new();
        for x in 0..r {
            for y in 0..r {
                for z in 0..r {
                    let v = self.c_coeffs[(x * r + y) * r + z];
                    if v.norm() > 1e-12 {
                        out.push(Coefficient {
                            x: labels[x].clone(),
                            y: labels[y].clone(),
                            z: labels[z].clone(),
                            re: v.re,
                            im: v.im,
                        });
                    }
                }
            }
        }
        out
    }
}

/// For the trivial-group modular spec with idempotents ordered like the labels
/// of `md`: max residual of e_X ∘ e_Y = Σ_Z (d_X d_Y / d_Z) N^Z_{XY} e_Z.
pub fn composition_check(spec: &GradedAlgebraSpec, idems: &IdempotentBasis, md: &ModularData) -> f64 {
    let e = &idems.sectors[0];
    let d = md.dims();
    let ring = md.ring();
    let r = md.rank();
    let mut worst: f64 = 0.0;
    for x in 0..r {
        for y in 0..r {
            let lhs = spec.comp_mul(0, 0, &e[x], &e[y]);
            let mut rhs = vec![Complex64::new(0.0, 0.0); lhs.len()];
            for z in 0..r {
                let k = d[x] * d[y] / d[z] * ring.n(x, y, z) as f64;
                for (o, v) in rhs.iter_mut().zip(&e[z]) {
                    *o += k * v;
                }
            }
            let diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
            worst = worst.max(sup(&diff) / sup(&rhs).max(1.0));
        }
    }
    worst
}

//! Minimal convolution idempotents of each sector.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::GradedAlgebraSpec;
use crate::error::{Error, Result};

/// Relative gap below which two eigenvalues count as one cluster.
pub const CLUSTER_GAP: f64 = 1e-6;
/// Fresh random elements tried before giving up on a sector.
pub const RETRIES: usize = 8;
/// Accepted ‖e∗e′ − δe‖∞ relative to ‖e‖∞.
pub const IDEMPOTENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Extracted { seed: u64 },
}

/// Per-sector minimal idempotents in the coordinates of the sector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct IdempotentBasis {
    pub sectors: Vec<Vec<Vec<Complex64>>>,
    pub provenance: Provenance,
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn argmax(v: &[Complex64]) -> usize {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() {
            best = i;
        }
    }
    best
}

fn sector_rng(seed: u64, g: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (g as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Minimal idempotents of V_g from the eigenvectors of a random multiplication operator.
pub fn extract_sector(spec: &GradedAlgebraSpec, g: usize, seed: u64) -> Result<Vec<Vec<Complex64>>> {
    let n = spec.dim(g);
    let mut rng = sector_rng(seed, g);
    let mut found = 0;
    for _ in 0..RETRIES {
        let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        let m = spec.conv_matrix(g, &v);
        let (_, t) = m.clone().schur().unpack();
        let eig: Vec<Complex64> = t.diagonal().iter().copied().collect();
        let scale = sup(&eig);
        if scale == 0.0 {
            continue;
        }
        let separated = (0..n).all(|a| (0..a).all(|b| (eig[a] - eig[b]).norm() > CLUSTER_GAP * scale));
        if !separated {
            continue;
        }
        let mut idems = Vec::with_capacity(n);
        for &lambda in &eig {
            let mut shifted = m.clone();
            for i in 0..n {
                shifted[(i, i)] -= lambda;
            }
            let svd = shifted.svd(false, true);
            let vt = svd.v_t.expect("requested V^T");
            let row = (0..n)
                .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
                .expect("nonempty");
            let w: Vec<Complex64> = (0..n).map(|j| vt[(row, j)].conj()).collect();
            let ww = spec.conv_mul(g, &w, &w);
            let k = argmax(&w);
            let c = ww[k] / w[k];
            if c.norm() < CLUSTER_GAP * sup(&ww).max(1e-300) {
                // nilpotent direction
                break;
            }
            let mut e: Vec<Complex64> = w.iter().map(|z| z / c).collect();
            for _ in 0..3 {
                // e ← 3e² − 2e³ sharpens an approximate idempotent
                let e2 = spec.conv_mul(g, &e, &e);
                let e3 = spec.conv_mul(g, &e2, &e);
                e = e2.iter().zip(&e3).map(|(a, b)| a * 3.0 - b * 2.0).collect();
            }
            idems.push(e);
        }
        found = idems.len();
        if found == n && sector_residual(spec, g, &idems) < IDEMPOTENT_TOL {
            return Ok(idems);
        }
    }
    Err(Error::NotSemisimple {
        sector: spec.group().name(g).to_string(),
        found,
        expected: n,
    })
}

/// Minimal idempotents of every sector, extracted in parallel with per-sector seeded RNGs.
pub fn extract_idempotents(spec: &GradedAlgebraSpec, seed: u64) -> Result<IdempotentBasis> {
    let sectors: Result<Vec<_>> = (0..spec.group().order())
        .into_par_iter()
        .map(|g| extract_sector(spec, g, seed))
        .collect();
    Ok(IdempotentBasis {
        sectors: sectors?,
        provenance: Provenance::Extracted { seed },
    })
}

/// Largest of ‖e∗e′ − δe‖∞ / max(1, ‖e‖∞) and of the defect of Σe as ∗-unit on the basis.
pub fn sector_residual(spec: &GradedAlgebraSpec, g: usize, idems: &[Vec<Complex64>]) -> f64 {
    let n = spec.dim(g);
    let mut worst: f64 = 0.0;
    for (a, ea) in idems.iter().enumerate() {
        let norm = sup(ea).max(1.0);
        for (b, eb) in idems.iter().enumerate().skip(a) {
            let p = spec.conv_mul(g, ea, eb);
            let r = if a == b {
                p.iter().zip(ea).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
            } else {
                sup(&p)
            };
            worst = worst.max(r / norm);
        }
    }
    let unit: Vec<Complex64> = (0..n).map(|i| idems.iter().map(|e| e[i]).sum()).collect();
    for i in 0..n {
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        b[i] = Complex64::new(1.0, 0.0);
        let p = spec.conv_mul(g, &unit, &b);
        let r = p.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        worst = worst.max(r);
    }
    worst
}

impl IdempotentBasis {
    /// Absolute idempotency residual max ‖e∗e′ − δe‖∞ over all sectors.
    pub fn residual(&self, spec: &GradedAlgebraSpec) -> f64 {
        let mut worst: f64 = 0.0;
        for (g, idems) in self.sectors.iter().enumerate() {
            for (a, ea) in idems.iter().enumerate() {
                for (b, eb) in idems.iter().enumerate() {
                    let p = spec.conv_mul(g, ea, eb);
                    let r = if a == b {
                        p.iter().zip(ea).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
                    } else {
                        sup(&p)
                    };
                    worst = worst.max(r);
                }
            }
        }
        worst
    }

    /// perm[g][i] = index in `reference` of the idempotent matching our i-th one.
    pub fn matching(&self, reference: &IdempotentBasis, tol: f64) -> Result<Vec<Vec<usize>>> {
        if self.sectors.len() != reference.sectors.len() {
            return Err(Error::SelfConsistency {
                detail: "idempotent bases have different sector counts".into(),
                residual: f64::INFINITY,
            });
        }
        let mut out = Vec::with_capacity(self.sectors.len());
        for (g, (ours, theirs)) in self.sectors.iter().zip(&reference.sectors).enumerate() {
            if ours.len() != theirs.len() {
                return Err(Error::SelfConsistency {
                    detail: format!("sector {g}: {} idempotents vs {}", ours.len(), theirs.len()),
                    residual: f64::INFINITY,
                });
            }
            let mut used = vec![false; theirs.len()];
            let mut perm = Vec::with_capacity(ours.len());
            for e in ours {
                let norm = sup(e).max(1.0);
                let hit = theirs.iter().enumerate().find(|(j, f)| {
                    !used[*j] && e.iter().zip(*f).all(|(a, b)| (a - b).norm() <= tol * norm)
                });
                match hit {
                    Some((j, _)) => {
                        used[j] = true;
                        perm.push(j);
                    }
                    None => {
                        let best = theirs
                            .iter()
                            .map(|f| e.iter().zip(f).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
                            .fold(f64::INFINITY, f64::min);
                        return Err(Error::SelfConsistency {
                            detail: format!("sector {g}: an idempotent has no closed-form counterpart"),
                            residual: best,
                        });
                    }
                }
            }
            out.push(perm);
        }
        Ok(out)
    }

    /// Reorders each sector so that it lines up with `reference`.
    pub fn reorder_to(&self, reference: &IdempotentBasis, tol: f64) -> Result<IdempotentBasis> {
        let perm = self.matching(reference, tol)?;
        let sectors = self
            .sectors
            .iter()
            .zip(&perm)
            .map(|(idems, p)| {
                let mut v = vec![Vec::new(); idems.len()];
                for (i, &j) in p.iter().enumerate() {
                    v[j] = idems[i].clone();
                }
                v
            })
            .collect();
        Ok(IdempotentBasis {
            sectors,
            provenance: self.provenance,
        })
    }
}

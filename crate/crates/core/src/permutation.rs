//! Cyclic permutation extensions C≀ℤ/n of a modular category C.
//!
//! Sector g has co-order c(g) = gcd(g, n) and order o(g) = n / c(g); its
//! simples are labeled by c(g)-tuples of simples of C, stored in mixed radix
//! with the first slot most significant.

use std::collections::HashMap;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{recover_with, GradedAlgebraSpec, IdempotentBasis, Provenance};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::modular::ModularData;
use crate::ring::{join_labels, GradedFusionRing, BOXTIMES};

/// Default bound on rank(C)^{c(g)} for any single sector.
pub const DEFAULT_SECTOR_CAP: usize = 4096;
/// Bound on the number of entries of the output fusion tensor.
pub const MAX_TENSOR: usize = 1 << 24;

/// gcd(g, n), with gcd(0, n) = n.
pub fn co_order(g: usize, n: usize) -> usize {
    g.gcd(&n)
}

fn tuple(mut idx: usize, len: usize, r: usize) -> Vec<usize> {
    let mut t = vec![0; len];
    for slot in t.iter_mut().rev() {
        *slot = idx % r;
        idx /= r;
    }
    t
}

fn tuple_index(t: &[usize], r: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * r + x)
}

/// Sector sizes and labels for C≀ℤ/n, after the size checks.
struct Layout {
    n: usize,
    r: usize,
    co: Vec<usize>,
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl Layout {
    fn new(md: &ModularData, n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Malformed("n must be at least 1".into()));
        }
        let r = md.rank();
        let co: Vec<usize> = (0..n).map(|g| co_order(g, n)).collect();
        let mut sizes = Vec::with_capacity(n);
        for (g, &c) in co.iter().enumerate() {
            match r.checked_pow(c as u32).filter(|&s| s <= cap) {
                Some(s) => sizes.push(s),
                None => {
                    return Err(Error::TooLarge(format!(
                        "sector {g} has rank({r})^{c} simples, above the cap of {cap}"
                    )))
                }
            }
        }
        let total: usize = sizes.iter().sum();
        if total.checked_pow(3).is_none_or(|t| t > MAX_TENSOR) {
            return Err(Error::TooLarge(format!("{total} simples in total")));
        }
        let offsets = sizes
            .iter()
            .scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        Ok(Layout {
            n,
            r,
            co,
            sizes,
            offsets,
        })
    }

    fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    fn labels(&self, md: &ModularData) -> Vec<Vec<String>> {
        (0..self.n)
            .map(|g| {
                (0..self.sizes[g])
                    .map(|i| {
                        let t = tuple(i, self.co[g], self.r);
                        join_labels(&t.iter().map(|&x| md.labels()[x].as_str()).collect::<Vec<_>>())
                    })
                    .collect()
            })
            .collect()
    }

    /// Product of |d| over the slots of a c-tuple.
    fn dim(&self, md: &ModularData, t: &[usize]) -> f64 {
        let d = md.real_dims();
        t.iter().map(|&x| d[x].abs()).product()
    }

    fn dplus(&self, md: &ModularData) -> Vec<f64> {
        let big = md.global_dim();
        (0..self.n)
            .flat_map(|g| {
                let c = self.co[g];
                let scale = big.powf((self.n - c) as f64 / 2.0);
                (0..self.sizes[g]).map(move |i| (g, c, i, scale))
            })
            .map(|(_, c, i, scale)| self.dim(md, &tuple(i, c, self.r)) * scale)
            .collect()
    }
}

/// Genus k = (n − c(g) − c(h) − c(g+h)) / (2p) + 1 with p = gcd(c(g), c(h)),
/// after checking that the ratio is an even integer.
pub fn cyclic_genus(n: usize, g: usize, h: usize) -> Result<(usize, u32)> {
    let (cg, ch, ck) = (co_order(g, n), co_order(h, n), co_order((g + h) % n, n));
    let p = cg.gcd(&ch);
    let num = n as i64 - (cg + ch + ck) as i64;
    let violation = || Error::ParityViolation {
        n: n as u64,
        g: g as u64,
        h: h as u64,
        exponent: num / p as i64,
    };
    if num % (2 * p as i64) != 0 {
        return Err(violation());
    }
    let k = num / (2 * p as i64) + 1;
    if k < 0 {
        return Err(violation());
    }
    Ok((p, k as u32))
}

/// The slot-j insertions X'_j, Y'_j and dual Z'_j for the factorized genus sum.
fn slot_insertions(md: &ModularData, p: usize, x: &[usize], y: &[usize], z: &[usize], j: usize) -> Vec<usize> {
    let mut ins: Vec<usize> = x.iter().skip(j).step_by(p).copied().collect();
    ins.extend(y.iter().skip(j).step_by(p));
    ins.extend(z.iter().skip(j).step_by(p).map(|&w| md.dual(w)));
    ins
}

/// Unrounded N^{(g+h,Z)}_{(g,X),(h,Y)} as a product of genus sums of C over the p slots.
pub fn cyclic_coefficient_value(
    md: &ModularData,
    n: usize,
    (g, x): (usize, &[usize]),
    (h, y): (usize, &[usize]),
    z: &[usize],
) -> Result<Complex64> {
    let (p, k) = cyclic_genus(n, g, h)?;
    let expect = [co_order(g, n), co_order(h, n), co_order((g + h) % n, n)];
    if [x.len(), y.len(), z.len()] != expect {
        return Err(Error::Malformed(format!("tuple lengths must be {expect:?}")));
    }
    (0..p).try_fold(Complex64::new(1.0, 0.0), |acc, j| {
        Ok(acc * md.genus_value(k, &slot_insertions(md, p, x, y, z, j))?)
    })
}

/// Closed-form fusion rules of C≀ℤ/n with d⁺_{(g,X)} = |d_X| dim(C)^{(n−c(g))/2}.
pub fn cyclic_fusion(md: &ModularData, n: usize, cap: usize) -> Result<GradedFusionRing> {
    let lay = Layout::new(md, n, cap)?;
    let total = lay.total();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|g| (0..n).map(move |h| (g, h))).collect();
    let blocks: Vec<Vec<(usize, u64)>> = pairs
        .par_iter()
        .map(|&(g, h)| -> Result<Vec<(usize, u64)>> {
            let k = (g + h) % n;
            let (p, genus) = cyclic_genus(n, g, h)?;
            let (cg, ch, ck) = (lay.co[g], lay.co[h], lay.co[k]);
            let mut cache: HashMap<Vec<usize>, u64> = HashMap::new();
            let mut out = Vec::new();
            for xi in 0..lay.sizes[g] {
                let x = tuple(xi, cg, lay.r);
                for yi in 0..lay.sizes[h] {
                    let y = tuple(yi, ch, lay.r);
                    for zi in 0..lay.sizes[k] {
                        let z = tuple(zi, ck, lay.r);
                        let mut v = 1u64;
                        for j in 0..p {
                            let mut ins = slot_insertions(md, p, &x, &y, &z, j);
                            ins.sort_unstable();
                            let f = match cache.get(&ins) {
                                Some(&f) => f,
                                None => {
                                    let f = md.genus_coefficient(genus, &ins)?;
                                    cache.insert(ins, f);
                                    f
                                }
                            };
                            v *= f;
                            if v == 0 {
                                break;
                            }
                        }
                        if v > 0 {
                            let (a, b, c) = (lay.offsets[g] + xi, lay.offsets[h] + yi, lay.offsets[k] + zi);
                            out.push(((a * total + b) * total + c, v));
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut tensor = vec![0u64; total * total * total];
    for (i, v) in blocks.into_iter().flatten() {
        tensor[i] = v;
    }
    GradedFusionRing::assemble(
        FiniteGroup::cyclic(n),
        lay.labels(md),
        tensor,
        lay.dplus(md),
        md.tolerance(),
    )
}

/// f_{g,X} = Σ_Y (d_X dim(C)^{n−c(g)} / d_Y^{o(g)}) S_{X,Y} 1_Y over c(g)-tuples Y,
/// in label order of X.
pub fn permutation_idempotents(md: &ModularData, n: usize, g: usize, cap: usize) -> Result<Vec<Vec<Complex64>>> {
    let lay = Layout::new(md, n, cap)?;
    if g >= n {
        return Err(Error::Malformed(format!("sector {g} outside ℤ/{n}")));
    }
    Ok(sector_idempotents(md, &lay, g))
}

fn sector_idempotents(md: &ModularData, lay: &Layout, g: usize) -> Vec<Vec<Complex64>> {
    let c = lay.co[g];
    let o = (lay.n / c) as i32;
    let d = md.dims();
    let s = md.s();
    let scale = md.global_dim().powi((lay.n - c) as i32);
    (0..lay.sizes[g])
        .into_par_iter()
        .map(|xi| {
            let x = tuple(xi, c, lay.r);
            let dx: Complex64 = x.iter().map(|&a| d[a]).product();
            (0..lay.sizes[g])
                .map(|yi| {
                    let y = tuple(yi, c, lay.r);
                    let dy: Complex64 = y.iter().map(|&b| d[b]).product();
                    let sxy: Complex64 = x.iter().zip(&y).map(|(&a, &b)| s[(a, b)]).product();
                    dx * scale / dy.powi(o) * sxy
                })
                .collect()
        })
        .collect()
}

/// All f-idempotents as an [`IdempotentBasis`].
pub fn permutation_idempotent_basis(md: &ModularData, n: usize, cap: usize) -> Result<IdempotentBasis> {
    let lay = Layout::new(md, n, cap)?;
    Ok(IdempotentBasis {
        sectors: (0..n).map(|g| sector_idempotents(md, &lay, g)).collect(),
        provenance: Provenance::ClosedForm,
    })
}

/// Structure constants on the bases {1_Y : Y a c(g)-tuple}:
/// 1_U ∗ 1_V = dim(C)^{−n} Σ_W (d_U d_V / d_W)^{o(g)} N^W_{UV} 1_W (fusion in C^⊠c(g)), and
/// 1_X ∘ 1_Y = 1_R when X^{o(g)} = Y^{o(h)} as n-tuples, R its first c(g+h) slots.
///
/// The result is checked by running the recovery on the f-idempotents and
/// comparing with [`cyclic_fusion`].
pub fn permutation_spec(md: &ModularData, n: usize, cap: usize) -> Result<GradedAlgebraSpec> {
    let lay = Layout::new(md, n, cap)?;
    let group = FiniteGroup::cyclic(n);
    let mut spec = GradedAlgebraSpec::new(group, lay.labels(md))?;
    let d = md.dims();
    let ring = md.ring();
    let norm = md.global_dim().powi(-(n as i32));
    for g in 0..n {
        let c = lay.co[g];
        let o = (n / c) as i32;
        let size = lay.sizes[g];
        let rows: Vec<Vec<(usize, usize, Complex64)>> = (0..size)
            .into_par_iter()
            .map(|ui| {
                let u = tuple(ui, c, lay.r);
                let du: Complex64 = u.iter().map(|&a| d[a]).product();
                let mut out = Vec::new();
                for vi in 0..size {
                    let v = tuple(vi, c, lay.r);
                    let dv: Complex64 = v.iter().map(|&a| d[a]).product();
                    for wi in 0..size {
                        let w = tuple(wi, c, lay.r);
                        let mult: u64 = (0..c).map(|j| ring.n(u[j], v[j], w[j])).product();
                        if mult == 0 {
                            continue;
                        }
                        let dw: Complex64 = w.iter().map(|&a| d[a]).product();
                        out.push((vi, wi, (du * dv / dw).powi(o) * (norm * mult as f64)));
                    }
                }
                out
            })
            .collect();
        for (ui, row) in rows.into_iter().enumerate() {
            for (vi, wi, val) in row {
                spec.set_conv(g, ui, vi, wi, val);
            }
        }
    }
    let one = Complex64::new(1.0, 0.0);
    for g in 0..n {
        for h in 0..n {
            let k = (g + h) % n;
            let (cg, ch, ck) = (lay.co[g], lay.co[h], lay.co[k]);
            for xi in 0..lay.sizes[g] {
                let x = tuple(xi, cg, lay.r);
                // Y^{o(h)} = X^{o(g)} forces Y to be the first c(h) slots of X^{o(g)}
                let full: Vec<usize> = (0..n).map(|i| x[i % cg]).collect();
                let y = &full[..ch];
                if (0..n).any(|i| full[i] != y[i % ch]) {
                    continue;
                }
                let yi = tuple_index(y, lay.r);
                let zi = tuple_index(&full[..ck], lay.r);
                spec.set_comp(g, h, xi, yi, zi, one);
            }
        }
    }
    check_against_closed_form(md, &lay, &spec, cap)?;
    Ok(spec)
}

fn check_against_closed_form(md: &ModularData, lay: &Layout, spec: &GradedAlgebraSpec, cap: usize) -> Result<()> {
    let tol = md.tolerance();
    let closed = cyclic_fusion(md, lay.n, cap)?;
    let idems = IdempotentBasis {
        sectors: (0..lay.n).map(|g| sector_idempotents(md, lay, g)).collect(),
        provenance: Provenance::ClosedForm,
    };
    let residual = idems.residual(spec);
    let worst = idems.sectors.iter().flatten().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    if residual > tol * worst {
        return Err(Error::SelfConsistency {
            detail: "f-idempotents are not orthogonal idempotents of the convolution".into(),
            residual,
        });
    }
    let labels = lay.labels(md);
    let recovered = recover_with(spec, idems.clone(), tol)
        .and_then(|out| out.relabel(spec, &idems, &labels, tol))
        .map_err(|e| Error::SelfConsistency {
            detail: format!("recovery on the f-idempotents failed: {e}"),
            residual: f64::NAN,
        })?;
    if let Some(diff) = recovered.graded.first_difference(&closed) {
        return Err(Error::SelfConsistency {
            detail: format!("recovered fusion rules differ from the closed form: {diff}"),
            residual: f64::NAN,
        });
    }
    let dres = recovered
        .dplus
        .iter()
        .zip(closed.fusion_dims())
        .map(|(a, b)| (a - b).abs() / b.max(1.0))
        .fold(0.0, f64::max);
    if dres > tol {
        return Err(Error::SelfConsistency {
            detail: "recovered d⁺ differ from the closed form".into(),
            residual: dres,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityWitness {
    pub g: usize,
    pub h: usize,
    /// n − c(g) − c(h) − c(g+h)
    pub numerator: i64,
    /// gcd(c(g), c(h))
    pub divisor: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityReport {
    pub n: usize,
    pub pairs: usize,
    pub failures: Vec<ParityWitness>,
}

impl ParityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that (n − c(g) − c(h) − c(g+h)) / gcd(c(g), c(h)) is an even integer for all g, h.
pub fn parity_check(n: usize) -> ParityReport {
    let mut failures = Vec::new();
    for g in 0..n {
        for h in 0..n {
            let (cg, ch, ck) = (co_order(g, n), co_order(h, n), co_order((g + h) % n, n));
            let numerator = n as i64 - (cg + ch + ck) as i64;
            let divisor = cg.gcd(&ch) as i64;
            if numerator % (2 * divisor) != 0 {
                failures.push(ParityWitness {
                    g,
                    h,
                    numerator,
                    divisor,
                });
            }
        }
    }
    ParityReport {
        n,
        pairs: n * n,
        failures,
    }
}

/// Trivial-sector objects are written bare, e.g. "𝟙ττ𝟙"; others as "(g,X)".
fn compact(ring: &GradedFusionRing, x: usize) -> String {
    let g = ring.grading()[x];
    let word = ring.local_label(x).replace(BOXTIMES, "");
    if g == ring.group().identity() && ring.group().order() > 1 {
        word
    } else {
        format!("({},{word})", ring.group().name(g))
    }
}

/// One line per product, e.g. "(1,τ)(1,τ) = 3(2,𝟙𝟙)+4(2,𝟙τ)+4(2,τ𝟙)+7(2,ττ)".
pub fn product_lines(ring: &GradedFusionRing) -> Vec<String> {
    let fr = ring.ring();
    let r = fr.rank();
    let mut out = Vec::with_capacity(r * r);
    for x in 0..r {
        for y in 0..r {
            let terms: Vec<String> = (0..r)
                .filter(|&z| fr.n(x, y, z) > 0)
                .map(|z| match fr.n(x, y, z) {
                    1 => compact(ring, z),
                    k => format!("{k}{}", compact(ring, z)),
                })
                .collect();
            let rhs = if terms.is_empty() { "0".to_string() } else { terms.join("+") };
            out.push(format!("{}{} = {rhs}", compact(ring, x), compact(ring, y)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::{fibonacci, toric_code};

    fn find(r: &GradedFusionRing, g: usize, s: &str) -> usize {
        r.find(g, s).unwrap_or_else(|| panic!("no ({g},{s})"))
    }

    #[test]
    fn fib_order_four_generator_square() {
        let md = fibonacci();
        let r = cyclic_fusion(&md, 4, DEFAULT_SECTOR_CAP).unwrap();
        let t = find(&r, 1, "τ");
        let got: Vec<u64> = ["𝟙⊠𝟙", "𝟙⊠τ", "τ⊠𝟙", "τ⊠τ"]
            .iter()
            .map(|z| r.ring().n(t, t, find(&r, 2, z)))
            .collect();
        assert_eq!(got, vec![3, 4, 4, 7]);
    }

    #[test]
    fn unit_twists_give_genus_zero_counts() {
        // (g,𝟙)(−g,𝟙) contains (0, Z₁⊠…⊠Zₙ) with multiplicity N_{Z₁…Zₙ}
        let md = fibonacci();
        let r = cyclic_fusion(&md, 3, DEFAULT_SECTOR_CAP).unwrap();
        let a = find(&r, 1, "𝟙");
        let b = find(&r, 2, "𝟙");
        let z = find(&r, 0, "τ⊠τ⊠τ");
        assert_eq!(r.ring().n(a, b, z), md.genus_coefficient(0, &[1, 1, 1]).unwrap());
    }

    #[test]
    fn toric_order_two_idempotents() {
        let md = toric_code();
        let f = permutation_idempotents(&md, 2, 1, DEFAULT_SECTOR_CAP).unwrap();
        assert_eq!(f.len(), 4);
        let r = cyclic_fusion(&md, 2, DEFAULT_SECTOR_CAP).unwrap();
        for x in r.sector(1) {
            assert!((r.fusion_dims()[x] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spec_checks_out() {
        for md in [fibonacci(), toric_code()] {
            for n in 1..=3 {
                permutation_spec(&md, n, DEFAULT_SECTOR_CAP).unwrap();
            }
        }
    }

    #[test]
    fn parity_up_to_twelve() {
        for n in 1..=12 {
            let rep = parity_check(n);
            assert!(rep.passed(), "{rep:?}");
            assert_eq!(rep.pairs, n * n);
        }
    }

    #[test]
    fn sector_cap_enforced() {
        assert!(matches!(cyclic_fusion(&toric_code(), 4, 64), Err(Error::TooLarge(_))));
    }

    #[test]
    fn product_line_format() {
        let r = cyclic_fusion(&fibonacci(), 4, DEFAULT_SECTOR_CAP).unwrap();
        let lines = product_lines(&r);
        assert!(lines.contains(&"(1,τ)(1,τ) = 3(2,𝟙𝟙)+4(2,𝟙τ)+4(2,τ𝟙)+7(2,ττ)".to_string()));
        assert!(lines.contains(&"𝟙𝟙𝟙τ(1,𝟙) = (1,τ)".to_string()));
    }
}

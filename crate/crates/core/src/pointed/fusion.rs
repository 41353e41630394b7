//! Closed-form fusion rules of pointed extensions and the matching algebra spec.

use num_complex::Complex64;
use num_integer::{Integer, Roots};

use super::action::OrthogonalAction;
use super::metric::MetricGroup;
use super::qz::Qz;
use super::subgroup::{LagrangianSubgroup, Subgroup};
use crate::engine::{GradedAlgebraSpec, IdempotentBasis, Provenance};
use crate::error::{Error, Result};
use crate::ring::GradedFusionRing;

/// The subgroups L_g = L ∩ π(g)⁻¹(L) with their character tables.
pub struct PointedSectors<'a> {
    pub metric: &'a MetricGroup,
    pub lagrangian: &'a LagrangianSubgroup,
    pub action: &'a OrthogonalAction,
    pub sectors: Vec<Subgroup>,
    /// Exponent e of B; character values are stored as residues mod e.
    exp: i64,
    /// `tables[g][α][i]` = e·α(a_i) for the i-th element a_i of L_g.
    tables: Vec<Vec<Vec<i64>>>,
}

/// Coincidences α(π(h)c) + β(c) + χ_w(c) = γ(c) on K for one pair of sectors.
struct Rule {
    k: usize,
    kset: Vec<usize>,
    /// Flattened [α][β][γ].
    hits: Vec<bool>,
}

impl<'a> PointedSectors<'a> {
    pub fn new(metric: &'a MetricGroup, lagrangian: &'a LagrangianSubgroup, action: &'a OrthogonalAction) -> Result<Self> {
        let grp = action.group();
        let sectors = (0..grp.order())
            .map(|g| {
                let elems: Vec<usize> = lagrangian
                    .elements()
                    .iter()
                    .copied()
                    .filter(|&a| lagrangian.contains(action.act(g, a)))
                    .collect();
                Subgroup::new(metric.group(), &elems)
            })
            .collect::<Result<Vec<_>>>()?;
        let exp = metric.group().factors().iter().fold(1i64, |acc, &f| acc.lcm(&(f as i64)));
        let tables = sectors
            .iter()
            .map(|s| {
                (0..s.character_count())
                    .map(|al| s.elements().iter().map(|&a| residue(s.eval(al, a), exp)).collect())
                    .collect()
            })
            .collect();
        Ok(PointedSectors {
            metric,
            lagrangian,
            action,
            sectors,
            exp,
            tables,
        })
    }

    /// |A| = |L|.
    pub fn a_order(&self) -> usize {
        self.lagrangian.order()
    }

    pub fn labels(&self) -> Vec<Vec<String>> {
        self.sectors
            .iter()
            .map(|s| (0..s.character_count()).map(|k| s.character_name(k)).collect())
            .collect()
    }

    /// K = {c ∈ L_h : π(h)(c) ∈ L_g}.
    pub fn overlap(&self, g: usize, h: usize) -> Vec<usize> {
        self.sectors[h]
            .elements()
            .iter()
            .copied()
            .filter(|&c| self.sectors[g].contains(self.action.act(h, c)))
            .collect()
    }

    /// Twist ω_{h⁻¹, g⁻¹} entering products of sector g with sector h.
    pub fn twist(&self, g: usize, h: usize) -> usize {
        let grp = self.action.group();
        self.action.omega(grp.inv(h), grp.inv(g))
    }

    fn rule(&self, g: usize, h: usize) -> Rule {
        let k = self.action.group().mul(g, h);
        let kset = self.overlap(g, h);
        let w = self.twist(g, h);
        let pos = |s: usize, x: usize| self.sectors[s].position(x).expect("element of the sector");
        let pg: Vec<usize> = kset.iter().map(|&c| pos(g, self.action.act(h, c))).collect();
        let ph: Vec<usize> = kset.iter().map(|&c| pos(h, c)).collect();
        let pk: Vec<usize> = kset.iter().map(|&c| pos(k, c)).collect();
        let tw: Vec<i64> = kset.iter().map(|&c| residue(self.metric.chi(w, c), self.exp)).collect();
        let (tg, th, tk) = (&self.tables[g], &self.tables[h], &self.tables[k]);
        let mut hits = Vec::with_capacity(tg.len() * th.len() * tk.len());
        let mut f = vec![0i64; kset.len()];
        for ta in tg {
            for tb in th {
                for (i, v) in f.iter_mut().enumerate() {
                    *v = (ta[pg[i]] + tb[ph[i]] + tw[i]) % self.exp;
                }
                hits.extend(tk.iter().map(|tc| pk.iter().zip(&f).all(|(&p, &v)| tc[p] == v)));
            }
        }
        Rule { k, kset, hits }
    }
}

fn residue(q: Qz, exp: i64) -> i64 {
    debug_assert_eq!(exp % q.denom(), 0, "value outside (1/e)ℤ/ℤ");
    q.numer() * (exp / q.denom())
}

/// Exact integer square root of num/den, if there is one.
fn exact_sqrt_ratio(num: u128, den: u128) -> Option<u64> {
    if den == 0 || num % den != 0 {
        return None;
    }
    let q = num / den;
    let s = q.sqrt();
    (s * s == q).then_some(s as u64)
}

/// Fusion rules of the pointed extension: for α ∈ L̂_g, β ∈ L̂_h, γ ∈ L̂_{gh},
/// N = δ[α(π(h)c) + β(c) + χ_{ω_{h⁻¹,g⁻¹}}(c) = γ(c) on K] · √(|K|²|A| / (|L_g||L_h||L_{gh}|)).
pub fn pointed_fusion(
    metric: &MetricGroup,
    lagrangian: &LagrangianSubgroup,
    action: &OrthogonalAction,
    tol: f64,
) -> Result<GradedFusionRing> {
    let ps = PointedSectors::new(metric, lagrangian, action)?;
    let grp = action.group();
    let m = grp.order();
    let sizes: Vec<usize> = ps.sectors.iter().map(|s| s.order()).collect();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |a, &n| {
            let o = *a;
            *a += n;
            Some(o)
        })
        .collect();
    let r: usize = sizes.iter().sum();
    let a_ord = ps.a_order() as u128;
    let mut n = vec![0u64; r * r * r];
    for g in 0..m {
        for h in 0..m {
            let rule = ps.rule(g, h);
            let k = rule.k;
            let num = (rule.kset.len() as u128).pow(2) * a_ord;
            let den = (sizes[g] * sizes[h] * sizes[k]) as u128;
            let mult = exact_sqrt_ratio(num, den).ok_or_else(|| Error::NotIntegral {
                formula: "pointed multiplicity √(|K|²|A|/(|L_g||L_h||L_gh|))",
                indices: format!("(g, h) = ({}, {})", grp.name(g), grp.name(h)),
                re: (num as f64 / den as f64).sqrt(),
                im: 0.0,
                tolerance: 0.0,
            })?;
            let mut it = rule.hits.iter();
            for al in 0..sizes[g] {
                for be in 0..sizes[h] {
                    for ga in 0..sizes[k] {
                        if *it.next().expect("rule covers all triples") {
                            let (x, y, z) = (offsets[g] + al, offsets[h] + be, offsets[k] + ga);
                            n[(x * r + y) * r + z] = mult;
                        }
                    }
                }
            }
        }
    }
    let dplus: Vec<f64> = (0..m)
        .flat_map(|g| {
            let d = (a_ord as f64 / sizes[g] as f64).sqrt();
            std::iter::repeat_n(d, sizes[g])
        })
        .collect();
    GradedFusionRing::assemble(grp.clone(), ps.labels(), n, dplus, tol)
}

/// e_α = (|A|/|L_g|) Σ_{a ∈ L_g} α(a) 1_a, in character order.
pub fn pointed_idempotents(
    metric: &MetricGroup,
    lagrangian: &LagrangianSubgroup,
    action: &OrthogonalAction,
) -> Result<IdempotentBasis> {
    let ps = PointedSectors::new(metric, lagrangian, action)?;
    Ok(closed_idempotents(&ps))
}

fn closed_idempotents(ps: &PointedSectors) -> IdempotentBasis {
    let a_ord = ps.a_order() as f64;
    let sectors = ps
        .sectors
        .iter()
        .zip(&ps.tables)
        .map(|(s, table)| {
            let k = a_ord / s.order() as f64;
            table
                .iter()
                .map(|row| row.iter().map(|&v| Qz::new(v, ps.exp).root_of_unity() * k).collect())
                .collect()
        })
        .collect();
    IdempotentBasis {
        sectors,
        provenance: Provenance::ClosedForm,
    }
}

/// Structure constants on the bases {1_a : a ∈ L_g}:
/// 1_a ∗ 1_b = (1/|A|) 1_{a+b}, and for d ∈ L_g, c ∈ L_h
/// 1_d ∘ 1_c = δ_{d, π(h)c} e^{2πi χ_{ω_{h⁻¹,g⁻¹}}(c)} 1_c in V_{gh}.
pub fn pointed_spec(
    metric: &MetricGroup,
    lagrangian: &LagrangianSubgroup,
    action: &OrthogonalAction,
    tol: f64,
) -> Result<GradedAlgebraSpec> {
    let ps = PointedSectors::new(metric, lagrangian, action)?;
    let grp = action.group();
    let m = grp.order();
    let b = metric.group();
    let basis = ps
        .sectors
        .iter()
        .map(|s| s.elements().iter().map(|&a| b.name(a)).collect())
        .collect();
    let mut spec = GradedAlgebraSpec::new(grp.clone(), basis)?;
    let inv_a = Complex64::new(1.0 / ps.a_order() as f64, 0.0);
    for (g, s) in ps.sectors.iter().enumerate() {
        for (i, &x) in s.elements().iter().enumerate() {
            for (j, &y) in s.elements().iter().enumerate() {
                let k = s.position(b.add(x, y)).expect("subgroup is closed");
                spec.set_conv(g, i, j, k, inv_a);
            }
        }
    }
    for g in 0..m {
        for h in 0..m {
            let k = grp.mul(g, h);
            let w = ps.twist(g, h);
            for &c in &ps.overlap(g, h) {
                let i = ps.sectors[g].position(action.act(h, c)).expect("c in K");
                let j = ps.sectors[h].position(c).expect("c in L_h");
                let kk = ps.sectors[k].position(c).expect("K lies in L_gh");
                spec.set_comp(g, h, i, j, kk, metric.chi(w, c).root_of_unity());
            }
        }
    }
    validate_against_proof(&spec, &ps, tol)?;
    Ok(spec)
}

/// Checks (e_α ∘ e_β) ∗ e_γ = δ·(|K||A|/(|L_g||L_h|)) e_γ for the closed-form idempotents.
fn validate_against_proof(spec: &GradedAlgebraSpec, ps: &PointedSectors, tol: f64) -> Result<()> {
    let grp = spec.group();
    let idems = closed_idempotents(ps);
    let a_ord = ps.a_order() as f64;
    let mut worst: f64 = 0.0;
    let mut where_ = String::new();
    for g in 0..grp.order() {
        for h in 0..grp.order() {
            let rule = ps.rule(g, h);
            let k = rule.k;
            let scale = rule.kset.len() as f64 * a_ord / (ps.sectors[g].order() * ps.sectors[h].order()) as f64;
            let mut it = rule.hits.iter();
            for (al, ea) in idems.sectors[g].iter().enumerate() {
                for (be, eb) in idems.sectors[h].iter().enumerate() {
                    let p = spec.comp_mul(g, h, ea, eb);
                    for (ga, ec) in idems.sectors[k].iter().enumerate() {
                        let q = spec.conv_mul(k, &p, ec);
                        let want = if *it.next().expect("rule covers all triples") { scale } else { 0.0 };
                        let res = q
                            .iter()
                            .zip(ec)
                            .map(|(x, y)| (x - y * want).norm())
                            .fold(0.0, f64::max);
                        if res > worst {
                            worst = res;
                            where_ = format!("sectors ({}, {}), characters ({al}, {be}, {ga})", grp.name(g), grp.name(h));
                        }
                    }
                }
            }
        }
    }
    if worst > tol {
        return Err(Error::SelfConsistency {
            detail: where_,
            residual: worst,
        });
    }
    Ok(())
}

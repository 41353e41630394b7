//! Subgroups of a finite abelian group with a canonical cyclic decomposition,
//! their character groups, and Lagrangian subgroups of metric groups.

use std::collections::HashMap;

use super::metric::{AbelianGroup, MetricGroup};
use super::qz::Qz;
use super::snf::smith;
use crate::error::{Error, Result};

const MAX_BOX: usize = 1 << 20;

/// A subgroup S ≅ ⊕ ℤ/d_j with generators t_j and coordinates of every element.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgroup {
    elements: Vec<usize>,
    gens: Vec<usize>,
    orders: Vec<u64>,
    coords: HashMap<usize, Vec<u64>>,
}

impl Subgroup {
    /// Decomposes the subgroup with the given elements (which must be closed).
    pub fn new(ambient: &AbelianGroup, elements: &[usize]) -> Result<Self> {
        let mut elements = elements.to_vec();
        elements.sort_unstable();
        elements.dedup();
        if elements.first() != Some(&0) {
            return Err(Error::Malformed("subgroup must contain 0".into()));
        }
        let mut raw_gens = Vec::new();
        let mut span = vec![0usize];
        for &x in &elements {
            if span.binary_search(&x).is_err() {
                raw_gens.push(x);
                span = ambient.span(&raw_gens);
            }
        }
        if span != elements {
            return Err(Error::Malformed("element list is not closed under addition".into()));
        }
        let ords: Vec<u64> = raw_gens.iter().map(|&g| ambient.order_of(g)).collect();
        let box_size = ords.iter().try_fold(1usize, |acc, &o| acc.checked_mul(o as usize));
        if box_size.is_none_or(|b| b > MAX_BOX) {
            return Err(Error::TooLarge("subgroup presentation".into()));
        }
        let r = raw_gens.len();
        // enumerate coefficient vectors; kernel rows and one preimage per element
        let mut relations: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| if i == j { ords[i] as i64 } else { 0 }).collect())
            .collect();
        let mut preimage: HashMap<usize, Vec<i64>> = HashMap::new();
        for mut idx in 0..box_size.unwrap_or(1) {
            let mut c = vec![0i64; r];
            for (slot, &o) in c.iter_mut().zip(&ords).rev() {
                *slot = (idx % o as usize) as i64;
                idx /= o as usize;
            }
            let x = (0..r).fold(0usize, |acc, i| ambient.add(acc, ambient.scale(raw_gens[i], c[i])));
            if x == 0 && c.iter().any(|&v| v != 0) {
                relations.push(c.clone());
            }
            preimage.entry(x).or_insert(c);
        }
        let s = smith(&relations, r);
        let keep: Vec<usize> = (0..r).filter(|&j| s.diag[j] > 1).collect();
        let orders: Vec<u64> = keep.iter().map(|&j| s.diag[j] as u64).collect();
        let gens: Vec<usize> = keep
            .iter()
            .map(|&j| {
                (0..r).fold(0usize, |acc, i| ambient.add(acc, ambient.scale(raw_gens[i], s.v_inv[j][i])))
            })
            .collect();
        let coords = preimage
            .into_iter()
            .map(|(x, cv)| {
                let y = keep
                    .iter()
                    .map(|&j| {
                        let v: i64 = (0..r).map(|i| cv[i] * s.v[i][j]).sum();
                        v.rem_euclid(s.diag[j]) as u64
                    })
                    .collect();
                (x, y)
            })
            .collect();
        Ok(Subgroup {
            elements,
            gens,
            orders,
            coords,
        })
    }

    pub fn generated(ambient: &AbelianGroup, gens: &[usize]) -> Result<Self> {
        Subgroup::new(ambient, &ambient.span(gens))
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Position of `x` in the sorted element list.
    pub fn position(&self, x: usize) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    /// Invariant factors d_1 | d_2 | … of the decomposition (all > 1).
    pub fn invariant_factors(&self) -> &[u64] {
        &self.orders
    }

    pub fn coordinates(&self, x: usize) -> Option<&[u64]> {
        self.coords.get(&x).map(|v| v.as_slice())
    }

    /// Number of characters, equal to the order.
    pub fn character_count(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    /// Exponent vector k of the character with index `idx` (mixed radix over the factors).
    pub fn character(&self, mut idx: usize) -> Vec<u64> {
        let mut k = vec![0; self.orders.len()];
        for (slot, &d) in k.iter_mut().zip(&self.orders).rev() {
            *slot = (idx % d as usize) as u64;
            idx /= d as usize;
        }
        k
    }

    pub fn character_name(&self, idx: usize) -> String {
        let k = self.character(idx);
        if k.is_empty() {
            return "0".into();
        }
        k.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(".")
    }

    /// α_idx(x) = Σ k_j y_j / d_j for x with coordinates y.
    pub fn eval(&self, idx: usize, x: usize) -> Qz {
        let k = self.character(idx);
        let y = &self.coords[&x];
        k.iter()
            .zip(y)
            .zip(&self.orders)
            .map(|((&a, &b), &d)| Qz::new(((a * b) % d) as i64, d as i64))
            .sum()
    }

    /// Index of the character agreeing with `f` on this subgroup, if `f` is one.
    pub fn character_of(&self, f: impl Fn(usize) -> Qz) -> Option<usize> {
        let mut idx = 0usize;
        for (&t, &d) in self.gens.iter().zip(&self.orders) {
            let v = f(t) * d as i64;
            if !v.is_zero() {
                return None;
            }
            let k = (f(t).numer() * d as i64 / f(t).denom()).rem_euclid(d as i64);
            idx = idx * d as usize + k as usize;
        }
        self.elements.iter().all(|&x| self.eval(idx, x) == f(x)).then_some(idx)
    }
}

/// A subgroup L with |L|² = |B| on which q vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianSubgroup {
    sub: Subgroup,
}

impl LagrangianSubgroup {
    pub fn new(metric: &MetricGroup, elements: &[usize]) -> Result<Self> {
        let sub = Subgroup::new(metric.group(), elements)
            .map_err(|e| Error::NotLagrangian(e.to_string()))?;
        if sub.order() * sub.order() != metric.order() {
            return Err(Error::NotLagrangian(format!(
                "|L|² = {} but |B| = {}",
                sub.order() * sub.order(),
                metric.order()
            )));
        }
        if let Some(&x) = sub.elements().iter().find(|&&x| !metric.q(x).is_zero()) {
            return Err(Error::NotLagrangian(format!(
                "q({}) = {} is not 0",
                metric.group().name(x),
                metric.q(x)
            )));
        }
        Ok(LagrangianSubgroup { sub })
    }

    pub fn generated(metric: &MetricGroup, gens: &[usize]) -> Result<Self> {
        LagrangianSubgroup::new(metric, &metric.group().span(gens))
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.sub
    }

    pub fn elements(&self) -> &[usize] {
        self.sub.elements()
    }

    pub fn order(&self) -> usize {
        self.sub.order()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.sub.contains(x)
    }
}

/// L_{H,b} = {(φ, h) ∈ Â×A : φ|_H = b(h, ·)} inside the hyperbolic group of `a`.
///
/// `h_gens` are elements of A (indices in `a`); `beta[i][j] = b(h_i, h_j)`.
pub fn lagrangian_from_pair(
    a: &AbelianGroup,
    h_gens: &[usize],
    beta: &[Vec<Qz>],
) -> Result<(MetricGroup, LagrangianSubgroup)> {
    let m = h_gens.len();
    if beta.len() != m || beta.iter().any(|row| row.len() != m) {
        return Err(Error::Malformed(format!("b must be {m}x{m}")));
    }
    if h_gens.iter().any(|&h| h >= a.order()) {
        return Err(Error::Malformed("generator of H is not an element of A".into()));
    }
    let h_elems = a.span(h_gens);
    // b(h, ·) on generators; h is expressed through a coefficient vector over h_gens
    let ords: Vec<u64> = h_gens.iter().map(|&h| a.order_of(h)).collect();
    let mut rep: HashMap<usize, Vec<Qz>> = HashMap::new();
    let total: usize = ords.iter().product::<u64>() as usize;
    for mut idx in 0..total.max(1) {
        let mut coeff = vec![0u64; m];
        for (slot, &o) in coeff.iter_mut().zip(&ords).rev() {
            *slot = (idx % o as usize) as u64;
            idx /= o as usize;
        }
        let h = (0..m).fold(0usize, |acc, i| a.add(acc, a.scale(h_gens[i], coeff[i] as i64)));
        let row: Vec<Qz> = (0..m).map(|j| (0..m).map(|i| beta[i][j] * coeff[i] as i64).sum()).collect();
        match rep.get(&h) {
            Some(prev) if *prev != row => {
                return Err(Error::NotLagrangian("b is not well defined on H".into()));
            }
            _ => {
                rep.insert(h, row);
            }
        }
    }
    let metric = MetricGroup::hyperbolic(a);
    let b = metric.group();
    let r = a.rank();
    let mut elems = Vec::new();
    for &h in &h_elems {
        let hv = a.element(h);
        let row = &rep[&h];
        for phi in 0..a.order() {
            let pv = a.element(phi);
            let ok = (0..m).all(|j| a.pairing(&pv, &a.element(h_gens[j])) == row[j]);
            if ok {
                let mut v = pv.clone();
                v.extend_from_slice(&hv);
                debug_assert_eq!(v.len(), 2 * r);
                elems.push(b.index(&v));
            }
        }
    }
    let l = LagrangianSubgroup::new(&metric, &elems)?;
    Ok((metric, l))
}

//! Generated pointed test matrix: metric groups Â×A with |A| ≤ 8, Lagrangians,
//! orthogonal actions of groups of order ≤ 4 and 2-cocycles.

#![allow(dead_code)]

use std::collections::HashSet;

use fusionforge_core::group::FiniteGroup;
use fusionforge_core::pointed::{lagrangian_from_pair, AbelianGroup, LagrangianSubgroup, MetricGroup, OrthogonalAction, Qz};

pub struct PointedCase {
    pub name: String,
    pub metric: MetricGroup,
    pub lagrangian: LagrangianSubgroup,
    pub action: OrthogonalAction,
}

type Mat = Vec<Vec<i64>>;

fn ident(k: usize) -> Mat {
    (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect()
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let k = a.len();
    (0..k)
        .map(|i| (0..k).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect())
        .collect()
}

fn pow(a: &Mat, e: usize) -> Mat {
    (0..e).fold(ident(a.len()), |acc, _| mul(&acc, a))
}

fn block(top: &Mat, bottom: &Mat) -> Mat {
    let r = top.len();
    let mut m = vec![vec![0; 2 * r]; 2 * r];
    for i in 0..r {
        for j in 0..r {
            m[i][j] = top[i][j];
            m[r + i][r + j] = bottom[i][j];
        }
    }
    m
}

fn swap(r: usize) -> Mat {
    let mut m = vec![vec![0; 2 * r]; 2 * r];
    for i in 0..r {
        m[i][r + i] = 1;
        m[r + i][i] = 1;
    }
    m
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..k {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Candidate orthogonal automorphisms of Â×A, named.
fn automorphisms(factors: &[u64]) -> Vec<(String, Mat)> {
    let r = factors.len();
    let id = ident(2 * r);
    let neg: Mat = id.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
    let sw = swap(r);
    let mut out = vec![
        ("id".to_string(), id.clone()),
        ("neg".into(), neg.clone()),
        ("swap".into(), sw.clone()),
        ("swapneg".into(), mul(&sw, &neg)),
    ];
    if r == 1 {
        let m = factors[0] as i64;
        for u in 2..m {
            if num_integer::Integer::gcd(&u, &m) == 1 {
                let uinv = (1..m).find(|v| (u * v) % m == 1).unwrap();
                out.push((format!("unit{u}"), block(&vec![vec![uinv]], &vec![vec![u]])));
            }
        }
    } else {
        for p in permutations(r) {
            if p.iter().enumerate().all(|(i, &j)| i == j) || p.iter().enumerate().any(|(i, &j)| factors[i] != factors[j]) {
                continue;
            }
            let pm: Mat = (0..r).map(|i| (0..r).map(|j| i64::from(p[i] == j)).collect()).collect();
            let name: String = p.iter().map(|x| x.to_string()).collect();
            out.push((format!("perm{name}"), block(&pm, &pm)));
            out.push((format!("swapperm{name}"), mul(&sw, &block(&pm, &pm))));
        }
    }
    out
}

fn lagrangians(a: &AbelianGroup) -> Vec<(String, MetricGroup, LagrangianSubgroup)> {
    let f = a.factors().to_vec();
    let r = f.len();
    let unit_vec = |i: usize| {
        let mut v = vec![0u64; r];
        v[i] = 1;
        a.index(&v)
    };
    let all_gens: Vec<usize> = (0..r).map(unit_vec).collect();
    let zero = |k: usize| vec![vec![Qz::ZERO; k]; k];
    let mut specs: Vec<(String, Vec<usize>, Vec<Vec<Qz>>)> = vec![
        ("dual".into(), vec![], vec![]),
        ("diag".into(), all_gens.clone(), zero(r)),
    ];
    if r >= 2 && f[0] % 2 == 0 && f[1] % 2 == 0 {
        let mut b = zero(r);
        b[0][1] = Qz::new(1, 2);
        b[1][0] = Qz::new(1, 2);
        specs.push(("twisted".into(), all_gens.clone(), b));
    }
    if r == 1 && f[0] % 2 == 0 && f[0] > 2 {
        let half = a.index(&[f[0] / 2]);
        specs.push(("half".into(), vec![half], zero(1)));
    }
    specs
        .into_iter()
        .filter_map(|(name, gens, b)| lagrangian_from_pair(a, &gens, &b).ok().map(|(m, l)| (name, m, l)))
        .collect()
}

fn groups() -> Vec<(String, FiniteGroup, Vec<usize>)> {
    // (name, group, orders of the generators whose images are chosen)
    let z2 = FiniteGroup::cyclic(2);
    vec![
        ("1".into(), FiniteGroup::trivial(), vec![]),
        ("Z2".into(), z2.clone(), vec![2]),
        ("Z3".into(), FiniteGroup::cyclic(3), vec![3]),
        ("Z4".into(), FiniteGroup::cyclic(4), vec![4]),
        ("Z2xZ2".into(), z2.product(&z2), vec![2, 2]),
    ]
}

/// π(g) for each group element from generator images.
fn images(grp: &FiniteGroup, gens: &[&Mat], k: usize) -> Vec<Mat> {
    match gens.len() {
        0 => vec![ident(k)],
        1 => (0..grp.order()).map(|j| pow(gens[0], j)).collect(),
        _ => (0..grp.order()).map(|x| mul(&pow(gens[0], x / 2), &pow(gens[1], x % 2))).collect(),
    }
}

fn permutation_of(b: &AbelianGroup, m: &Mat) -> Vec<usize> {
    (0..b.order())
        .map(|x| {
            let v = elem(b, x);
            let w: Vec<i64> = m.iter().map(|row| row.iter().zip(&v).map(|(p, q)| p * q).sum()).collect();
            b.index_signed(&w)
        })
        .collect()
}

fn elem(b: &AbelianGroup, x: usize) -> Vec<i64> {
    b.element(x).iter().map(|&v| v as i64).collect()
}

/// Candidate ω tables (as element indices of B) for an action.
fn cocycles(metric: &MetricGroup, grp: &FiniteGroup, act: &OrthogonalAction) -> Vec<(String, Vec<Vec<usize>>)> {
    let b = metric.group();
    let m = grp.order();
    let mut out = vec![("0".to_string(), vec![vec![0; m]; m])];
    if m == 1 {
        return out;
    }
    let probes = [1usize, b.order() - 1];
    for (t, &x) in probes.iter().enumerate() {
        // coboundary of β(g) = x for g ≠ e
        let beta = |g: usize| if g == grp.identity() { 0 } else { x };
        let w = (0..m)
            .map(|g| {
                (0..m)
                    .map(|h| b.add(b.add(beta(g), act.act(g, beta(h))), b.neg(beta(grp.mul(g, h)))))
                    .collect()
            })
            .collect();
        out.push((format!("cob{t}"), w));
    }
    let fixed: Vec<usize> = (1..b.order()).filter(|&x| (0..m).all(|g| act.act(g, x) == x)).collect();
    for (t, &x) in fixed.iter().take(2).enumerate() {
        let w = if m == 4 && grp.mul(1, 1) == 0 {
            // Klein four: x·a_g·b_h
            (0..m).map(|g| (0..m).map(|h| if g / 2 == 1 && h % 2 == 1 { x } else { 0 }).collect()).collect()
        } else {
            (0..m).map(|g| (0..m).map(|h| if g + h >= m { x } else { 0 }).collect()).collect()
        };
        out.push((format!("carry{t}"), w));
    }
    out
}

/// Every valid combination of the generators above.
pub fn pointed_matrix() -> Vec<PointedCase> {
    let a_list: Vec<Vec<u64>> = vec![
        vec![2],
        vec![3],
        vec![4],
        vec![2, 2],
        vec![5],
        vec![6],
        vec![7],
        vec![8],
        vec![2, 4],
        vec![2, 2, 2],
    ];
    let mut cases = Vec::new();
    let mut seen = HashSet::new();
    for f in a_list {
        let a = AbelianGroup::new(f.clone()).unwrap();
        let b = a.product(&a);
        let mut images_seen = HashSet::new();
        let autos: Vec<(String, Mat)> = automorphisms(&f)
            .into_iter()
            .filter(|(_, m)| images_seen.insert(permutation_of(&b, m)))
            .collect();
        let k = 2 * f.len();
        for (lname, metric, lag) in lagrangians(&a) {
            for (gname, grp, orders) in groups() {
                let choices: Vec<Vec<&(String, Mat)>> = match orders.len() {
                    0 => vec![vec![]],
                    1 => autos.iter().map(|t| vec![t]).collect(),
                    // (S, T) and (T, S) differ by an automorphism of G
                    _ => autos
                        .iter()
                        .enumerate()
                        .flat_map(|(i, s)| autos[i..].iter().map(move |t| vec![s, t]))
                        .collect(),
                };
                for choice in choices {
                    let mats: Vec<&Mat> = choice.iter().map(|(_, m)| m).collect();
                    let pi = images(&grp, &mats, k);
                    let Ok(base) = OrthogonalAction::new(&metric, grp.clone(), pi.clone(), Vec::new()) else {
                        continue;
                    };
                    let pname: Vec<&str> = choice.iter().map(|(n, _)| n.as_str()).collect();
                    for (wname, w) in cocycles(&metric, &grp, &base) {
                        let omega: Vec<Vec<Vec<i64>>> = w
                            .iter()
                            .map(|row| row.iter().map(|&x| elem(metric.group(), x)).collect())
                            .collect();
                        let Ok(action) = OrthogonalAction::new(&metric, grp.clone(), pi.clone(), omega) else {
                            continue;
                        };
                        let key = (
                            f.clone(),
                            lname.clone(),
                            gname.clone(),
                            (0..grp.order())
                                .map(|g| (0..b.order()).map(|x| action.act(g, x)).collect::<Vec<_>>())
                                .collect::<Vec<_>>(),
                            w.clone(),
                        );
                        if !seen.insert(key) {
                            continue;
                        }
                        cases.push(PointedCase {
                            name: format!("A={f:?} L={lname} G={gname} pi=[{}] w={wname}", pname.join(",")),
                            metric: metric.clone(),
                            lagrangian: lag.clone(),
                            action,
                        });
                    }
                }
            }
        }
    }
    cases
}

/// The ℤ/2 electromagnetic duality on the toric code.
pub fn ising_case() -> PointedCase {
    let a = AbelianGroup::new(vec![2]).unwrap();
    let (metric, lagrangian) = lagrangian_from_pair(&a, &[], &[]).unwrap();
    let action = OrthogonalAction::new(&metric, FiniteGroup::cyclic(2), vec![ident(2), swap(1)], Vec::new()).unwrap();
    PointedCase {
        name: "toric code duality".into(),
        metric,
        lagrangian,
        action,
    }
}

use fusionforge_core::modular::{
    deligne_power, fibonacci, genus_coefficient_bruteforce, ising, toric_code, verlinde, ModularData,
};
use fusionforge_core::permutation::{co_order, cyclic_coefficient_value, cyclic_fusion, cyclic_genus, DEFAULT_SECTOR_CAP};
use fusionforge_core::ring::{join_labels, BOXTIMES};
use fusionforge_core::{FusionRing, GradedFusionRing};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn slots(ring: &GradedFusionRing, x: usize) -> Vec<String> {
    ring.local_label(x).split(BOXTIMES).map(String::from).collect()
}

fn tuple_index(t: &[usize], r: usize) -> usize {
    t.iter().fold(0, |acc, &v| acc * r + v)
}

#[test]
fn slot_genus_sum_matches_bruteforce_on_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for md in [fibonacci(), toric_code()] {
        let r = md.rank();
        for n in 1..=4 {
            for g in 0..n {
                for h in 0..n {
                    let (p, k) = cyclic_genus(n, g, h).unwrap();
                    if r.pow(p as u32) > 64 {
                        continue;
                    }
                    let power = deligne_power(&md, p as u32).unwrap();
                    let pr = power.ring();
                    let lens = [co_order(g, n), co_order(h, n), co_order((g + h) % n, n)];
                    for _ in 0..12 {
                        let t: Vec<Vec<usize>> = lens.iter().map(|&c| (0..c).map(|_| rng.gen_range(0..r)).collect()).collect();
                        let v = cyclic_coefficient_value(&md, n, (g, &t[0]), (h, &t[1]), &t[2]).unwrap();
                        // slot j of the C^⊠p insertion is the j-th p-strided piece
                        let strided = |tup: &[usize]| -> Vec<usize> {
                            (0..tup.len() / p)
                                .map(|q| {
                                    let piece: Vec<usize> = (0..p).map(|j| tup[q * p + j]).collect();
                                    tuple_index(&piece, r)
                                })
                                .collect()
                        };
                        let mut ins_in = strided(&t[0]);
                        ins_in.extend(strided(&t[1]));
                        let slow = genus_coefficient_bruteforce(pr, k, &ins_in, &strided(&t[2]));
                        assert!(
                            (v.re - slow as f64).abs() < 1e-6 && v.im.abs() < 1e-6,
                            "n={n} g={g} h={h} {t:?}: {v} vs {slow}"
                        );
                    }
                }
            }
        }
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    permutations(k - 1)
        .into_iter()
        .flat_map(|p| {
            (0..k).map(move |pos| {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                q
            })
        })
        .collect()
}

#[test]
fn order_four_even_part_factors_through_square() {
    let md = fibonacci();
    let big = cyclic_fusion(&md, 4, DEFAULT_SECTOR_CAP).unwrap();
    let small = cyclic_fusion(&deligne_power(&md, 2).unwrap(), 2, DEFAULT_SECTOR_CAP).unwrap();
    let sub: Vec<usize> = big.sector(0).into_iter().chain(big.sector(2)).collect();
    let found = permutations(4).into_iter().any(|s0| {
        permutations(2).into_iter().any(|s2| {
            let image = |x: usize| -> usize {
                let parts = slots(&small, x);
                let (g, perm) = if small.grading()[x] == 0 { (0, &s0) } else { (2, &s2) };
                let moved: Vec<&String> = perm.iter().map(|&i| &parts[i]).collect();
                big.find(g, &join_labels(&moved)).unwrap()
            };
            let map: Vec<usize> = (0..small.ring().rank()).map(image).collect();
            let (b, s) = (big.ring(), small.ring());
            (0..s.rank()).all(|x| {
                (0..s.rank()).all(|y| (0..s.rank()).all(|z| s.n(x, y, z) == b.n(map[x], map[y], map[z])))
            }) && sub.len() == s.rank()
        })
    });
    assert!(found, "no slot identification matches Fib≀ℤ/4 even part with Fib²≀ℤ/2");
}

#[test]
fn cyclic_slot_rotation_is_a_symmetry() {
    for (md, n) in [(fibonacci(), 4), (toric_code(), 3), (ising(), 2), (fibonacci(), 6)] {
        let ring = cyclic_fusion(&md, n, DEFAULT_SECTOR_CAP).unwrap();
        let fr = ring.ring();
        let rot: Vec<usize> = (0..fr.rank())
            .map(|x| {
                let mut s = slots(&ring, x);
                s.rotate_right(1);
                ring.find(ring.grading()[x], &join_labels(&s)).unwrap()
            })
            .collect();
        for x in 0..fr.rank() {
            for y in 0..fr.rank() {
                for z in 0..fr.rank() {
                    assert_eq!(fr.n(x, y, z), fr.n(rot[x], rot[y], rot[z]), "n={n} ({x},{y},{z})");
                }
            }
        }
    }
}

#[test]
fn verlinde_reproduces_catalog_rings() {
    for name in fusionforge_core::modular::catalog_entries() {
        let md = fusionforge_core::modular::catalog(&name).unwrap();
        let ring = verlinde(&md).unwrap();
        assert!(ring.verify().is_empty(), "{name}");
        let d = ring.fp_dims().unwrap();
        assert!(ring.fp_residual(&d) < 1e-9, "{name}");
        let want = md.real_dims();
        for (a, b) in d.iter().zip(&want) {
            assert!((a - b.abs()).abs() < 1e-9, "{name}: {a} vs {b}");
        }
    }
}

fn small_category() -> impl Strategy<Value = ModularData> {
    prop_oneof![
        Just(fibonacci()),
        Just(toric_code()),
        Just(ising()),
        Just(fusionforge_core::modular::semion()),
        (2u64..6).prop_map(|m| fusionforge_core::modular::double(&[m]).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn genus_coefficient_is_symmetric(md in small_category(), g in 0u32..3, seed in any::<u64>(), len in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ins: Vec<usize> = (0..len).map(|_| rng.gen_range(0..md.rank())).collect();
        let a = md.genus_coefficient(g, &ins).unwrap();
        ins.reverse();
        ins.rotate_left(1);
        prop_assert_eq!(a, md.genus_coefficient(g, &ins).unwrap());
    }

    #[test]
    fn unit_insertions_do_not_change_coefficients(md in small_category(), g in 0u32..3, x in 0usize..64) {
        let x = x % md.rank();
        let a = md.genus_coefficient(g, &[x, md.dual(x)]).unwrap();
        prop_assert_eq!(a, md.genus_coefficient(g, &[x, md.dual(x), 0]).unwrap());
    }

    #[test]
    fn product_rings_verify_and_dims_multiply(m in 1usize..6, md in small_category()) {
        let a = FusionRing::cyclic_group_ring(m);
        let b = md.ring().clone();
        let p = a.product(&b);
        prop_assert!(p.verify().is_empty());
        let (da, db, dp) = (a.fp_dims().unwrap(), b.fp_dims().unwrap(), p.fp_dims().unwrap());
        for i in 0..a.rank() {
            for j in 0..b.rank() {
                prop_assert!((dp[i * b.rank() + j] - da[i] * db[j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rings_round_trip_through_json(md in small_category(), n in 1usize..4) {
        let ring = cyclic_fusion(&md, n, DEFAULT_SECTOR_CAP);
        prop_assume!(ring.is_ok());
        let ring = ring.unwrap();
        let text = serde_json::to_string(&ring).unwrap();
        let back: GradedFusionRing = serde_json::from_str(&text).unwrap();
        prop_assert!(back.same_fusion_rules(&ring));
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
        let mtext = serde_json::to_string(&md).unwrap();
        let mback: ModularData = serde_json::from_str(&mtext).unwrap();
        prop_assert_eq!(mback.ring().tensor(), md.ring().tensor());
    }

    #[test]
    fn cyclic_rings_are_consistent(md in small_category(), n in 1usize..5) {
        let ring = cyclic_fusion(&md, n, DEFAULT_SECTOR_CAP);
        prop_assume!(ring.is_ok());
        let ring = ring.unwrap();
        prop_assert!(ring.verify(1e-6).is_empty());
        prop_assert!(ring.dplus_residual() < 1e-6);
    }
}

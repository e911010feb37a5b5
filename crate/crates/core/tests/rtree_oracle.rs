use std::collections::BTreeMap;

use csprq_core::{AccessStats, Mbr, Point, RTree};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_box(rng: &mut ChaCha8Rng) -> Mbr {
    let c = Point::new(rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0));
    Mbr::from_coords(c.x, c.y, c.x + rng.gen_range(0.0..40.0), c.y + rng.gen_range(0.0..40.0))
}

fn brute(items: &BTreeMap<u64, Mbr>, probe: &Mbr) -> Vec<u64> {
    items.iter().filter(|(_, m)| m.intersects(probe)).map(|(k, _)| *k).collect()
}

fn search(t: &RTree, probe: &Mbr) -> Vec<u64> {
    let mut v = t.range_search(probe, &mut AccessStats::default());
    v.sort_unstable();
    v
}

#[test]
fn bulk_load_matches_linear_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let items: BTreeMap<u64, Mbr> = (0..1000).map(|i| (i, random_box(&mut rng))).collect();
    let t = RTree::build(items.iter().map(|(k, m)| (*m, *k)).collect(), 50).unwrap();
    assert!(t.check_invariants());
    for _ in 0..300 {
        let probe = random_box(&mut rng).expand(rng.gen_range(0.0..100.0));
        assert_eq!(search(&t, &probe), brute(&items, &probe));
    }
    let all = Mbr::from_coords(-1.0, -1.0, 2000.0, 2000.0);
    assert_eq!(search(&t, &all).len(), 1000);
}

#[test]
fn interleaved_updates_match_linear_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut items: BTreeMap<u64, Mbr> = BTreeMap::new();
    let mut t = RTree::new(8).unwrap();
    let mut next = 0u64;
    for step in 0..1000 {
        if items.is_empty() || rng.gen_bool(0.6) {
            let m = random_box(&mut rng);
            t.insert(m, next).unwrap();
            items.insert(next, m);
            next += 1;
        } else {
            let k = *items.keys().nth(rng.gen_range(0..items.len())).unwrap();
            t.remove(k).unwrap();
            items.remove(&k);
        }
        if step % 25 == 0 {
            assert!(t.check_invariants(), "step {step}");
            let probe = random_box(&mut rng).expand(80.0);
            assert_eq!(search(&t, &probe), brute(&items, &probe));
        }
    }
    assert_eq!(t.len(), items.len());
}

#[test]
fn empty_probe_visits_fewer_nodes_than_full_probe() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = RTree::build((0..2500).map(|i| (random_box(&mut rng), i)).collect(), 50).unwrap();
    let mut none = AccessStats::default();
    let mut all = AccessStats::default();
    t.range_search(&Mbr::from_coords(5000.0, 5000.0, 5001.0, 5001.0), &mut none);
    t.range_search(&Mbr::from_coords(-1.0, -1.0, 2000.0, 2000.0), &mut all);
    assert!(none.nodes_visited >= 1);
    assert!(none.pages_read < all.pages_read);
}

proptest! {
    #[test]
    fn search_is_exact(seed in 0u64..1000, n in 0usize..400, fanout in 4usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let items: BTreeMap<u64, Mbr> = (0..n as u64).map(|i| (i, random_box(&mut rng))).collect();
        let t = RTree::build(items.iter().map(|(k, m)| (*m, *k)).collect(), fanout).unwrap();
        prop_assert!(t.check_invariants());
        let probe = random_box(&mut rng).expand(50.0);
        prop_assert_eq!(search(&t, &probe), brute(&items, &probe));
    }
}

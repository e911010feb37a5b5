mod common;

use common::{ngon, random_areas};
use csprq_core::{
    approximate_circle, compute_uncertainty_basic, compute_uncertainty_optimized,
    intersect_with_query, region_intersect_rect, region_subtract, Mbr, Point, Region,
    RestrictedArea, SimplePolygon,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A circle-sized scene: object at the origin with areas scattered nearby.
fn scene(seed: u64) -> (SimplePolygon, Vec<RestrictedArea>, Point) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = rng.gen_range(20.0..50.0);
    let mut areas = random_areas(&mut rng, 40, 140.0);
    for a in &mut areas {
        let pts: Vec<Point> = a
            .shape
            .vertices()
            .iter()
            .map(|p| Point::new(p.x - 70.0, p.y - 70.0))
            .collect();
        a.shape = SimplePolygon::new(pts).unwrap();
    }
    areas.retain(|a| {
        csprq_core::point_in_polygon(Point::new(0.0, 0.0), &a.shape) == csprq_core::Containment::Outside
    });
    let e = approximate_circle(Point::new(0.0, 0.0), tau, 32).unwrap();
    areas.retain(|a| a.mbr().intersects(e.mbr()));
    (e, areas, Point::new(0.0, 0.0))
}

fn probes(b: &Mbr, rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(rng.gen_range(b.lo.x..b.hi.x), rng.gen_range(b.lo.y..b.hi.y)))
        .collect()
}

#[test]
fn exactly_one_piece_holds_the_location_after_each_split() {
    let mut split_steps = 0;
    let mut seed = 0;
    while split_steps < 2000 {
        let (e, areas, l) = scene(seed);
        seed += 1;
        let mut working = Region::from_polygon(e);
        for a in &areas {
            let pieces = region_subtract(&working, &a.shape).unwrap().into_subdivisions();
            if pieces.len() > 1 {
                split_steps += 1;
                let holding = pieces.iter().filter(|d| d.contains(l)).count();
                assert_eq!(holding, 1, "seed {}", seed - 1);
            }
            working = pieces.into_iter().find(|d| d.contains(l)).unwrap();
        }
    }
}

#[test]
fn optimized_equals_basic_and_is_order_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for seed in 0..150 {
        let (e, areas, l) = scene(seed);
        let refs: Vec<&RestrictedArea> = areas.iter().collect();
        let basic = compute_uncertainty_basic(&e, &refs, l).unwrap();
        let opt = compute_uncertainty_optimized(&e, &refs, l).unwrap();
        let rel = (basic.area() - opt.area()).abs() / basic.area();
        assert!(rel <= 1e-9, "seed {seed}: {rel}");
        assert!(basic.area() <= e.area() * (1.0 + 1e-12));
        for p in probes(e.mbr(), &mut rng, 2000) {
            assert_eq!(basic.contains(p), opt.contains(p), "seed {seed} at {p:?}");
        }
        let mut shuffled = refs.clone();
        shuffled.shuffle(&mut rng);
        let again = compute_uncertainty_basic(&e, &shuffled, l).unwrap();
        assert!((again.area() - basic.area()).abs() <= 1e-9 * basic.area());
        for p in probes(e.mbr(), &mut rng, 500) {
            assert_eq!(basic.contains(p), again.contains(p));
        }
    }
}

#[test]
fn query_clip_equals_prior_method() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..150 {
        let (e, areas, l) = scene(seed);
        let refs: Vec<&RestrictedArea> = areas.iter().collect();
        let u = compute_uncertainty_optimized(&e, &refs, l).unwrap();
        for _ in 0..5 {
            let x = rng.gen_range(-60.0..40.0);
            let y = rng.gen_range(-60.0..40.0);
            let t = rng.gen_range(5.0..80.0);
            let r = common::rect(x, y, x + t, y + t);
            let fast = intersect_with_query(&u, &r).unwrap();
            let prior = region_intersect_rect(&u, &r).unwrap();
            assert_eq!(fast.area().to_bits(), prior.area().to_bits(), "seed {seed}");
            for p in probes(r.mbr(), &mut rng, 300) {
                assert_eq!(fast.contains(p), prior.contains(p));
            }
        }
    }
}

#[test]
fn circle_area_and_apothem() {
    let tau = 20.0;
    let xi = 32;
    let p = approximate_circle(Point::new(3.0, -2.0), tau, xi).unwrap();
    let want = 0.5 * xi as f64 * tau * tau * (std::f64::consts::TAU / xi as f64).sin();
    assert!((p.area() - want).abs() < 1e-9);
    assert!((p.area() - 1248.6).abs() < 0.05);
    for v in p.vertices() {
        assert!((v.dist(Point::new(3.0, -2.0)) - tau).abs() < 1e-12);
    }
    let apothem = tau * (std::f64::consts::PI / xi as f64).cos();
    for (a, b) in p.edges() {
        let mid = Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
        assert!((mid.dist(Point::new(3.0, -2.0)) - apothem).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn uncertainty_never_grows(seed in 0u64..10_000) {
        let (e, areas, l) = scene(seed);
        let refs: Vec<&RestrictedArea> = areas.iter().collect();
        let u = compute_uncertainty_optimized(&e, &refs, l).unwrap();
        prop_assert!(u.area() <= e.area() * (1.0 + 1e-12));
        prop_assert!(u.contains(l));
    }

    #[test]
    fn split_first_prunes_far_side(offset in 5.0f64..15.0, far in 25.0f64..30.0) {
        // A wall splits the circle; a second area on the far side still meets
        // the circle's box but misses the kept piece's box.
        let e = approximate_circle(Point::new(0.0, 0.0), 30.0, 32).unwrap();
        let wall = RestrictedArea::new(csprq_core::AreaId(1), common::rect(offset, -40.0, offset + 2.0, 40.0));
        let beyond = RestrictedArea::new(csprq_core::AreaId(2), ngon(Point::new(far, -far * 0.2), 1.5, 6, 0.0));
        let mut c = csprq_core::UncertaintyCounters::default();
        let u = csprq_core::compute_uncertainty_optimized_counted(&e, &[&beyond, &wall], Point::new(0.0, 0.0), &mut c).unwrap();
        prop_assert_eq!(c.subtractions, 1);
        prop_assert_eq!(c.pruned_areas, 1);
        let b = compute_uncertainty_basic(&e, &[&beyond, &wall], Point::new(0.0, 0.0)).unwrap();
        prop_assert_eq!(u.area().to_bits(), b.area().to_bits());
    }
}

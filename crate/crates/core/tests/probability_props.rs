mod common;

use common::rect;
use csprq_core::{
    monte_carlo_estimate, probability_monte_carlo, probability_uniform, region_intersect_rect,
    Pdf, Point, Region, RegionSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn holed() -> Region {
    Region::new(rect(0.0, 0.0, 4.0, 4.0), vec![rect(1.0, 1.0, 3.0, 3.0)]).unwrap()
}

#[test]
fn million_draws_hit_one_third() {
    let u = holed();
    let s = region_intersect_rect(&u, &rect(0.0, 0.0, 4.0, 1.0)).unwrap();
    let p = probability_monte_carlo(&u, &s, &Pdf::Uniform, 1_000_000, 11).unwrap().value();
    assert!((p - 1.0 / 3.0).abs() <= 0.0015, "{p}");
}

#[test]
fn uniform_monte_carlo_within_three_sigma_of_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..60 {
        let w = rng.gen_range(2.0..10.0);
        let h = rng.gen_range(2.0..10.0);
        let hx = rng.gen_range(0.2..w / 2.0);
        let hy = rng.gen_range(0.2..h / 2.0);
        let u = Region::new(
            rect(0.0, 0.0, w, h),
            vec![rect(hx, hy, hx + w / 3.0, hy + h / 3.0)],
        )
        .unwrap();
        let qx = rng.gen_range(-1.0..w);
        let qy = rng.gen_range(-1.0..h);
        let s = region_intersect_rect(&u, &rect(qx, qy, qx + w / 2.0, qy + h / 2.0)).unwrap();
        let exact = probability_uniform(&u, &s).unwrap().value();
        let est = monte_carlo_estimate(&u, &s, &Pdf::Uniform, 20_000, i).unwrap();
        let sd = (exact * (1.0 - exact) / est.accepted as f64).sqrt();
        assert!((est.probability.value() - exact).abs() <= 3.0 * sd + 1e-12, "case {i}");
    }
}

#[test]
fn scaled_gaussian_gives_identical_bits() {
    let u = holed();
    let s = region_intersect_rect(&u, &rect(0.0, 0.0, 2.5, 4.0)).unwrap();
    let mean = Point::new(0.5, 0.5);
    let sigma = 0.8;
    let g = Pdf::gaussian(mean, sigma).unwrap();
    let base = probability_monte_carlo(&u, &s, &g, 700, 3).unwrap();
    for k in [0.25, 2.0, 1024.0, 2f64.powi(-40)] {
        let scaled = Pdf::custom(move |p| {
            let d2 = (p.x - mean.x).powi(2) + (p.y - mean.y).powi(2);
            k * libm::exp(-d2 / (2.0 * sigma * sigma))
        });
        let got = probability_monte_carlo(&u, &s, &scaled, 700, 3).unwrap();
        assert_eq!(got.value().to_bits(), base.value().to_bits(), "k = {k}");
    }
    for k in [3.0, 0.1, 7.77] {
        let scaled = Pdf::custom(move |p| {
            let d2 = (p.x - mean.x).powi(2) + (p.y - mean.y).powi(2);
            k * libm::exp(-d2 / (2.0 * sigma * sigma))
        });
        let got = probability_monte_carlo(&u, &s, &scaled, 700, 3).unwrap().value();
        assert!((got - base.value()).abs() <= 1e-13 * base.value());
    }
}

#[test]
fn monotone_in_s_and_bounded() {
    let u = holed();
    let g = Pdf::gaussian(Point::new(3.5, 0.5), 1.0).unwrap();
    let small = region_intersect_rect(&u, &rect(0.0, 0.0, 4.0, 1.0)).unwrap();
    let mut bigger = small.clone().into_subdivisions();
    bigger.extend(region_intersect_rect(&u, &rect(0.0, 3.0, 4.0, 4.0)).unwrap().into_subdivisions());
    let bigger = RegionSet::new(bigger);
    for seed in 0..20 {
        let a = probability_monte_carlo(&u, &small, &g, 700, seed).unwrap().value();
        let b = probability_monte_carlo(&u, &bigger, &g, 700, seed).unwrap().value();
        assert!(a <= b && (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
    }
}

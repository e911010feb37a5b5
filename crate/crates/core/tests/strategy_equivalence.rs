mod common;

use common::{random_areas, random_objects};
use csprq_core::{
    EngineConfig, Mbr, PdfModel, QueryRange, Strategy, Workspace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check_workspace(seed: u64, pdf: PdfModel) -> (u64, u64, u64, usize) {
    let mut tally = (0u64, 0u64, 0u64, 0usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = 600.0;
    let m = rng.gen_range(0..150);
    let areas = random_areas(&mut rng, m, side);
    let n = rng.gen_range(1..120);
    let objects = random_objects(&mut rng, n, side, &areas);
    let cfg = EngineConfig {
        xi: [8, 16, 32][rng.gen_range(0..3)],
        pdf,
        ..EngineConfig::default()
    };
    let mut w = Workspace::new(cfg, objects, areas).unwrap();
    w.precompute_all().unwrap();
    for q in 0..4 {
        let t = rng.gen_range(20.0..250.0);
        let x = rng.gen_range(-20.0..side);
        let y = rng.gen_range(-20.0..side);
        let r = QueryRange::new(Mbr::from_coords(x, y, x + t, y + t)).unwrap();
        let qseed = seed * 31 + q;
        let base = w.query(Strategy::B, &r, qseed).unwrap();
        for s in [Strategy::S, Strategy::SO, Strategy::PSO] {
            let out = w.query(s, &r, qseed).unwrap();
            assert!(
                out.answer.bit_identical(&base.answer),
                "seed {seed} query {q}: {s} differs from B\n{:?}\n{:?}",
                out.answer,
                base.answer
            );
        }
        assert!(base.answer.entries.iter().all(|e| e.probability.value() > 0.0));
        let so = w.query(Strategy::SO, &r, qseed).unwrap().counters.geometry;
        tally.0 += so.subtractions;
        tally.1 += so.postponed_areas + so.postponed_holes;
        tally.2 += so.pruned_areas;
        tally.3 += base
            .answer
            .entries
            .iter()
            .filter(|e| e.probability.value() < 1.0)
            .count();
    }
    tally
}

fn run(seeds: std::ops::Range<u64>, pdf: PdfModel) {
    let mut total = (0, 0, 0, 0);
    for seed in seeds {
        let t = check_workspace(seed, pdf.clone());
        total = (total.0 + t.0, total.1 + t.1, total.2 + t.2, total.3 + t.3);
    }
    // The scenes must exercise clipping, deferral, pruning and partial answers.
    assert!(total.0 > 0 && total.1 > 0 && total.2 > 0 && total.3 > 0, "{total:?}");
}

#[test]
fn uniform_strategies_agree() {
    run(0..40, PdfModel::Uniform);
}

#[test]
fn gaussian_strategies_agree() {
    run(100..130, PdfModel::gaussian());
}

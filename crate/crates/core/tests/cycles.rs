//! Random cycle systems: H is grown axax-free, K strong-axax-free against it.

use npsupport::cyclesupport::{
    classify_axax, classify_strong_axax, embedding_is_outerplanar, outerplanar_intersection_support,
    CycleSystem,
};
use npsupport::verify::{check_support, is_outerplanar, Hypergraph};
use npsupport::FamilyName;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rand_set(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut s = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let a = rng.gen_range(0..n);
        let len = rng.gen_range(1..=(n / 2).max(1));
        s.extend((0..len).map(|d| (a + d) % n));
    }
    s.sort_unstable();
    s.dedup();
    s
}

fn random_system(seed: u64, ns: std::ops::RangeInclusive<usize>, max_members: usize) -> CycleSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(ns);
    let mut h: Vec<Vec<usize>> = Vec::new();
    for _ in 0..rng.gen_range(1..=max_members) {
        h.push(rand_set(&mut rng, n));
        let c = CycleSystem::new(n, h.clone(), vec![]).unwrap();
        if classify_axax(&c, FamilyName::H).is_some() {
            h.pop();
        }
    }
    let mut k: Vec<Vec<usize>> = Vec::new();
    for _ in 0..rng.gen_range(1..=max_members) {
        k.push(rand_set(&mut rng, n));
        if classify_strong_axax(&CycleSystem::new(n, h.clone(), k.clone()).unwrap()).is_some() {
            k.pop();
        }
    }
    CycleSystem::new(n, h, k).unwrap()
}

fn sweep(seeds: std::ops::Range<u64>, ns: std::ops::RangeInclusive<usize>, max_members: usize) {
    for seed in seeds {
        let c = random_system(seed, ns.clone(), max_members);
        let s = outerplanar_intersection_support(&c).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let hg = Hypergraph::intersection(c.h(), c.k());
        assert_eq!(check_support(&hg, &s).unwrap(), None, "seed {seed}");
        assert!(is_outerplanar(&s.graph()), "seed {seed}");
        assert!(embedding_is_outerplanar(&s), "seed {seed}");
    }
}

#[test]
fn small_cycles() {
    sweep(0..20_000, 3..=9, 7);
}

#[test]
fn larger_cycles() {
    sweep(100_000..102_000, 10..=30, 16);
}

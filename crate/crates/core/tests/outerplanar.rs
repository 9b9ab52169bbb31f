use npsupport::cyclesupport::{
    build_outerplanar_dual, build_outerplanar_intersection, build_outerplanar_primal,
    embedding_is_outerplanar, outer_cycle,
};
use npsupport::generators::gen_outerplanar_system;
use npsupport::verify::{check_support, is_outerplanar, Hypergraph};
use npsupport::{Color, Coloring, GraphSystem, IntersectionSystem, Support};

fn assert_outerplanar(s: &Support, ctx: &str) {
    assert!(is_outerplanar(&s.graph()), "{ctx}: not outerplanar");
    assert!(embedding_is_outerplanar(s), "{ctx}: embedding has crossings");
}

#[test]
fn intersection_sweep() {
    for n in [5, 9, 17, 30] {
        for seed in 0..150 {
            let inst = gen_outerplanar_system(n, n / 2 + 2, n / 2 + 1, seed).unwrap();
            let sys = IntersectionSystem::new(inst.graph, inst.h, inst.k).unwrap();
            let s = build_outerplanar_intersection(&sys).unwrap();
            let ctx = format!("n {n} seed {seed}");
            assert_eq!(check_support(&Hypergraph::intersection_of(&sys), &s).unwrap(), None, "{ctx}");
            assert_outerplanar(&s, &ctx);
        }
    }
}

#[test]
fn dual_and_primal_sweep() {
    for n in [4, 8, 15, 25] {
        for seed in 0..150 {
            let inst = gen_outerplanar_system(n, n / 2 + 3, 0, seed).unwrap();
            let ctx = format!("n {n} seed {seed}");
            let colors: Vec<Color> = (0..n)
                .map(|v| if (v as u64 * 7 + seed).is_multiple_of(3) { Color::Red } else { Color::Blue })
                .collect();
            let sys = GraphSystem::new(inst.graph, Some(Coloring::new(colors)), inst.h).unwrap();
            let d = build_outerplanar_dual(&sys).unwrap();
            assert_eq!(check_support(&Hypergraph::dual(n, sys.h.members()), &d).unwrap(), None, "{ctx}");
            assert_outerplanar(&d, &ctx);
            let p = build_outerplanar_primal(&sys).unwrap();
            assert_eq!(check_support(&Hypergraph::primal(&sys), &p).unwrap(), None, "{ctx}");
            assert_outerplanar(&p, &ctx);
        }
    }
}

#[test]
fn outer_cycle_is_a_permutation() {
    for seed in 0..50 {
        let inst = gen_outerplanar_system(20, 1, 0, seed).unwrap();
        let oc = outer_cycle(&inst.graph).unwrap();
        let mut sorted = oc.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..20).collect::<Vec<_>>());
    }
}

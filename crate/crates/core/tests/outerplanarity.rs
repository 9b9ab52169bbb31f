//! `is_outerplanar` against brute force: a graph is outerplanar iff its
//! vertices can be placed on a circle with no two edges crossing.

use npsupport::verify::is_outerplanar;
use npsupport::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn crosses(pos: &[usize], (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    let (a, b) = (pos[a].min(pos[b]), pos[a].max(pos[b]));
    let (c, d) = (pos[c], pos[d]);
    if [c, d].iter().any(|&x| x == a || x == b) {
        return false;
    }
    let inside = |x: usize| a < x && x < b;
    inside(c) != inside(d)
}

fn circle_drawable(g: &Graph) -> bool {
    let n = g.vertex_count();
    if n <= 3 {
        return true;
    }
    let edges = g.edges();
    // Vertex 0 fixed at position 0; permute the rest.
    let mut rest: Vec<usize> = (1..n).collect();
    let mut pos = vec![0; n];
    loop {
        for (i, &v) in rest.iter().enumerate() {
            pos[v] = i + 1;
        }
        let ok = edges.iter().enumerate().all(|(i, &e)| edges[i + 1..].iter().all(|&f| !crosses(&pos, e, f)));
        if ok {
            return true;
        }
        // Next permutation in lexicographic order.
        let Some(i) = (0..rest.len().saturating_sub(1)).rev().find(|&i| rest[i] < rest[i + 1]) else {
            return false;
        };
        let j = (i + 1..rest.len()).rev().find(|&j| rest[j] > rest[i]).unwrap();
        rest.swap(i, j);
        rest[i + 1..].reverse();
    }
}

#[test]
fn matches_circle_drawing() {
    let (mut yes, mut no) = (0, 0);
    for seed in 0..3000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=8);
        let p = [0.2, 0.35, 0.5, 0.7][seed as usize % 4];
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        let expected = circle_drawable(&g);
        assert_eq!(is_outerplanar(&g), expected, "seed {seed}: edges {:?}", g.edges());
        if expected {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 300 && no > 300, "{yes} outerplanar, {no} not");
}

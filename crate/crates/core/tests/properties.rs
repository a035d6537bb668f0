use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tropmod_core::arith::rat::{add, is_integral, rat, scale, sub, zero_vec};
use tropmod_core::families::{distance_map, forgetful_family, random_point};
use tropmod_core::matroid::{bergman_fan, Matroid};
use tropmod_core::moduli::tree::{parse_newick_in, MarkedTree};
use tropmod_core::moduli::{forgetful, random_tree, ModuliChart};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn tree_round_trips(n in 3usize..=7, seed in any::<u64>()) {
        let chart = ModuliChart::standard(n).unwrap();
        let t = random_tree(&chart, &mut ChaCha8Rng::seed_from_u64(seed), 6, 3);
        let back = MarkedTree::from_chart_point(&chart, &t.to_chart_point()).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(parse_newick_in(&chart, &t.to_newick()).unwrap(), t);
    }

    #[test]
    fn forgetting_keeps_other_distances(n in 3usize..=6, seed in any::<u64>()) {
        let source = ModuliChart::with_zero(n).unwrap();
        let target = ModuliChart::standard(n).unwrap();
        let t = random_tree(&source, &mut ChaCha8Rng::seed_from_u64(seed), 6, 3);
        let image = forgetful(n).unwrap().eval(&t.to_chart_point()).unwrap();
        let stable = MarkedTree::from_chart_point(&target, &image).unwrap();
        // Distances between the remaining markings are unchanged up to leaf lengths.
        let d = t.distances();
        let labels = source.labels();
        let expected: Vec<_> = target
            .raw_pairs()
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (target.labels()[i], target.labels()[j]);
                let k = source.raw_pairs().iter().position(|&(x, y)| {
                    let (p, q) = (labels[x], labels[y]);
                    (p, q) == (a, b) || (q, p) == (a, b)
                });
                d[k.unwrap()].clone()
            })
            .collect();
        prop_assert!(target.equal_mod_lineality(&stable.to_chart_point(), &target.raw_to_chart(&expected)));
        prop_assert!(stable.num_bounded_edges() <= t.num_bounded_edges());
    }

    #[test]
    fn uniform_bergman_fans_balance(r in 1usize..=3, extra in 0usize..=2) {
        let m = Matroid::uniform(r, r + extra).unwrap();
        let b = bergman_fan(&m);
        prop_assert!(b.is_balanced());
        prop_assert!(b.weights().iter().all(|&w| w == 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn distance_differences_are_integral(seed in any::<u64>(), steps in prop::collection::vec(-2i64..=2, 3)) {
        let fam = forgetful_family(4, &[rat(30)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells = fam.base.cells();
        let c = &cells[(seed % cells.len() as u64) as usize];
        let b = random_point(c, &mut rng);
        let step = c
            .lattice()
            .iter()
            .zip(&steps)
            .fold(zero_vec(b.len()), |acc, (v, &k)| add(&acc, &scale(&rat(k), v)));
        let b2 = add(&b, &step);
        prop_assume!(c.contains(&b2));
        let d = sub(&distance_map(&fam, &b2).unwrap(), &distance_map(&fam, &b).unwrap());
        prop_assert!(is_integral(&d));
    }
}

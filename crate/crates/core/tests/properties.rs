mod common;

use proptest::prelude::*;
use syzkit::calculus::exterior_d;
use syzkit::exterior::{bits, mono_wedge, Mask};
use syzkit::fourier::{check_intertwining, fm_backward, fm_forward, involution_sign, shuffle_sign, SemiflatPair};
use syzkit::json::{form_from_value, form_to_value, poly_from_value, poly_to_value};
use syzkit::linalg::{poly_det, rank};
use syzkit::random::{self, trial_rng, Shape};
use syzkit::{q, qi, Form, Poly, Q};

use common::{bareiss_rank, cofactor_det, perm_sign};

fn scalar_strategy() -> impl Strategy<Value = Q> {
    (-4i64..=4, -2i64..=2, 1i64..=3).prop_map(|(a, b, d)| &q(a, d) + &qi(0, b))
}

fn pair(n: usize) -> SemiflatPair<Q> {
    SemiflatPair::standard(n).unwrap()
}

proptest! {
    #[test]
    fn wedge_sign_matches_permutation_oracle(a in 0u64..1 << 12, b in 0u64..1 << 12) {
        let (a, b): (Mask, Mask) = (a, b & !a);
        let (m, negative) = mono_wedge(a, b).unwrap();
        prop_assert_eq!(m, a | b);
        let seq: Vec<usize> = bits(a).chain(bits(b)).collect();
        prop_assert_eq!(negative, perm_sign(&seq));
        prop_assert!(mono_wedge(a | 1, b | 1).is_none());
    }

    #[test]
    fn shuffle_sign_matches_permutation_oracle(mask in 0u32..1 << 6) {
        let n = 6;
        let i: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
        let seq: Vec<usize> = i.iter().copied().chain((0..n).filter(|k| mask >> k & 1 == 0)).collect();
        prop_assert_eq!(shuffle_sign(&i, n), perm_sign(&seq));
    }

    #[test]
    fn rank_matches_bareiss(rows in prop::collection::vec(prop::collection::vec(scalar_strategy(), 5), 1..6), dup in any::<bool>()) {
        let mut rows = rows;
        if dup && rows.len() > 1 {
            // Force a dependency.
            let combo: Vec<Q> = rows[0].iter().zip(&rows[1]).map(|(x, y)| x + &(y * &q(2, 1))).collect();
            rows.push(combo);
        }
        prop_assert_eq!(rank(&rows), bareiss_rank(&rows));
    }

    #[test]
    fn determinant_matches_cofactor_expansion(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = trial_rng(seed, 0);
        let vars = pair(2).base_vars().to_vec();
        let shape = Shape { degree: 1, poly_terms: 2, ..Shape::default() };
        let m: Vec<Vec<Poly>> = (0..n).map(|_| (0..n).map(|_| random::poly(&mut rng, &vars, shape)).collect()).collect();
        prop_assert_eq!(poly_det(&m), cofactor_det(&m));
    }

    #[test]
    fn transform_is_an_involution_up_to_sign(seed in any::<u64>(), n in 1usize..=4) {
        let p = pair(n);
        let mut rng = trial_rng(seed, 1);
        let a = random::form(&mut rng, p.complex().frame(), p.base_vars(), Shape::default());
        let back = fm_backward(&fm_forward(&a, &p).unwrap(), &p).unwrap();
        prop_assert_eq!(back, a.scale(&involution_sign::<Q>(n)));
    }

    #[test]
    fn transform_intertwines(seed in any::<u64>(), n in 1usize..=3) {
        let p = pair(n);
        let mut rng = trial_rng(seed, 2);
        let a = random::form(&mut rng, p.complex().frame(), p.base_vars(), Shape::default());
        prop_assert!(check_intertwining(&a, &p).unwrap().holds());
    }

    #[test]
    fn d_squared_vanishes_on_frames(seed in any::<u64>()) {
        let nd = syzkit::nilmanifold::NilData::build(3).unwrap();
        let mut rng = trial_rng(seed, 3);
        for frame in [nd.frame_b(), nd.frame_a()] {
            let f = random::form(&mut rng, frame, nd.pair().base_vars(), Shape::default());
            prop_assert!(exterior_d(&exterior_d(&f)).is_zero());
        }
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), n in 1usize..=3) {
        let p = pair(n);
        let mut rng = trial_rng(seed, 4);
        let a = random::form(&mut rng, p.correspondence(), p.base_vars(), Shape::default());
        let back: Form = form_from_value(&form_to_value(&a), &[p.correspondence()]).unwrap();
        prop_assert_eq!(&back, &a);
        let c: Poly = random::poly(&mut rng, p.base_vars(), Shape::default());
        prop_assert_eq!(poly_from_value(&poly_to_value(&c)).unwrap(), c);
    }
}

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use pingpong_core::cayley::{check_local_quasigeodesic, CayleyBall, QuasiParams, QuasiVerdict};
use pingpong_core::rational::int;
use pingpong_core::residual::{shortest_kernel_element, FiniteQuotientSpec, Permutation};
use pingpong_core::subgroup::StallingsGraph;
use pingpong_core::{Letter, Presentation, Word, WordOracle};

fn word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..2 * rank, 0..=max).prop_map(|slots| slots.into_iter().map(Letter::from_slot).collect())
}

fn perm(degree: usize) -> impl Strategy<Value = Permutation> {
    Just((0..degree as u16).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn surface() -> &'static Arc<WordOracle> {
    static S: OnceLock<Arc<WordOracle>> = OnceLock::new();
    S.get_or_init(|| Arc::new(WordOracle::new(Presentation::surface(2).unwrap())))
}

fn f2_ball() -> &'static CayleyBall {
    static B: OnceLock<CayleyBall> = OnceLock::new();
    B.get_or_init(|| CayleyBall::build(Arc::new(WordOracle::new(Presentation::free(2))), 5).unwrap())
}

fn surface_ball() -> &'static CayleyBall {
    static B: OnceLock<CayleyBall> = OnceLock::new();
    B.get_or_init(|| CayleyBall::build(surface().clone(), 3).unwrap())
}

/// Reduced words of length `1..max` whose image is the identity.
fn brute_kernel(spec: &FiniteQuotientSpec, max: usize) -> Option<Word> {
    fn go(spec: &FiniteQuotientSpec, w: &mut Vec<Letter>, p: &Permutation, max: usize) -> Option<Word> {
        if !w.is_empty() && p.is_identity() {
            return Some(Word::from_letters(w.clone()));
        }
        if w.len() == max {
            return None;
        }
        for l in Letter::all(spec.rank()) {
            if w.last() == Some(&l.inv()) {
                continue;
            }
            w.push(l);
            let found = go(spec, w, &p.then(&spec.letter_image(l)), max);
            w.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
    go(spec, &mut Vec::new(), &Permutation::identity(spec.degree()), max)
}

proptest! {
    #[test]
    fn free_reduction_is_idempotent(w in word(3, 20)) {
        let r = w.free_reduce();
        prop_assert!(r.is_freely_reduced());
        prop_assert_eq!(r.free_reduce(), r);
    }

    #[test]
    fn inversion_is_an_antihomomorphism(u in word(2, 12), v in word(2, 12)) {
        prop_assert_eq!(u.invert().invert(), u.clone());
        prop_assert_eq!(u.mul(&v).invert(), v.invert().mul(&u.invert()));
        prop_assert!(u.mul(&u.invert()).is_empty());
    }

    #[test]
    fn cyclic_reduction_conjugates_back(w in word(2, 16)) {
        let (core, conj) = w.cyclically_reduce();
        prop_assert!(core.is_cyclically_reduced());
        prop_assert_eq!(conj.mul(&core).mul(&conj.invert()), w.free_reduce());
    }

    #[test]
    fn dehn_oracle_respects_relators(u in word(4, 10), v in word(4, 10)) {
        let o = surface();
        let rel = o.presentation().relators()[0].clone();
        let conj = u.concat(&rel).concat(&u.invert());
        prop_assert!(o.is_trivial(&conj));
        prop_assert!(o.is_trivial(&u.concat(&v).concat(&v.invert()).concat(&u.invert())));
        prop_assert_eq!(o.is_trivial(&u.concat(&conj)), o.is_trivial(&u));
    }

    #[test]
    fn ball_words_locate_to_themselves(i in 0usize..1000) {
        let b = surface_ball();
        let v = i % b.len();
        prop_assert_eq!(b.locate(b.word(v)), Some(v));
        prop_assert_eq!(b.layer(v), b.word(v).len());
    }

    #[test]
    fn ball_distance_is_a_metric(i in 0usize..5000, j in 0usize..5000, k in 0usize..5000) {
        let b = f2_ball();
        let (u, v, w) = (i % b.len(), j % b.len(), k % b.len());
        if let (Some(uv), Some(vw), Some(uw)) = (b.distance(u, v), b.distance(v, w), b.distance(u, w)) {
            prop_assert!(uw <= uv + vw);
        }
        prop_assert_eq!(b.distance(u, v), b.distance(v, u));
        prop_assert_eq!(b.distance(u, u), Some(0));
    }

    #[test]
    fn geodesics_are_global_quasigeodesics(i in 0usize..5000) {
        let b = f2_ball();
        let v = i % b.len();
        let path = b.path(0, b.word(v)).unwrap();
        let params = QuasiParams::global(int(1), int(0)).unwrap();
        prop_assert_eq!(check_local_quasigeodesic(b, &path, &params).unwrap(), QuasiVerdict::Pass);
    }

    #[test]
    fn stallings_accepts_products_of_generators(
        gens in prop::collection::vec(word(2, 4), 1..3),
        picks in prop::collection::vec((0usize..3, any::<bool>()), 0..6),
    ) {
        let gens: Vec<Word> = gens.into_iter().map(|g| g.free_reduce()).filter(|g| !g.is_empty()).collect();
        prop_assume!(!gens.is_empty());
        let g = StallingsGraph::from_generators(2, &gens);
        let mut w = Word::empty();
        for (i, inv) in picks {
            let x = &gens[i % gens.len()];
            w = w.mul(&if inv { x.invert() } else { x.clone() });
        }
        prop_assert!(g.accepts(&w));
    }

    #[test]
    fn stallings_intersection_is_contained_in_both(
        a in word(2, 4), b in word(2, 4), w in word(2, 10),
    ) {
        let (a, b) = (a.free_reduce(), b.free_reduce());
        prop_assume!(!a.is_empty() && !b.is_empty());
        let ga = StallingsGraph::from_generators(2, std::slice::from_ref(&a));
        let gb = StallingsGraph::from_generators(2, std::slice::from_ref(&b));
        let both = ga.intersect(&gb);
        let w = w.free_reduce();
        prop_assert_eq!(both.accepts(&w), ga.accepts(&w) && gb.accepts(&w));
    }

    #[test]
    fn depth_is_invariant_under_relabeling(
        a in perm(5), b in perm(5), sigma in perm(5),
    ) {
        let spec = FiniteQuotientSpec::new(5, vec![a, b]).unwrap();
        let r = shortest_kernel_element(&spec);
        prop_assert_eq!(shortest_kernel_element(&spec.conjugate(&sigma)).depth, r.depth);
        prop_assert!(spec.image(&r.witness).unwrap().is_identity());
        prop_assert!(r.witness.is_freely_reduced());
    }

    #[test]
    fn depth_matches_brute_force(a in perm(4), b in perm(4)) {
        let spec = FiniteQuotientSpec::new(4, vec![a, b]).unwrap();
        let r = shortest_kernel_element(&spec);
        prop_assert_eq!(brute_kernel(&spec, r.depth - 1), None);
        prop_assert_eq!(brute_kernel(&spec, r.depth).map(|w| w.len()), Some(r.depth));
    }
}

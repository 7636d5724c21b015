use proptest::prelude::*;
use rand::Rng;

use siltsurf::curves::{curve_of_string, grade, power, reduce, string_of_curve};
use siltsurf::fuzz::{random_arc, random_closed, random_graded, random_surface, rng};
use siltsurf::homs::{endpoint_intersections, hom_table, intersection_number, same_primitive, self_intersections};
use siltsurf::mutation::{classify_case, mutate, tilting_preserved, verify_triangle, Direction, SurfaceTriangle};
use siltsurf::oracle::{hom_dims_in, Complex, PathAlgebra, Q};
use siltsurf::reduction::{in_z, orbit_of, project_all, smoothing_class};
use siltsurf::silting::GradedDissection;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn direction(b: bool) -> Direction {
    if b {
        Direction::Left
    } else {
        Direction::Right
    }
}

fn silting(seed: u64, max_v: usize, steps: usize) -> (siltsurf::surface::DissectedSurface, GradedDissection) {
    let mut r = rng(seed);
    let s = random_surface(&mut r, max_v);
    let gd = siltsurf::cli::random_silting(&mut r, &s, steps);
    (s, gd)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn surface_reads_back_its_algebra(seed in any::<u64>()) {
        let s = random_surface(&mut rng(seed), 6);
        prop_assert!(s.verify().is_ok());
        prop_assert_eq!(s.dissection_size(), s.n_arcs() as i64);
        prop_assert_eq!(s.read_algebra().canonical_shape(), s.algebra.canonical_shape());
    }

    #[test]
    fn strings_and_curves_correspond(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_surface(&mut r, 5);
        let w = random_arc(&mut r, &s, 8);
        let back = curve_of_string(&s, &string_of_curve(&s, &w)).unwrap();
        prop_assert!(back.same_curve(&w, &s));
        let again = reduce(&s, w.closed, &w.darts).unwrap();
        prop_assert_eq!(again, w);
    }

    #[test]
    fn grading_exists_exactly_at_winding_zero(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_surface(&mut r, 5);
        prop_assert!(grade(&s, &random_arc(&mut r, &s, 8), 0, 0).is_ok());
        if let Some(c) = random_closed(&mut r, &s, 8) {
            prop_assert_eq!(grade(&s, &c, 0, 0).is_ok(), c.winding_number(&s) == 0);
        }
    }

    #[test]
    fn power_commutes_with_shift(seed in any::<u64>(), n in 1usize..=4, k in -3i64..=3) {
        let mut r = rng(seed);
        let s = random_surface(&mut r, 5);
        let x = random_graded(&mut r, &s, 6, 1.0, 1);
        if x.word.closed {
            prop_assert_eq!(power(&x.shift(k), n).unwrap(), power(&x, n).unwrap().shift(k));
        }
    }

    #[test]
    fn hom_tables_are_shift_equivariant(seed in any::<u64>(), a in -3i64..=3, b in -3i64..=3) {
        let mut r = rng(seed);
        let s = random_surface(&mut r, 5);
        let (x, y) = (random_graded(&mut r, &s, 6, 0.2, 2), random_graded(&mut r, &s, 6, 0.2, 2));
        let t = hom_table(&s, &x, &y).unwrap();
        let u = hom_table(&s, &x.shift(a), &y.shift(b)).unwrap();
        prop_assert_eq!(t.total, u.total);
        for (&d, &n) in &u.per_degree {
            prop_assert_eq!(t.get(d + b - a), n);
        }
    }

    #[test]
    fn boundary_records_are_antisymmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_surface(&mut r, 5);
        let (x, y) = (random_arc(&mut r, &s, 6), random_arc(&mut r, &s, 6));
        let there = endpoint_intersections(&s, &x, &y);
        let back = endpoint_intersections(&s, &y, &x);
        if !x.same_curve(&y, &s) {
            for (ea, eb, _) in &there {
                prop_assert!(!back.iter().any(|(fb, fa, _)| fb == eb && fa == ea));
            }
        }
    }

    #[test]
    fn silting_survives_global_shift_and_tilting_implies_silting(seed in any::<u64>(), k in -4i64..=4) {
        let (s, gd) = silting(seed, 5, 6);
        prop_assert!(gd.is_silting(&s));
        let shifted = GradedDissection { arcs: gd.arcs.iter().map(|a| a.shift(k)).collect() };
        prop_assert!(shifted.is_silting(&s));
        let rep = gd.report(&s);
        prop_assert!(!rep.tilting || rep.silting);
    }

    #[test]
    fn grading_sum_is_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_surface(&mut r, 6);
        let (a, b) = (random_arc(&mut r, &s, 5), random_arc(&mut r, &s, 5));
        let simple = self_intersections(&s, &a) == 0 && self_intersections(&s, &b) == 0;
        if simple && !a.same_curve(&b, &s) {
            if let Some(&(ea, eb, _)) = endpoint_intersections(&s, &a, &b).first() {
                let ga = grade(&s, &a, 0, r.gen_range(-3..=3)).unwrap();
                let gb = grade(&s, &b, 0, r.gen_range(-3..=3)).unwrap();
                if let Ok(t) = SurfaceTriangle::from_pair(&s, &ga, ea, &gb, eb) {
                    prop_assert!(verify_triangle(&s, &t).unwrap());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn hom_equals_intersections_and_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_surface(&mut r, 5);
        let (x, y) = (random_graded(&mut r, &s, 8, 0.3, 3), random_graded(&mut r, &s, 8, 0.3, 3));
        let t = hom_table(&s, &x, &y).unwrap();
        prop_assert_eq!(t.total, intersection_number(&s, &x, &y));
        if !same_primitive(&s, &x, &y) {
            let pa = PathAlgebra::new(&s.algebra);
            let dims = hom_dims_in::<Q>(&pa, &s, &x, &y);
            for d in dims.keys().chain(t.per_degree.keys()) {
                prop_assert_eq!(dims.get(d).copied().unwrap_or(0), t.get(*d), "degree {}", d);
            }
        }
    }

    #[test]
    fn complexes_are_differential_and_minimal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_surface(&mut r, 5);
        let pa = PathAlgebra::new(&s.algebra);
        let x = random_graded(&mut r, &s, 8, 0.3, 2);
        let c: Complex<Q> = pa.complex_of(&s, &x);
        prop_assert!(c.check(&pa).is_ok());
        let m = pa.minimize(&c);
        prop_assert_eq!(pa.minimize(&m), m.clone());
        let y = random_graded(&mut r, &s, 6, 0.0, 1);
        let cy: Complex<Q> = pa.complex_of(&s, &y);
        let direct = siltsurf::oracle::HomComplex::new(&pa, &c, &cy).all_dims();
        let minimal = siltsurf::oracle::HomComplex::new(&pa, &m, &cy).all_dims();
        prop_assert_eq!(direct, minimal);
    }

    #[test]
    fn mutation_closure_and_case_shape(seed in any::<u64>(), pick in any::<usize>(), left in any::<bool>()) {
        let (s, gd) = silting(seed, 5, 6);
        let idx = pick % gd.arcs.len();
        let dir = direction(left);
        let (next, ex) = mutate(&s, &gd, idx, dir).unwrap();
        prop_assert!(next.is_silting(&s));
        let (tag, ns) = classify_case(&s, &gd, idx, dir).unwrap();
        prop_assert_eq!(tag, ex.case_tag);
        prop_assert_eq!(ns.len(), ex.middles.len());
        prop_assert!(ex.middles.len() <= 2);
        let (back, _) = mutate(&s, &next, idx, dir.opposite()).unwrap();
        prop_assert_eq!(back.canonical(&s), gd.canonical(&s));
    }

    #[test]
    fn tilting_prediction(seed in any::<u64>(), pick in any::<usize>(), left in any::<bool>()) {
        let s = random_surface(&mut rng(seed), 6);
        let gd = GradedDissection::initial(&s);
        let idx = pick % gd.arcs.len();
        let dir = direction(left);
        let (next, _) = mutate(&s, &gd, idx, dir).unwrap();
        prop_assert_eq!(tilting_preserved(&s, &gd, idx, dir).unwrap(), next.is_tilting(&s).unwrap());
    }

    #[test]
    fn orbit_class_and_image_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_surface(&mut r, 4);
        let g = random_arc(&mut r, &s, 3);
        if g.is_loop(&s) || self_intersections(&s, &g) > 0 {
            return Ok(());
        }
        let gamma = grade(&s, &g, 0, 0).unwrap();
        let zs: Vec<_> = (0..12)
            .map(|_| random_graded(&mut r, &s, 4, 0.0, 1))
            .filter(|x| !x.word.same_curve(&g, &s) && in_z(&s, x, &gamma))
            .collect();
        let words: Vec<_> = zs.iter().map(|x| x.word.clone()).collect();
        let (c, imgs) = project_all(&s, &g, &words).unwrap();
        for (i, x) in zs.iter().enumerate() {
            let class = smoothing_class(&s, &x.word, &g).unwrap();
            let orbit = orbit_of(&s, x, &gamma).unwrap();
            for (j, y) in zs.iter().enumerate() {
                let same_class = class.iter().any(|w| w.same_curve(&y.word, &s));
                let same_image = match (&imgs[i], &imgs[j]) {
                    (Some(a), Some(b)) => c.surface.same_curve(a, b),
                    _ => false,
                };
                let same_orbit = orbit.runs.iter().any(|run| orbit.class[run.member].same_curve(&y.word, &s));
                prop_assert_eq!(same_class, same_image, "class vs image");
                prop_assert_eq!(same_class, same_orbit, "class vs orbit");
            }
        }
    }
}

//! Invariants of the exact arithmetic, permutation and class-algebra layers.
//! Uses only constructed groups and the non-sporadic tables.

mod common;

use std::collections::BTreeMap;

use num_integer::Integer;
use proptest::prelude::*;
use trigen_core::classalg::xi3;
use trigen_core::perm::cycle_type_from_fixpoints;
use trigen_core::{lint_table, xi4, CycloNum, Perm, PermGroup};

use common::*;

const SMALL_TABLES: [&str; 5] = ["a5.ctb", "l2_11.ctb", "11_10.ctb", "u3_3.ctb", "l3_2_2.ctb"];

fn cyclo() -> impl Strategy<Value = CycloNum> {
    (
        prop::sample::select(vec![1u32, 3, 4, 5, 7, 8, 12, 15]),
        prop::collection::vec(-4i64..=4, 15),
        1i64..=3,
    )
        .prop_map(|(n, cs, den)| {
            let mut x = CycloNum::zero();
            for (k, c) in cs.iter().take(n as usize).enumerate() {
                x = &x + &(&CycloNum::from_int(*c) * &CycloNum::root_of_unity(n, k as i64));
            }
            &x / &CycloNum::from_int(den)
        })
}

fn perm(max_degree: usize) -> impl Strategy<Value = Perm> {
    (1..=max_degree)
        .prop_flat_map(|n| Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Perm::from_images(v).unwrap())
}

fn perm_triple(degree: usize) -> impl Strategy<Value = (Perm, Perm, Perm)> {
    let p = || {
        Just((0..degree as u32).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Perm::from_images(v).unwrap())
    };
    (p(), p(), p())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclotomic_field_axioms(a in cyclo(), b in cyclo(), c in cyclo()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &CycloNum::one(), a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inverse().unwrap(), CycloNum::one());
        }
    }

    #[test]
    fn galois_action_is_a_field_automorphism(a in cyclo(), b in cyclo(), k in 1i64..840) {
        prop_assume!(k.gcd(&840) == 1);
        prop_assert_eq!((&a * &b).galois(k), &a.galois(k) * &b.galois(k));
        prop_assert_eq!((&a + &b).galois(k), &a.galois(k) + &b.galois(k));
        prop_assert_eq!(a.conjugate(), a.galois(-1));
        prop_assert_eq!(a.galois(k).conductor(), a.conductor());
    }

    #[test]
    fn complex_embedding_is_multiplicative(a in cyclo(), b in cyclo()) {
        let (x, y) = a.to_complex();
        let (u, v) = b.to_complex();
        let (re, im) = (&a * &b).to_complex();
        prop_assert!((re - (x * u - y * v)).abs() < 1e-6);
        prop_assert!((im - (x * v + y * u)).abs() < 1e-6);
    }

    #[test]
    fn cyclotomic_display_round_trips(a in cyclo()) {
        prop_assert_eq!(CycloNum::parse_any(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn permutation_group_laws((a, b, c) in perm_triple(9)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((&a * &a.inverse()).is_identity());
        for x in 0..9u32 {
            prop_assert_eq!((&a * &b).apply(x), b.apply(a.apply(x)));
        }
        prop_assert_eq!(a.conjugate_by(&b), &(&b.inverse() * &a) * &b);
        prop_assert_eq!(a.conjugate_by(&b).cycle_type(), a.cycle_type());
    }

    #[test]
    fn cycle_type_from_fixed_points_of_powers(a in perm(14)) {
        prop_assert!(a.pow(a.order() as i64).is_identity());
        let o = a.order();
        let fixes: BTreeMap<u64, u64> = (1..=o)
            .filter(|d| o % d == 0)
            .map(|d| (d, a.pow(d as i64).fixed_points() as u64))
            .collect();
        prop_assert_eq!(cycle_type_from_fixpoints(a.degree(), o, &fixes).unwrap(), a.cycle_type());
    }

    #[test]
    fn chain_order_matches_enumeration(a in perm(7), b in perm(7)) {
        let n = a.degree().max(b.degree());
        let widen = |p: &Perm| {
            let mut im = p.images().to_vec();
            im.extend(p.degree() as u32..n as u32);
            Perm::from_images(im).unwrap()
        };
        let gens = vec![widen(&a), widen(&b)];
        let g = PermGroup::new(n, gens.clone()).unwrap();
        let all = enumerate(n, &gens);
        prop_assert_eq!(g.order_u64(), Some(all.len() as u64));
        prop_assert_eq!(g.orbits().len() as u64, burnside_orbits(&all));
        for x in &all {
            prop_assert!(g.contains(x));
        }
    }

    #[test]
    fn random_words_are_members(word in prop::collection::vec((0usize..16, any::<bool>()), 0..40), junk in perm(11)) {
        for (_, g, _) in constructed_groups() {
            let gens = g.generators();
            let mut x = Perm::identity(g.degree());
            for (i, inv) in &word {
                let s = &gens[i % gens.len()];
                x = if *inv { &x * &s.inverse() } else { &x * s };
            }
            prop_assert!(g.contains(&x));
        }
        let m11 = &constructed_groups()[6].1;
        if junk.degree() == 11 {
            let odd = junk.cycle_type().counts.iter().filter(|(l, _)| *l % 2 == 0).map(|(_, m)| m).sum::<usize>() % 2 == 1;
            if odd {
                prop_assert!(!m11.contains(&junk));
            }
        }
    }

    #[test]
    fn structure_constant_symmetries(t in 0usize..SMALL_TABLES.len(), c in prop::array::uniform4(0usize..64)) {
        let tab = table(SMALL_TABLES[t]);
        let k = tab.num_classes();
        let [c1, c2, c3, c4] = c.map(|x| x % k);
        let x = xi3(&tab, c1, c2, c3).unwrap();
        prop_assert_eq!(x, xi3(&tab, c2, c1, c3).unwrap());
        let inv2 = tab.inverse_class(c2).unwrap();
        prop_assert_eq!(
            tab.class_size(c3) * x,
            tab.class_size(c1) * xi3(&tab, c3, inv2, c1).unwrap()
        );
        let left: u64 = (0..k).map(|e| xi3(&tab, c1, c2, e).unwrap() * xi3(&tab, e, c3, c4).unwrap()).sum();
        let right: u64 = (0..k).map(|e| xi3(&tab, c2, c3, e).unwrap() * xi3(&tab, c1, e, c4).unwrap()).sum();
        prop_assert_eq!(left, right);
        prop_assert_eq!(xi4(&tab, c1, c2, c3, c4).unwrap(), left);
    }

    #[test]
    fn structure_constants_are_galois_invariant(t in 0usize..SMALL_TABLES.len(), c in prop::array::uniform3(0usize..64), k in 1i64..200) {
        let tab = table(SMALL_TABLES[t]);
        let n = tab.num_classes();
        let [c1, c2, c3] = c.map(|x| x % n);
        let exponent = tab.classes.iter().fold(1u64, |e, c| e.lcm(&c.element_order));
        prop_assume!((k as u64).gcd(&exponent) == 1);
        let s = |c| tab.power_class(c, k).unwrap();
        prop_assert_eq!(xi3(&tab, s(c1), s(c2), s(c3)).unwrap(), xi3(&tab, c1, c2, c3).unwrap());
    }

    #[test]
    fn perturbed_tables_fail_lint(t in 0usize..SMALL_TABLES.len(), i in 0usize..64, j in 0usize..64, d in 1i64..4) {
        let mut tab = (*table(SMALL_TABLES[t])).clone();
        let k = tab.num_classes();
        let (i, j) = (i % k, j % k);
        tab.irreducibles[i][j] = &tab.irreducibles[i][j] + &CycloNum::from_int(d);
        prop_assert!(!lint_table(&tab).is_empty());
    }
}

#[test]
fn small_tables_pass_lint() {
    for f in SMALL_TABLES {
        assert_eq!(lint_table(&table(f)), vec![], "{f}");
    }
}

#[test]
fn constructed_group_orders() {
    for (name, g, order) in constructed_groups() {
        assert_eq!(g.order_u64(), Some(order), "{name}");
        assert_eq!(
            enumerate(g.degree(), g.generators()).len() as u64,
            order,
            "{name}"
        );
    }
    for (f, order) in [("a5.prm", 60), ("l2_11.prm", 660), ("l2_11_12.prm", 660)] {
        let g = prm_group(f);
        assert_eq!(g.order_u64(), Some(order), "{f}");
        assert_eq!(
            enumerate(g.degree(), g.generators()).len() as u64,
            order,
            "{f}"
        );
    }
}

#[test]
fn burnside_counts_agree_with_class_walks() {
    for (name, g, order) in constructed_groups()
        .into_iter()
        .filter(|(_, _, o)| *o <= 200)
    {
        let all = enumerate(g.degree(), g.generators());
        assert_eq!(g.orbits().len() as u64, burnside_orbits(&all), "{name}");
        let mut seen = std::collections::HashSet::new();
        let mut classes = 0;
        for x in &all {
            if seen.contains(x) {
                continue;
            }
            let w = g.class_walk(x, 10_000, true).unwrap();
            seen.extend(w.elements);
            classes += 1;
        }
        assert_eq!(seen.len() as u64, order, "{name}");
        assert_eq!(classes, burnside_classes(&all), "{name}");
    }
}

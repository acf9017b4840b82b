//! Helpers shared by the property suite and the acceptance harness. Nothing
//! here reads the J1 or J2 data files.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};
use std::path::PathBuf;
use std::sync::Arc;

use trigen_core::perm::parse_prm;
use trigen_core::{parse_table, CharacterTable, Perm, PermGroup};

pub fn repo_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

pub fn table(name: &str) -> Arc<CharacterTable> {
    let src = std::fs::read_to_string(repo_path(&format!("data/{name}"))).unwrap();
    Arc::new(parse_table(&src).unwrap())
}

pub fn prm_group(name: &str) -> Arc<PermGroup> {
    let src = std::fs::read_to_string(repo_path(&format!("data/{name}"))).unwrap();
    let (n, gens) = parse_prm(&src).unwrap();
    Arc::new(PermGroup::new(n, gens).unwrap())
}

pub fn cycles(degree: usize, cs: &[&[u32]]) -> Perm {
    Perm::from_cycles(degree, cs).unwrap()
}

/// `x ↦ a·x + b (mod p)` on the points `1..=p`.
pub fn affine(p: u32, a: u32, b: u32) -> Perm {
    let images = (0..p).map(|x| (a * x + b) % p).collect();
    Perm::from_images(images).unwrap()
}

/// Small groups with known orders, built without any data file.
pub fn constructed_groups() -> Vec<(&'static str, PermGroup, u64)> {
    let g = |n: usize, gens: Vec<Perm>| PermGroup::new(n, gens).unwrap();
    vec![
        (
            "S4",
            g(4, vec![cycles(4, &[&[1, 2, 3, 4]]), cycles(4, &[&[1, 2]])]),
            24,
        ),
        (
            "A5",
            g(
                5,
                vec![cycles(5, &[&[1, 2, 3, 4, 5]]), cycles(5, &[&[1, 2, 3]])],
            ),
            60,
        ),
        (
            "S4xS2",
            g(
                6,
                vec![
                    cycles(6, &[&[1, 2, 3, 4]]),
                    cycles(6, &[&[1, 2]]),
                    cycles(6, &[&[5, 6]]),
                ],
            ),
            48,
        ),
        (
            "11:10",
            g(11, vec![affine(11, 1, 1), affine(11, 2, 0)]),
            110,
        ),
        ("19:6", g(19, vec![affine(19, 1, 1), affine(19, 8, 0)]), 114),
        (
            "L2(7)",
            g(
                7,
                vec![
                    cycles(7, &[&[1, 2, 3, 4, 5, 6, 7]]),
                    cycles(7, &[&[2, 3], &[4, 7]]),
                ],
            ),
            168,
        ),
        (
            "M11",
            g(
                11,
                vec![
                    cycles(11, &[&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]]),
                    cycles(11, &[&[3, 7, 11, 8], &[4, 10, 5, 6]]),
                ],
            ),
            7920,
        ),
    ]
}

/// Every element of `<gens>` by breadth-first closure.
pub fn enumerate(degree: usize, gens: &[Perm]) -> HashSet<Perm> {
    let id = Perm::identity(degree);
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = &x * s;
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Number of orbits by counting fixed points over all elements.
pub fn burnside_orbits(elements: &HashSet<Perm>) -> u64 {
    let total: u64 = elements.iter().map(|g| g.fixed_points() as u64).sum();
    assert_eq!(total % elements.len() as u64, 0);
    total / elements.len() as u64
}

/// Number of conjugacy classes as the average centralizer order.
pub fn burnside_classes(elements: &HashSet<Perm>) -> u64 {
    let els: Vec<&Perm> = elements.iter().collect();
    let commuting = els
        .iter()
        .flat_map(|a| els.iter().map(move |b| (*a, *b)))
        .filter(|(a, b)| (*a * *b) == (*b * *a))
        .count() as u64;
    commuting / els.len() as u64
}

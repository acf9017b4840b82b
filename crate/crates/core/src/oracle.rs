//! Brute-force counts taken directly from group elements, used to check the
//! character-table formulas.
//!
//! Class labels are attached to concrete permutations by [`identify_classes`].
//! Classes that share element order and class size are told apart with the
//! table's power maps: the first representative found in such a family takes
//! the first label consistent with the already labelled classes of smaller
//! order, and its powers receive the labels the power maps dictate. A family
//! left with two or more non-conjugate candidate labels is reported as
//! ambiguous.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;

use crate::chartable::CharacterTable;
use crate::classalg::{ClassAlgError, FusionMap};
use crate::perm::{ClassWalk, ElementKey, Perm, PermError, PermGroup, StabChain};

pub const DEFAULT_SEED: u64 = 0x5eed_1a7e;
pub const DEFAULT_CLASS_BOUND: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("group order {group} does not match table order {table}")]
    OrderMismatch { group: String, table: u64 },
    #[error("ambiguous class identification: {0}")]
    Ambiguous(String),
    #[error("group and table disagree: {0}")]
    Mismatch(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("element lies in no identified class")]
    Unclassified,
    #[error("embedding: {0}")]
    Embedding(String),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Fusion(#[from] ClassAlgError),
}

#[derive(Debug, Clone, Copy)]
pub struct IdentifyOptions {
    pub seed: u64,
    /// Largest class that may be enumerated.
    pub class_bound: usize,
    /// Random elements drawn before giving up on unseen classes.
    pub max_samples: usize,
}

impl Default for IdentifyOptions {
    fn default() -> Self {
        IdentifyOptions {
            seed: DEFAULT_SEED,
            class_bound: DEFAULT_CLASS_BOUND,
            max_samples: 20_000,
        }
    }
}

type Lazy<T> = OnceLock<Result<Arc<T>, OracleError>>;

/// Character-table labels bound to representatives in a permutation group.
#[derive(Debug)]
pub struct ClassIdentification {
    group: Arc<PermGroup>,
    table: Arc<CharacterTable>,
    reps: Vec<Perm>,
    class_bound: usize,
    keys: Vec<Lazy<HashSet<ElementKey>>>,
    elements: Vec<Lazy<Vec<Perm>>>,
    /// table classes grouped by element order
    by_order: HashMap<u64, Vec<usize>>,
}

impl ClassIdentification {
    pub fn group(&self) -> &Arc<PermGroup> {
        &self.group
    }

    pub fn table(&self) -> &Arc<CharacterTable> {
        &self.table
    }

    pub fn representative(&self, class: usize) -> &Perm {
        &self.reps[class]
    }

    pub fn representatives(&self) -> &[Perm] {
        &self.reps
    }

    pub fn class_index(&self, name: &str) -> Result<usize, OracleError> {
        self.table
            .class_index(name)
            .ok_or_else(|| OracleError::UnknownClass(name.to_string()))
    }

    fn walk(&self, class: usize, keep: bool) -> Result<ClassWalk, OracleError> {
        let w = self
            .group
            .class_walk(&self.reps[class], self.class_bound, keep)?;
        let expected = self.table.class_size(class);
        if w.len() as u64 != expected {
            return Err(OracleError::Mismatch(format!(
                "class {} has {} elements, table says {expected}",
                self.table.class_name(class),
                w.len()
            )));
        }
        Ok(w)
    }

    /// Keys of every element of `class`, enumerated once.
    pub fn class_keys(&self, class: usize) -> Result<Arc<HashSet<ElementKey>>, OracleError> {
        self.keys[class]
            .get_or_init(|| self.walk(class, false).map(|w| Arc::new(w.keys)))
            .clone()
    }

    /// Every element of `class`, enumerated once.
    pub fn class_elements(&self, class: usize) -> Result<Arc<Vec<Perm>>, OracleError> {
        self.elements[class]
            .get_or_init(|| {
                let w = self.walk(class, true)?;
                let _ = self.keys[class].set(Ok(Arc::new(w.keys)));
                Ok(Arc::new(w.elements))
            })
            .clone()
    }

    /// Table class containing `x`, a member of the group.
    pub fn class_of(&self, x: &Perm) -> Result<usize, OracleError> {
        let bucket = self
            .by_order
            .get(&x.order())
            .ok_or(OracleError::Unclassified)?;
        if let [only] = bucket.as_slice() {
            return Ok(*only);
        }
        let key = self.group.element_key(x);
        for &c in bucket {
            if self.class_keys(c)?.contains(&key) {
                return Ok(c);
            }
        }
        Err(OracleError::Unclassified)
    }

    /// Enumerates every class and checks its size against the table.
    pub fn verify_class_sizes(&self) -> Result<(), OracleError> {
        for c in 0..self.reps.len() {
            self.class_keys(c)?;
        }
        Ok(())
    }
}

struct Found {
    rep: Perm,
    order: u64,
    keys: Option<HashSet<ElementKey>>,
}

impl Found {
    fn contains(&self, g: &PermGroup, x: &Perm) -> bool {
        match &self.keys {
            Some(k) => k.contains(&g.element_key(x)),
            None => x.order() == self.order,
        }
    }

    fn size(&self) -> Option<u64> {
        self.keys.as_ref().map(|k| k.len() as u64)
    }
}

pub fn identify_classes(
    g: Arc<PermGroup>,
    t: Arc<CharacterTable>,
) -> Result<ClassIdentification, OracleError> {
    identify_classes_with(g, t, IdentifyOptions::default())
}

pub fn identify_classes_with(
    g: Arc<PermGroup>,
    t: Arc<CharacterTable>,
    opts: IdentifyOptions,
) -> Result<ClassIdentification, OracleError> {
    let order = g.order();
    if order != BigUint::from(t.group_order) {
        return Err(OracleError::OrderMismatch {
            group: order.to_string(),
            table: t.group_order,
        });
    }
    let mut by_order: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, c) in t.classes.iter().enumerate() {
        by_order.entry(c.element_order).or_default().push(i);
    }

    // Collect one concrete class per table class, keyed by element order.
    let mut found: BTreeMap<u64, Vec<Found>> = BTreeMap::new();
    let complete = |found: &BTreeMap<u64, Vec<Found>>| {
        by_order
            .iter()
            .all(|(o, cs)| found.get(o).map_or(0, Vec::len) == cs.len())
    };
    let mut samples = g.random_elements(opts.seed);
    let mut drawn = 0;
    while !complete(&found) {
        if drawn == opts.max_samples {
            let missing: Vec<String> = by_order
                .iter()
                .filter(|(o, cs)| found.get(o).map_or(0, Vec::len) < cs.len())
                .map(|(o, _)| format!("order {o}"))
                .collect();
            return Err(OracleError::Mismatch(format!(
                "no element found for {} after {drawn} samples",
                missing.join(", ")
            )));
        }
        drawn += 1;
        let x = samples.next().expect("endless stream");
        let ox = x.order();
        let mut y = Perm::identity(g.degree());
        for _ in 0..ox {
            let o = y.order();
            let Some(bucket) = by_order.get(&o) else {
                return Err(OracleError::Mismatch(format!(
                    "group has elements of order {o}, table does not"
                )));
            };
            let list = found.entry(o).or_default();
            if list.len() < bucket.len() && !list.iter().any(|f| f.contains(&g, &y)) {
                let keys = if bucket.len() > 1 {
                    Some(g.class_walk(&y, opts.class_bound, false)?.keys)
                } else {
                    None
                };
                list.push(Found {
                    rep: y.clone(),
                    order: o,
                    keys,
                });
            }
            y = y.then(&x);
        }
    }

    let mut assigned: Vec<Option<usize>> = vec![None; t.num_classes()];
    let mut reps: Vec<Option<Perm>> = vec![None; t.num_classes()];
    // index into `found[order]` for each table class
    let lookup = |found: &BTreeMap<u64, Vec<Found>>, x: &Perm| -> Option<usize> {
        found
            .get(&x.order())?
            .iter()
            .position(|f| f.contains(&g, x))
    };

    for (&o, list) in &found {
        let bucket = &by_order[&o];
        if let [only] = bucket.as_slice() {
            assigned[*only] = Some(0);
            reps[*only] = Some(list[0].rep.clone());
            continue;
        }
        // class sizes must agree as multisets
        let mut have: Vec<u64> = list.iter().map(|f| f.size().unwrap()).collect();
        let mut want: Vec<u64> = bucket.iter().map(|&c| t.class_size(c)).collect();
        have.sort_unstable();
        want.sort_unstable();
        if have != want {
            return Err(OracleError::Mismatch(format!(
                "classes of order {o} have sizes {have:?}, table says {want:?}"
            )));
        }
        let mut owner: Vec<Option<usize>> = vec![None; list.len()];
        while let Some(k) = owner.iter().position(Option::is_none) {
            let rep = &list[k].rep;
            let size = list[k].size().unwrap();
            let candidates: Vec<usize> = bucket
                .iter()
                .copied()
                .filter(|&c| reps[c].is_none() && t.class_size(c) == size)
                .filter(|&c| {
                    lower_powers_agree(&t, c, rep, |x| {
                        let j = lookup(&found, x)?;
                        let oo = x.order();
                        by_order[&oo]
                            .iter()
                            .copied()
                            .find(|&tc| assigned[tc] == Some(j) && reps[tc].is_some())
                    })
                })
                .collect();
            let Some(&first) = candidates.first() else {
                return Err(OracleError::Ambiguous(format!(
                    "no label of order {o} fits representative {rep}"
                )));
            };
            let galois: HashSet<usize> = galois_family(&t, first).into_iter().collect();
            if candidates.iter().any(|c| !galois.contains(c)) {
                let names: Vec<&str> = candidates.iter().map(|&c| t.class_name(c)).collect();
                return Err(OracleError::Ambiguous(format!(
                    "classes {} cannot be told apart",
                    names.join(", ")
                )));
            }
            for e in (1..o).filter(|e| e.gcd(&o) == 1) {
                let Some(label) = t.power_class(first, e as i64) else {
                    return Err(OracleError::Ambiguous(format!(
                        "power maps of {} are incomplete",
                        t.class_name(first)
                    )));
                };
                let y = rep.pow(e as i64);
                let j = list.iter().position(|f| f.contains(&g, &y)).unwrap();
                match (owner[j], reps[label].is_some()) {
                    (None, false) => {
                        owner[j] = Some(label);
                        assigned[label] = Some(j);
                        reps[label] = Some(y);
                    }
                    (Some(l), _) if l == label => {}
                    _ => {
                        return Err(OracleError::Ambiguous(format!(
                            "power maps of {} contradict the group",
                            t.class_name(first)
                        )))
                    }
                }
            }
        }
    }

    let reps: Vec<Perm> = reps
        .into_iter()
        .map(|r| r.expect("every class labelled"))
        .collect();
    let n = reps.len();
    let id = ClassIdentification {
        group: g,
        table: t,
        reps,
        class_bound: opts.class_bound,
        keys: (0..n).map(|_| OnceLock::new()).collect(),
        elements: (0..n).map(|_| OnceLock::new()).collect(),
        by_order,
    };
    // seed the key sets already computed during the search
    for (c, slot) in assigned.iter().enumerate() {
        let o = id.table.classes[c].element_order;
        if let Some(keys) = slot.and_then(|j| found.get_mut(&o).unwrap()[j].keys.take()) {
            let _ = id.keys[c].set(Ok(Arc::new(keys)));
        }
    }
    // final check of every stored power map against the representatives
    for c in 0..n {
        for (&p, &img) in &id.table.classes[c].power_maps {
            let y = id.reps[c].pow(p as i64);
            if id.class_of(&y)? != img {
                return Err(OracleError::Ambiguous(format!(
                    "{}^{p} should lie in {}",
                    id.table.class_name(c),
                    id.table.class_name(img)
                )));
            }
        }
    }
    Ok(id)
}

/// Whether `rep^p` lands in the class the table prescribes for every prime
/// `p` dividing the order, when that class is already labelled.
fn lower_powers_agree(
    t: &CharacterTable,
    class: usize,
    rep: &Perm,
    classify: impl Fn(&Perm) -> Option<usize>,
) -> bool {
    let o = t.classes[class].element_order;
    t.classes[class]
        .power_maps
        .iter()
        .filter(|(&p, _)| o.is_multiple_of(p))
        .all(|(&p, &img)| match classify(&rep.pow(p as i64)) {
            Some(c) => c == img,
            None => true,
        })
}

/// Classes reachable from `class` by coprime powers.
fn galois_family(t: &CharacterTable, class: usize) -> Vec<usize> {
    let o = t.classes[class].element_order;
    let mut out: Vec<usize> = (1..=o.max(1))
        .filter(|e| e.gcd(&o) == 1)
        .filter_map(|e| t.power_class(class, e as i64))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn count_pairs(
    id: &ClassIdentification,
    c1: usize,
    c2: usize,
    c: &Perm,
    require_generation: bool,
) -> Result<u64, OracleError> {
    let g = &id.group;
    if !g.contains(c) {
        return Err(PermError::NotMember.into());
    }
    let first = id.class_elements(c1)?;
    let second = id.class_keys(c2)?;
    let order = g.order();
    let transitive = g.is_transitive();
    let n = g.degree();
    let count = first
        .par_iter()
        .filter(|a| {
            let b = a.inverse().then(c);
            if !second.contains(&g.element_key(&b)) {
                return false;
            }
            if !require_generation {
                return true;
            }
            let pair = [(*a).clone(), b];
            if transitive && !crate::perm::is_transitive(n, &pair) {
                return false;
            }
            StabChain::build_until(n, &pair, Some(&order)).1
        })
        .count();
    Ok(count as u64)
}

/// Number of pairs `(a, b)` with `a ∈ C1`, `b ∈ C2` and `ab = c` for the
/// fixed representative `c` of `C3`.
pub fn xi3_oracle(
    id: &ClassIdentification,
    c1: usize,
    c2: usize,
    c3: usize,
) -> Result<u64, OracleError> {
    count_pairs(id, c1, c2, id.representative(c3), false)
}

/// As [`xi3_oracle`], counting only pairs that generate the whole group.
pub fn xi3_star_oracle(
    id: &ClassIdentification,
    c1: usize,
    c2: usize,
    c3: usize,
) -> Result<u64, OracleError> {
    count_pairs(id, c1, c2, id.representative(c3), true)
}

/// [`xi3_oracle`] with an explicit product element `c`.
pub fn xi3_oracle_at(
    id: &ClassIdentification,
    c1: usize,
    c2: usize,
    c: &Perm,
) -> Result<u64, OracleError> {
    count_pairs(id, c1, c2, c, false)
}

/// [`xi3_star_oracle`] with an explicit product element `c`.
pub fn xi3_star_oracle_at(
    id: &ClassIdentification,
    c1: usize,
    c2: usize,
    c: &Perm,
) -> Result<u64, OracleError> {
    count_pairs(id, c1, c2, c, true)
}

/// In a transitive action whose point stabilizer is `H`, the number of
/// conjugates of `H` containing `c` is the number of points `c` fixes.
pub fn copies_containing(c: &Perm) -> u64 {
    c.fixed_points() as u64
}

/// Fusion of the classes of `H` into `G`, given the images in `G` of the
/// generators of `H`'s permutation group.
///
/// Walks all of `H` alongside the images, so the embedding is checked to be
/// an injective homomorphism on the way.
pub fn infer_fusion(
    sub: &ClassIdentification,
    sup: &ClassIdentification,
    embedding: &[Perm],
) -> Result<FusionMap, OracleError> {
    let h = sub.group();
    if embedding.len() != h.generators().len() {
        return Err(OracleError::Embedding(format!(
            "{} generator images for {} generators",
            embedding.len(),
            h.generators().len()
        )));
    }
    for e in embedding {
        if !sup.group().contains(e) {
            return Err(OracleError::Embedding(format!("{e} is not in the group")));
        }
    }
    let mut image: HashMap<Perm, Perm> = HashMap::new();
    let mut queue = vec![Perm::identity(h.degree())];
    image.insert(queue[0].clone(), Perm::identity(sup.group().degree()));
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head].clone();
        head += 1;
        let fx = image[&x].clone();
        for (s, e) in h.generators().iter().zip(embedding) {
            let y = x.then(s);
            let fy = fx.then(e);
            match image.get(&y) {
                Some(prev) if *prev != fy => {
                    return Err(OracleError::Embedding(
                        "generator images do not define a homomorphism".into(),
                    ))
                }
                Some(_) => {}
                None => {
                    image.insert(y.clone(), fy);
                    queue.push(y);
                }
            }
        }
    }
    let distinct: HashSet<&Perm> = image.values().collect();
    if distinct.len() != image.len() {
        return Err(OracleError::Embedding("embedding is not injective".into()));
    }
    let map = sub
        .representatives()
        .iter()
        .map(|r| sup.class_of(&image[r]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FusionMap::new(
        sub.table().clone(),
        sup.table().clone(),
        map,
    )?)
}

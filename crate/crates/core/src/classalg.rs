//! Class-algebra structure constants.
//!
//! For classes `C_1, …, C_s` of `G` and a fixed `z ∈ C_s`, the number of tuples
//! `(x_1, …, x_{s-1}) ∈ C_1 × … × C_{s-1}` with `x_1 ⋯ x_{s-1} = z` is
//!
//! ```text
//!   |C_1| ⋯ |C_{s-1}| / |G| · Σ_χ χ(x_1) ⋯ χ(x_{s-1}) · conj(χ(z)) / χ(1)^{s-2}
//! ```
//!
//! evaluated here exactly over [`CycloNum`].

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::chartable::{nonneg_integer, CharacterTable};
use crate::cyclotomic::CycloNum;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassAlgError {
    #[error("class index {0} out of range")]
    BadIndex(usize),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("class tuples have 3 or 4 entries, got {0}")]
    BadTupleLength(usize),
    #[error("structure constant for {tuple} evaluated to {value}, not a nonnegative integer")]
    NotIntegral { tuple: String, value: String },
    #[error("fusion mismatch: {0}")]
    FusionMismatch(String),
}

/// An ordered tuple of 3 or 4 classes of one table; the last entry holds the
/// fixed product element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassTuple {
    entries: Vec<usize>,
}

impl ClassTuple {
    pub fn new(t: &CharacterTable, entries: Vec<usize>) -> Result<ClassTuple, ClassAlgError> {
        if !(3..=4).contains(&entries.len()) {
            return Err(ClassAlgError::BadTupleLength(entries.len()));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e >= t.num_classes()) {
            return Err(ClassAlgError::BadIndex(bad));
        }
        Ok(ClassTuple { entries })
    }

    pub fn from_names<S: AsRef<str>>(
        t: &CharacterTable,
        names: &[S],
    ) -> Result<ClassTuple, ClassAlgError> {
        let entries = names
            .iter()
            .map(|n| {
                t.class_index(n.as_ref())
                    .ok_or_else(|| ClassAlgError::UnknownClass(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        ClassTuple::new(t, entries)
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn target(&self) -> usize {
        *self.entries.last().unwrap()
    }

    pub fn factors(&self) -> &[usize] {
        &self.entries[..self.entries.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn names(&self, t: &CharacterTable) -> Vec<String> {
        self.entries
            .iter()
            .map(|&e| t.class_name(e).to_string())
            .collect()
    }
}

/// Class fusion from a subgroup `H` into `G`.
#[derive(Debug, Clone)]
pub struct FusionMap {
    pub sub_table: Arc<CharacterTable>,
    pub super_table: Arc<CharacterTable>,
    map: Vec<usize>,
}

impl FusionMap {
    pub fn new(
        sub_table: Arc<CharacterTable>,
        super_table: Arc<CharacterTable>,
        map: Vec<usize>,
    ) -> Result<FusionMap, ClassAlgError> {
        if map.len() != sub_table.num_classes() {
            return Err(ClassAlgError::FusionMismatch(format!(
                "{} images for {} classes of {}",
                map.len(),
                sub_table.num_classes(),
                sub_table.group_name
            )));
        }
        if map[0] != 0 {
            return Err(ClassAlgError::FusionMismatch(
                "identity must fuse to the identity".into(),
            ));
        }
        if !super_table
            .group_order
            .is_multiple_of(sub_table.group_order)
        {
            return Err(ClassAlgError::FusionMismatch(format!(
                "|{}| = {} does not divide |{}| = {}",
                sub_table.group_name,
                sub_table.group_order,
                super_table.group_name,
                super_table.group_order
            )));
        }
        for (h, &g) in map.iter().enumerate() {
            let Some(gc) = super_table.classes.get(g) else {
                return Err(ClassAlgError::BadIndex(g));
            };
            let hc = &sub_table.classes[h];
            if hc.element_order != gc.element_order {
                return Err(ClassAlgError::FusionMismatch(format!(
                    "{} (order {}) cannot fuse to {} (order {})",
                    hc.name, hc.element_order, gc.name, gc.element_order
                )));
            }
        }
        Ok(FusionMap {
            sub_table,
            super_table,
            map,
        })
    }

    /// Builds a fusion from `(H-class, G-class)` name pairs covering every
    /// class of `H`.
    pub fn from_names<S: AsRef<str>>(
        sub_table: Arc<CharacterTable>,
        super_table: Arc<CharacterTable>,
        pairs: &[(S, S)],
    ) -> Result<FusionMap, ClassAlgError> {
        let mut map = vec![usize::MAX; sub_table.num_classes()];
        for (h, g) in pairs {
            let hi = sub_table
                .class_index(h.as_ref())
                .ok_or_else(|| ClassAlgError::UnknownClass(h.as_ref().to_string()))?;
            let gi = super_table
                .class_index(g.as_ref())
                .ok_or_else(|| ClassAlgError::UnknownClass(g.as_ref().to_string()))?;
            map[hi] = gi;
        }
        if let Some(h) = map.iter().position(|&g| g == usize::MAX) {
            return Err(ClassAlgError::FusionMismatch(format!(
                "no image given for {}",
                sub_table.class_name(h)
            )));
        }
        FusionMap::new(sub_table, super_table, map)
    }

    pub fn image(&self, h_class: usize) -> usize {
        self.map[h_class]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn preimages(&self, g_class: usize) -> Vec<usize> {
        (0..self.map.len())
            .filter(|&h| self.map[h] == g_class)
            .collect()
    }
}

impl fmt::Display for FusionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .map
            .iter()
            .enumerate()
            .map(|(h, &g)| {
                format!(
                    "{}:{}",
                    self.sub_table.class_name(h),
                    self.super_table.class_name(g)
                )
            })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

fn check(t: &CharacterTable, classes: &[usize]) -> Result<(), ClassAlgError> {
    match classes.iter().find(|&&c| c >= t.num_classes()) {
        Some(&c) => Err(ClassAlgError::BadIndex(c)),
        None => Ok(()),
    }
}

/// Exact value of the structure-constant sum for any number (≥ 2) of classes,
/// before the integrality check.
pub fn structure_constant_value(t: &CharacterTable, classes: &[usize]) -> CycloNum {
    let s = classes.len();
    assert!(s >= 2, "need at least two classes");
    let (target, factors) = classes.split_last().unwrap();
    let mut sum = CycloNum::zero();
    for chi in &t.irreducibles {
        let deg = &chi[0];
        let mut term = chi[*target].conjugate();
        for &c in factors {
            term = &term * &chi[c];
            if term.is_zero() {
                break;
            }
        }
        if term.is_zero() {
            continue;
        }
        for _ in 2..s {
            term = &term / deg;
        }
        sum = &sum + &term;
    }
    let mut scale = BigInt::from(1);
    for &c in factors {
        scale *= BigInt::from(t.class_size(c));
    }
    let factor = BigRational::new(scale, BigInt::from(t.group_order));
    sum.scale(&factor)
}

fn integral(t: &CharacterTable, classes: &[usize]) -> Result<u64, ClassAlgError> {
    let v = structure_constant_value(t, classes);
    nonneg_integer(&v)
        .and_then(|n| n.to_u64())
        .ok_or_else(|| ClassAlgError::NotIntegral {
            tuple: classes
                .iter()
                .map(|&c| t.class_name(c))
                .collect::<Vec<_>>()
                .join(","),
            value: v.to_string(),
        })
}

/// Number of pairs `(a, b) ∈ C1 × C2` with `ab = c` for a fixed `c ∈ C3`.
pub fn xi3(t: &CharacterTable, c1: usize, c2: usize, c3: usize) -> Result<u64, ClassAlgError> {
    check(t, &[c1, c2, c3])?;
    integral(t, &[c1, c2, c3])
}

/// Number of triples `(a, b, c) ∈ C1 × C2 × C3` with `abc = d` for a fixed
/// `d ∈ C4`.
pub fn xi4(
    t: &CharacterTable,
    c1: usize,
    c2: usize,
    c3: usize,
    c4: usize,
) -> Result<u64, ClassAlgError> {
    check(t, &[c1, c2, c3, c4])?;
    integral(t, &[c1, c2, c3, c4])
}

/// [`xi3`] or [`xi4`] depending on the tuple length.
pub fn xi(t: &CharacterTable, tuple: &ClassTuple) -> Result<u64, ClassAlgError> {
    integral(t, tuple.entries())
}

/// The part of the structure constant realised inside a subgroup `H` that
/// contains the fixed element, whose `H`-class is `target_in_h`: the sum of
/// `ξ_H` over every tuple of `H`-classes fusing to the given `G`-classes.
pub fn sigma_h(
    f: &FusionMap,
    g_tuple: &ClassTuple,
    target_in_h: usize,
) -> Result<u64, ClassAlgError> {
    let h = &f.sub_table;
    if target_in_h >= h.num_classes() {
        return Err(ClassAlgError::BadIndex(target_in_h));
    }
    if f.image(target_in_h) != g_tuple.target() {
        return Err(ClassAlgError::FusionMismatch(format!(
            "{} of {} fuses to {}, not to the target class {}",
            h.class_name(target_in_h),
            h.group_name,
            f.super_table.class_name(f.image(target_in_h)),
            f.super_table.class_name(g_tuple.target())
        )));
    }
    let pre: Vec<Vec<usize>> = g_tuple.factors().iter().map(|&g| f.preimages(g)).collect();
    if pre.iter().any(Vec::is_empty) {
        return Ok(0);
    }
    let mut total = 0u64;
    let mut idx = vec![0usize; pre.len()];
    loop {
        let mut classes: Vec<usize> = idx.iter().zip(&pre).map(|(&i, p)| p[i]).collect();
        classes.push(target_in_h);
        total += integral(h, &classes)?;
        // odometer over the preimage choices
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(total);
            }
            idx[pos] += 1;
            if idx[pos] < pre[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Checks that every irreducible character of `G`, restricted to `H` through
/// the fusion, is a nonnegative integer combination of irreducibles of `H`.
pub fn check_restrictions(f: &FusionMap) -> Result<(), ClassAlgError> {
    let h = &f.sub_table;
    let g = &f.super_table;
    let sizes: Vec<BigRational> = (0..h.num_classes())
        .map(|c| BigRational::from_integer(BigInt::from(h.class_size(c))))
        .collect();
    let inv_order = BigRational::new(BigInt::from(1), BigInt::from(h.group_order));
    for chi in &g.irreducibles {
        let restricted: Vec<&CycloNum> = f.map.iter().map(|&gc| &chi[gc]).collect();
        for (j, psi) in h.irreducibles.iter().enumerate() {
            let mut sum = CycloNum::zero();
            for (c, r) in restricted.iter().enumerate() {
                sum = &sum + &(*r * &psi[c].conjugate()).scale(&sizes[c]);
            }
            let m = sum.scale(&inv_order);
            if nonneg_integer(&m).is_none() {
                return Err(ClassAlgError::FusionMismatch(format!(
                    "restriction of a degree-{} character of {} has multiplicity {m} on irreducible {} of {}",
                    chi[0],
                    g.group_name,
                    j + 1,
                    h.group_name
                )));
            }
        }
    }
    Ok(())
}

/// Number of conjugates of `H` containing a fixed element of `g_class`: the
/// permutation character of `G` on the cosets of `H`, computed as
/// `|C_G(c)| · |c^G ∩ H| / |H|`.
pub fn copies_from_fusion(f: &FusionMap, g_class: usize) -> Result<u64, ClassAlgError> {
    let h = &f.sub_table;
    let meet: u64 = f.preimages(g_class).iter().map(|&c| h.class_size(c)).sum();
    let cent = f.super_table.classes[g_class].centralizer_order;
    let num = cent as u128 * meet as u128;
    if !num.is_multiple_of(h.group_order as u128) {
        return Err(ClassAlgError::FusionMismatch(format!(
            "permutation character of {} at {} is not an integer",
            h.group_name,
            f.super_table.class_name(g_class)
        )));
    }
    Ok((num / h.group_order as u128) as u64)
}

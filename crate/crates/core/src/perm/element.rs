use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_integer::Integer;

use super::PermError;

/// A permutation of `0..n`, stored as its image array.
///
/// Products compose left to right: `(a * b)(x) = b(a(x))`, i.e. apply `a`
/// first, then `b`. This is the only place the convention is fixed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Perm, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(PermError::NotBijection);
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation from 1-based cycles, e.g. `&[&[1, 2, 3], &[4, 5]]`.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Perm, PermError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cyc in cycles {
            for (i, &p) in cyc.iter().enumerate() {
                let q = cyc[(i + 1) % cyc.len()];
                if p == 0 || q == 0 || p as usize > degree || q as usize > degree {
                    return Err(PermError::PointOutOfRange(p.max(q) as usize));
                }
                if touched[p as usize - 1] {
                    return Err(PermError::NotBijection);
                }
                touched[p as usize - 1] = true;
                images[p as usize - 1] = q - 1;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, point: u32) -> u32 {
        self.images[point as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self
                .images
                .iter()
                .map(|&x| other.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { images: inv }
    }

    /// `s^-1 · self · s`, the conjugate moving the cycle `(… x y …)` to
    /// `(… s(x) s(y) …)`.
    pub fn conjugate_by(&self, s: &Perm) -> Perm {
        let mut out = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            out[s.images[i] as usize] = s.images[x as usize];
        }
        Perm { images: out }
    }

    /// `self^k` by repeated squaring; negative `k` inverts first.
    pub fn pow(&self, k: i64) -> Perm {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.then(&base);
            }
        }
        acc
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut p = start as u32;
            while !seen[p as usize] {
                seen[p as usize] = true;
                cyc.push(p);
                p = self.images[p as usize];
            }
            out.push(cyc);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut counts = BTreeMap::new();
        for c in self.cycles() {
            *counts.entry(c.len()).or_insert(0) += 1;
        }
        CycleType {
            degree: self.degree(),
            counts,
        }
    }

    /// Least common multiple of the cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycle_type()
            .counts
            .keys()
            .fold(1u64, |acc, &l| acc.lcm(&(l as u64)))
    }

    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &x)| *i as u32 == x)
            .count()
    }

    /// Smallest point moved, if any.
    pub fn first_moved(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &x)| *i as u32 != x)
            .map(|(i, _)| i as u32)
    }
}

impl Mul for &Perm {
    type Output = Perm;
    fn mul(self, rhs: &Perm) -> Perm {
        self.then(rhs)
    }
}

/// Cycle notation with 1-based points; the identity prints as `()`.
impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for c in self.cycles() {
            if c.len() < 2 {
                continue;
            }
            any = true;
            let pts: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", pts.join(","))?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{self}")
    }
}

/// Multiset of cycle lengths of a permutation of `degree` points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleType {
    pub degree: usize,
    /// cycle length -> number of cycles of that length
    pub counts: BTreeMap<usize, usize>,
}

impl CycleType {
    pub fn num_cycles(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn fixed_points(&self) -> usize {
        self.counts.get(&1).copied().unwrap_or(0)
    }

    /// Parses the exponent notation `1^20 2^40`; a bare `3` means `3^1`.
    pub fn parse(s: &str) -> Option<CycleType> {
        let mut counts = BTreeMap::new();
        for tok in s.split_whitespace() {
            let (l, m) = match tok.split_once('^') {
                Some((l, m)) => (l.parse().ok()?, m.parse().ok()?),
                None => (tok.parse().ok()?, 1),
            };
            if l == 0 || m == 0 {
                return None;
            }
            *counts.entry(l).or_insert(0) += m;
        }
        let degree = counts.iter().map(|(l, m)| l * m).sum();
        Some(CycleType { degree, counts })
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|(l, m)| format!("{l}^{m}"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Recovers the cycle type of an element of order `order` on `degree` points
/// from `fixes[d] = fix(g^d)` for every divisor `d` of the order.
///
/// Points on cycles of length `e` are fixed by `g^d` exactly when `e | d`, so
/// `fix(g^d) = Σ_{e | d} e · c_e`; solving upwards through the divisors gives
/// each `c_d`.
pub fn cycle_type_from_fixpoints(
    degree: usize,
    order: u64,
    fixes: &BTreeMap<u64, u64>,
) -> Result<CycleType, PermError> {
    if order == 0 {
        return Err(PermError::InconsistentFixpoints(
            "order must be positive".into(),
        ));
    }
    let divisors: Vec<u64> = (1..=order).filter(|d| order.is_multiple_of(*d)).collect();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &d in &divisors {
        let Some(&fix) = fixes.get(&d) else {
            return Err(PermError::InconsistentFixpoints(format!(
                "missing fix(g^{d})"
            )));
        };
        if fix > degree as u64 {
            return Err(PermError::InconsistentFixpoints(format!(
                "fix(g^{d}) = {fix} exceeds the degree {degree}"
            )));
        }
        let below: u64 = counts
            .iter()
            .filter(|(&e, _)| d % e as u64 == 0)
            .map(|(&e, &c)| (e * c) as u64)
            .sum();
        if fix < below || !(fix - below).is_multiple_of(d) {
            return Err(PermError::InconsistentFixpoints(format!(
                "fix(g^{d}) = {fix} leaves no integral cycle count"
            )));
        }
        let c = (fix - below) / d;
        if c > 0 {
            counts.insert(d as usize, c as usize);
        }
    }
    if fixes.get(&order).copied() != Some(degree as u64) {
        return Err(PermError::InconsistentFixpoints(format!(
            "fix(g^{order}) must equal the degree {degree}"
        )));
    }
    Ok(CycleType { degree, counts })
}

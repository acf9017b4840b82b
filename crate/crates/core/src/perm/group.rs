use std::collections::{HashSet, VecDeque};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Perm, PermError};

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    gens: Vec<Perm>,
    orbit: Vec<u32>,
    /// `trans[p]` maps the base point to `p`; `trans_inv[p]` is its inverse.
    trans: Vec<Option<Perm>>,
    trans_inv: Vec<Option<Perm>>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Level {
        let mut level = Level {
            base,
            gens: Vec::new(),
            orbit: Vec::new(),
            trans: Vec::new(),
            trans_inv: Vec::new(),
        };
        level.rebuild(degree);
        level
    }

    fn rebuild(&mut self, degree: usize) {
        let id = Perm::identity(degree);
        let inv_gens: Vec<Perm> = self.gens.iter().map(Perm::inverse).collect();
        self.trans = vec![None; degree];
        self.trans_inv = vec![None; degree];
        self.trans[self.base as usize] = Some(id.clone());
        self.trans_inv[self.base as usize] = Some(id);
        self.orbit = vec![self.base];
        let mut head = 0;
        while head < self.orbit.len() {
            let p = self.orbit[head];
            head += 1;
            for (s, s_inv) in self.gens.iter().zip(&inv_gens) {
                let q = s.apply(p) as usize;
                if self.trans[q].is_none() {
                    let u = self.trans[p as usize].as_ref().unwrap().then(s);
                    let ui = s_inv.then(self.trans_inv[p as usize].as_ref().unwrap());
                    self.trans[q] = Some(u);
                    self.trans_inv[q] = Some(ui);
                    self.orbit.push(q as u32);
                }
            }
        }
    }
}

/// Base and strong generating set built by deterministic Schreier–Sims.
/// New base points are always the smallest point moved by the element that
/// forces the extension.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn build(degree: usize, gens: &[Perm]) -> StabChain {
        Self::build_until(degree, gens, None).0
    }

    /// Builds the chain, stopping as soon as the order certified so far
    /// reaches `target`. The boolean reports whether that happened.
    ///
    /// At every stage the product of the orbit lengths is a lower bound for
    /// the order of the generated group, so an early stop proves
    /// `|⟨gens⟩| ≥ target`.
    pub fn build_until(
        degree: usize,
        gens: &[Perm],
        target: Option<&BigUint>,
    ) -> (StabChain, bool) {
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut chain = StabChain {
            degree,
            levels: Vec::new(),
        };
        for g in &gens {
            if chain.levels.iter().all(|l| g.apply(l.base) == l.base) {
                let b = g.first_moved().unwrap();
                chain.levels.push(Level::new(b, degree));
            }
        }
        // level i starts with the generators fixing the earlier base points
        for i in 0..chain.levels.len() {
            let prior: Vec<u32> = chain.levels[..i].iter().map(|l| l.base).collect();
            chain.levels[i].gens = gens
                .iter()
                .filter(|g| prior.iter().all(|&b| g.apply(b) == b))
                .cloned()
                .collect();
            chain.levels[i].rebuild(degree);
        }
        if chain.reached(target) {
            return (chain, true);
        }

        let mut i = chain.levels.len() as isize - 1;
        while i >= 0 {
            let iu = i as usize;
            match chain.find_schreier_residue(iu) {
                Some((res, j)) => {
                    if j == chain.levels.len() {
                        let b = res.first_moved().expect("non-identity residue");
                        chain.levels.push(Level::new(b, degree));
                    }
                    for l in iu + 1..=j {
                        chain.levels[l].gens.push(res.clone());
                        chain.levels[l].rebuild(degree);
                    }
                    if chain.reached(target) {
                        return (chain, true);
                    }
                    i = j as isize;
                }
                None => i -= 1,
            }
        }
        let hit = target.is_some() && chain.reached(target);
        (chain, hit)
    }

    fn reached(&self, target: Option<&BigUint>) -> bool {
        target.is_some_and(|t| &self.order() >= t)
    }

    /// First Schreier generator of level `i` that does not sift through the
    /// levels below, with the level where sifting stopped.
    fn find_schreier_residue(&self, i: usize) -> Option<(Perm, usize)> {
        let level = &self.levels[i];
        for &p in &level.orbit {
            let up = level.trans[p as usize].as_ref().unwrap();
            for s in &level.gens {
                let q = s.apply(p) as usize;
                let h = up.then(s).then(level.trans_inv[q].as_ref().unwrap());
                if h.is_identity() {
                    continue;
                }
                let (res, j) = self.sift_from(h, i + 1);
                if !res.is_identity() {
                    return Some((res, j));
                }
            }
        }
        None
    }

    fn sift_from(&self, mut g: Perm, start: usize) -> (Perm, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(start) {
            let b = g.apply(level.base) as usize;
            match &level.trans_inv[b] {
                Some(ui) => g = g.then(ui),
                None => return (g, l),
            }
        }
        (g, self.levels.len())
    }

    /// Residue of `g` after stripping by the transversals, and the level
    /// where it left the chain (`levels` if it passed every level).
    pub fn sift(&self, g: &Perm) -> (Perm, usize) {
        self.sift_from(g.clone(), 0)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.sift(g).0.is_identity()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Generators of the stabilizer of the first `depth` base points.
    pub fn level_generators(&self, depth: usize) -> &[Perm] {
        self.levels.get(depth).map_or(&[], |l| &l.gens)
    }

    /// Every group element, by walking all transversal products. Only for
    /// small groups.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![Perm::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &p in &level.orbit {
                let u = level.trans[p as usize].as_ref().unwrap();
                for h in &out {
                    next.push(h.then(u));
                }
            }
            out = next;
        }
        out
    }
}

/// Compact identifier of a group element: its images of the base points,
/// which determine the element uniquely within the group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKey {
    Packed(u128),
    Images(Box<[u32]>),
}

/// A permutation group given by generators; the stabilizer chain is built on
/// first use and is immutable afterwards.
#[derive(Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    chain: OnceLock<StabChain>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        let chain = OnceLock::new();
        if let Some(c) = self.chain.get() {
            let _ = chain.set(c.clone());
        }
        PermGroup {
            degree: self.degree,
            generators: self.generators.clone(),
            chain,
        }
    }
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<PermGroup, PermError> {
        for g in &generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        let generators = if generators.is_empty() {
            vec![Perm::identity(degree)]
        } else {
            generators
        };
        Ok(PermGroup {
            degree,
            generators,
            chain: OnceLock::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn chain(&self) -> &StabChain {
        self.chain
            .get_or_init(|| StabChain::build(self.degree, &self.generators))
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    /// The order when it fits in a `u64`.
    pub fn order_u64(&self) -> Option<u64> {
        u64::try_from(self.order()).ok()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.chain().contains(g)
    }

    pub fn orbit(&self, point: u32) -> Vec<u32> {
        orbit_of(self.degree, &self.generators, point)
    }

    /// All orbits, each listed from its smallest point.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for p in 0..self.degree as u32 {
            if !seen[p as usize] {
                let orb = self.orbit(p);
                for &q in &orb {
                    seen[q as usize] = true;
                }
                out.push(orb);
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        is_transitive(self.degree, &self.generators)
    }

    /// Stabilizer of `point`, from Schreier generators reduced greedily to
    /// those that enlarge the group built so far.
    pub fn point_stabilizer(&self, point: u32) -> PermGroup {
        let n = self.degree;
        let mut trans: Vec<Option<Perm>> = vec![None; n];
        trans[point as usize] = Some(Perm::identity(n));
        let mut orbit = vec![point];
        let mut head = 0;
        while head < orbit.len() {
            let p = orbit[head];
            head += 1;
            for s in &self.generators {
                let q = s.apply(p) as usize;
                if trans[q].is_none() {
                    trans[q] = Some(trans[p as usize].as_ref().unwrap().then(s));
                    orbit.push(q as u32);
                }
            }
        }
        let target = self.order() / BigUint::from(orbit.len());
        let mut kept: Vec<Perm> = Vec::new();
        let mut chain = StabChain::build(n, &kept);
        'outer: for &p in &orbit {
            for s in &self.generators {
                let q = s.apply(p) as usize;
                let h = trans[p as usize]
                    .as_ref()
                    .unwrap()
                    .then(s)
                    .then(&trans[q].as_ref().unwrap().inverse());
                if h.is_identity() || chain.contains(&h) {
                    continue;
                }
                kept.push(h);
                chain = StabChain::build(n, &kept);
                if chain.order() == target {
                    break 'outer;
                }
            }
        }
        let group = PermGroup::new(n, kept).expect("degrees agree");
        let _ = group.chain.set(chain);
        group
    }

    /// Key identifying `g` among the elements of this group. Only meaningful
    /// for members.
    pub fn element_key(&self, g: &Perm) -> ElementKey {
        let chain = self.chain();
        let n = self.degree as u128;
        let fits = (chain.levels.len() as u32) < 128 / (128 - n.leading_zeros()).max(1);
        if fits {
            let mut key = 0u128;
            for l in chain.levels.iter().rev() {
                key = key * n + g.apply(l.base) as u128;
            }
            ElementKey::Packed(key)
        } else {
            ElementKey::Images(chain.levels.iter().map(|l| g.apply(l.base)).collect())
        }
    }

    /// Deterministic stream of (nearly uniform) random elements.
    pub fn random_elements(&self, seed: u64) -> RandomElements {
        RandomElements::new(self.degree, &self.generators, seed)
    }

    /// Walks the conjugacy class of `rep`, recording element keys and, if
    /// asked, the elements themselves. Fails once more than `bound` elements
    /// have been seen.
    pub fn class_walk(
        &self,
        rep: &Perm,
        bound: usize,
        keep_elements: bool,
    ) -> Result<ClassWalk, PermError> {
        if !self.contains(rep) {
            return Err(PermError::NotMember);
        }
        let mut keys = HashSet::new();
        let mut elements = Vec::new();
        let mut queue = VecDeque::new();
        keys.insert(self.element_key(rep));
        queue.push_back(rep.clone());
        while let Some(x) = queue.pop_front() {
            for s in &self.generators {
                let y = x.conjugate_by(s);
                if keys.insert(self.element_key(&y)) {
                    if keys.len() > bound {
                        return Err(PermError::BoundExceeded(bound));
                    }
                    queue.push_back(y);
                }
            }
            if keep_elements {
                elements.push(x);
            }
        }
        Ok(ClassWalk { keys, elements })
    }
}

/// Result of [`PermGroup::class_walk`].
#[derive(Debug, Clone)]
pub struct ClassWalk {
    pub keys: HashSet<ElementKey>,
    pub elements: Vec<Perm>,
}

impl ClassWalk {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// The conjugacy class `{rep^x : x ∈ g}`, closed under conjugation by the
/// generators.
pub fn conjugacy_class_orbit(
    g: &PermGroup,
    rep: &Perm,
    size_bound: usize,
) -> Result<HashSet<Perm>, PermError> {
    if !g.contains(rep) {
        return Err(PermError::NotMember);
    }
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(rep.clone());
    queue.push_back(rep.clone());
    while let Some(x) = queue.pop_front() {
        for s in g.generators() {
            let y = x.conjugate_by(s);
            if !seen.contains(&y) {
                if seen.len() >= size_bound {
                    return Err(PermError::BoundExceeded(size_bound));
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

pub(crate) fn orbit_of(degree: usize, gens: &[Perm], point: u32) -> Vec<u32> {
    let mut seen = vec![false; degree];
    seen[point as usize] = true;
    let mut orbit = vec![point];
    let mut head = 0;
    while head < orbit.len() {
        let p = orbit[head];
        head += 1;
        for s in gens {
            let q = s.apply(p);
            if !seen[q as usize] {
                seen[q as usize] = true;
                orbit.push(q);
            }
        }
    }
    orbit
}

pub(crate) fn is_transitive(degree: usize, gens: &[Perm]) -> bool {
    degree <= 1 || orbit_of(degree, gens, 0).len() == degree
}

/// Product-replacement random elements from a seeded ChaCha stream.
#[derive(Debug, Clone)]
pub struct RandomElements {
    state: Vec<Perm>,
    acc: Perm,
    rng: ChaCha8Rng,
}

impl RandomElements {
    fn new(degree: usize, gens: &[Perm], seed: u64) -> RandomElements {
        let mut state: Vec<Perm> = gens.to_vec();
        if state.is_empty() {
            state.push(Perm::identity(degree));
        }
        let k = state.len();
        while state.len() < 10.max(k) {
            state.push(state[state.len() % k].clone());
        }
        let mut r = RandomElements {
            state,
            acc: Perm::identity(degree),
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        for _ in 0..60 {
            r.step();
        }
        r
    }

    fn step(&mut self) -> Perm {
        let n = self.state.len();
        let i = self.rng.gen_range(0..n);
        let mut j = self.rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let rhs = if self.rng.gen_bool(0.5) {
            self.state[j].clone()
        } else {
            self.state[j].inverse()
        };
        self.state[i] = if self.rng.gen_bool(0.5) {
            self.state[i].then(&rhs)
        } else {
            rhs.then(&self.state[i])
        };
        self.acc = self.acc.then(&self.state[i]);
        self.acc.clone()
    }
}

impl Iterator for RandomElements {
    type Item = Perm;
    fn next(&mut self) -> Option<Perm> {
        Some(self.step())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a5() -> PermGroup {
        PermGroup::new(
            5,
            vec![
                Perm::from_cycles(5, &[&[1, 2, 3, 4, 5]]).unwrap(),
                Perm::from_cycles(5, &[&[1, 2, 3]]).unwrap(),
            ],
        )
        .unwrap()
    }

    fn s4() -> PermGroup {
        PermGroup::new(
            4,
            vec![
                Perm::from_cycles(4, &[&[1, 2, 3, 4]]).unwrap(),
                Perm::from_cycles(4, &[&[1, 2]]).unwrap(),
            ],
        )
        .unwrap()
    }

    fn brute_force_order(g: &PermGroup) -> usize {
        let mut seen: HashSet<Perm> = HashSet::new();
        let mut queue = VecDeque::new();
        let id = Perm::identity(g.degree());
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(x) = queue.pop_front() {
            for s in g.generators() {
                let y = x.then(s);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn orders_match_enumeration() {
        for g in [a5(), s4()] {
            assert_eq!(g.order(), BigUint::from(brute_force_order(&g)));
            for s in g.generators() {
                assert!(g.contains(s));
            }
        }
        assert_eq!(a5().order_u64(), Some(60));
        assert_eq!(s4().order_u64(), Some(24));
    }

    #[test]
    fn membership_and_elements() {
        let g = a5();
        let odd = Perm::from_cycles(5, &[&[1, 2]]).unwrap();
        assert!(!g.contains(&odd));
        let elts = g.chain().elements();
        assert_eq!(elts.len(), 60);
        assert_eq!(elts.iter().collect::<HashSet<_>>().len(), 60);
        assert!(elts.iter().all(|e| g.contains(e)));
        let keys: HashSet<_> = elts.iter().map(|e| g.element_key(e)).collect();
        assert_eq!(keys.len(), 60);
    }

    #[test]
    fn trivial_group() {
        let g = PermGroup::new(3, vec![]).unwrap();
        assert_eq!(g.order_u64(), Some(1));
        assert!(g.contains(&Perm::identity(3)));
        assert_eq!(g.orbits().len(), 3);
        assert!(!g.is_transitive());
    }

    #[test]
    fn class_orbits() {
        let g = s4();
        let t = Perm::from_cycles(4, &[&[1, 2]]).unwrap();
        assert_eq!(conjugacy_class_orbit(&g, &t, 100).unwrap().len(), 6);
        assert_eq!(g.class_walk(&t, 100, true).unwrap().len(), 6);
        let id = Perm::identity(4);
        let c = conjugacy_class_orbit(&g, &id, 1).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.contains(&id));
        assert_eq!(
            conjugacy_class_orbit(&g, &t, 5),
            Err(PermError::BoundExceeded(5))
        );
        let outside = Perm::from_cycles(5, &[&[1, 2]]).unwrap();
        assert_eq!(
            conjugacy_class_orbit(&a5(), &outside, 100),
            Err(PermError::NotMember)
        );
    }

    #[test]
    fn stabilizer_and_orbits() {
        let g = a5();
        assert!(g.is_transitive());
        let h = g.point_stabilizer(2);
        assert_eq!(h.order_u64(), Some(12));
        assert!(h
            .generators()
            .iter()
            .all(|x| x.apply(2) == 2 && g.contains(x)));
        assert_eq!(h.orbits().len(), 2);
    }

    #[test]
    fn early_exit_certifies_a_lower_bound() {
        let g = a5();
        let (chain, hit) = StabChain::build_until(5, g.generators(), Some(&BigUint::from(60u32)));
        assert!(hit);
        assert_eq!(chain.order(), BigUint::from(60u32));
        let (_, hit) = StabChain::build_until(5, g.generators(), Some(&BigUint::from(61u32)));
        assert!(!hit);
    }

    #[test]
    fn random_elements_are_reproducible_members() {
        let g = a5();
        let a: Vec<Perm> = g.random_elements(7).take(20).collect();
        let b: Vec<Perm> = g.random_elements(7).take(20).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|x| g.contains(x)));
    }
}

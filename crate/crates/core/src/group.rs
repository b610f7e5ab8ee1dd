//! Finite groups given by multiplication tables.
//!
//! Elements are indices `0..order`, with `0` pinned as the identity.
//! Subgroups are sorted element lists of the ambient group.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tables up to this order are checked for associativity on load.
pub const ASSOCIATIVITY_CHECK_LIMIT: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
}

/// Images of the generators of a presentation, one group element each.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomTuple(pub Vec<usize>);

impl HomTuple {
    pub fn identity(len: usize) -> Self {
        HomTuple(vec![0; len])
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyClass {
    /// Smallest element index in the class.
    pub rep: usize,
    pub size: usize,
}

/// Result of counting simultaneous-conjugation orbits on a tuple set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitCount {
    pub count: usize,
    /// Lexicographically minimal member of each orbit, in increasing order.
    pub reps: Vec<HomTuple>,
}

/// Left-multiplication action of a group on the left cosets of a subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetAction {
    /// Each coset as a sorted element list; cosets are ordered by their minimal element.
    pub cosets: Vec<Vec<usize>>,
    /// `perms[g][i]` is the coset index of `g · cosets[i]`.
    pub perms: Vec<Vec<usize>>,
}

impl CosetAction {
    /// Canonical representative (minimal element) of each coset.
    pub fn reps(&self) -> Vec<usize> {
        self.cosets.iter().map(|c| c[0]).collect()
    }
}

impl FiniteGroup {
    /// Validates a Cayley table: square, in range, identity at 0, Latin square,
    /// associative (checked for order ≤ [`ASSOCIATIVITY_CHECK_LIMIT`]).
    pub fn from_table(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyGroup);
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { row: r, len: row.len(), expected: n });
            }
            if let Some((c, &v)) = row.iter().enumerate().find(|(_, &v)| v >= n) {
                return Err(Error::EntryOutOfRange { row: r, col: c, value: v });
            }
        }
        if (0..n).any(|i| rows[0][i] != i || rows[i][0] != i) {
            return Err(Error::IdentityNotZero);
        }
        let mut seen = vec![false; n];
        for (r, row) in rows.iter().enumerate() {
            seen.iter_mut().for_each(|s| *s = false);
            for &v in row {
                if core::mem::replace(&mut seen[v], true) {
                    return Err(Error::RowNotPermutation(r));
                }
            }
        }
        for c in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for row in rows {
                if core::mem::replace(&mut seen[row[c]], true) {
                    return Err(Error::ColumnNotPermutation(c));
                }
            }
        }
        let table: Vec<usize> = rows.iter().flatten().copied().collect();
        if n <= ASSOCIATIVITY_CHECK_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    let ab = table[a * n + b];
                    for c in 0..n {
                        if table[ab * n + c] != table[a * n + table[b * n + c]] {
                            return Err(Error::NotAssociative(a, b, c));
                        }
                    }
                }
            }
        }
        Ok(Self::from_flat(n, table))
    }

    fn from_flat(order: usize, table: Vec<usize>) -> Self {
        let mut inverse = vec![0; order];
        for a in 0..order {
            inverse[a] = (0..order).find(|&b| table[a * order + b] == 0).expect("Latin square");
        }
        FiniteGroup { order, table, inverse }
    }

    /// Builds a group from a list of elements and an associative product on
    /// them whose identity is `elements[0]`.
    fn from_elements<T: PartialEq>(elements: &[T], mul: impl Fn(&T, &T) -> T) -> Self {
        let n = elements.len();
        let mut table = Vec::with_capacity(n * n);
        for a in elements {
            for b in elements {
                let ab = mul(a, b);
                table.push(elements.iter().position(|e| *e == ab).expect("closed under product"));
            }
        }
        Self::from_flat(n, table)
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `ℤ/n`, element `i` standing for `i mod n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let table = (0..n).flat_map(|a| (0..n).map(move |b| (a + b) % n)).collect();
        Self::from_flat(n, table)
    }

    /// Dihedral group of order `2n`; element `i + n·j` is `r^i s^j`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 1);
        let elems: Vec<(usize, usize)> = (0..2).flat_map(|j| (0..n).map(move |i| (i, j))).collect();
        Self::from_elements(&elems, |&(a, b), &(c, d)| {
            // r^a s^b r^c s^d = r^(a ± c) s^(b+d)
            let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
            (rot, (b + d) % 2)
        })
    }

    /// Symmetric group on `n` letters, permutations in lexicographic order.
    pub fn symmetric(n: usize) -> Self {
        let perms = permutations(n);
        Self::from_elements(&perms, |p, q| compose(p, q))
    }

    /// Alternating group on `n` letters.
    pub fn alternating(n: usize) -> Self {
        let perms: Vec<Vec<usize>> = permutations(n).into_iter().filter(|p| is_even(p)).collect();
        Self::from_elements(&perms, |p, q| compose(p, q))
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Self {
        // (sign, unit) with unit 0=1, 1=i, 2=j, 3=k
        let elems: Vec<(bool, u8)> = [false, true].iter().flat_map(|&neg| (0..4u8).map(move |u| (neg, u))).collect();
        Self::from_elements(&elems, |&(s1, u1), &(s2, u2)| {
            let (neg, u) = unit_mul(u1, u2);
            (s1 ^ s2 ^ neg, u)
        })
    }

    /// `G × H`; pair `(g, h)` is element `g · |H| + h`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Self {
        let (n, m) = (self.order, other.order);
        let size = n * m;
        let mut table = Vec::with_capacity(size * size);
        for a in 0..size {
            for b in 0..size {
                let g = self.mul(a / m, b / m);
                let h = other.mul(a % m, b % m);
                table.push(g * m + h);
            }
        }
        Self::from_flat(size, table)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn elements(&self) -> core::ops::Range<usize> {
        0..self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `g x g⁻¹`
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inverse[g])
    }

    pub fn conj_tuple(&self, g: usize, t: &HomTuple) -> HomTuple {
        HomTuple(t.0.iter().map(|&x| self.conj(g, x)).collect())
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn check_element(&self, x: usize) -> Result<()> {
        if x < self.order {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange(x, self.order))
        }
    }

    pub fn check_tuple(&self, t: &HomTuple) -> Result<()> {
        t.0.iter().try_for_each(|&x| self.check_element(x))
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// Conjugacy classes ordered by their minimal element.
    pub fn conjugacy_classes(&self) -> Vec<ConjugacyClass> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for x in self.elements() {
            if seen[x] {
                continue;
            }
            let mut size = 0;
            for g in self.elements() {
                let y = self.conj(g, x);
                if !seen[y] {
                    seen[y] = true;
                    size += 1;
                }
            }
            classes.push(ConjugacyClass { rep: x, size });
        }
        classes
    }

    /// Sorted list of elements commuting with every image of `t`.
    pub fn centralizer(&self, t: &[usize]) -> Vec<usize> {
        self.elements().filter(|&g| t.iter().all(|&x| self.mul(g, x) == self.mul(x, g))).collect()
    }

    /// Orbits of simultaneous conjugation on a conjugation-closed tuple set.
    pub fn conj_orbit_count(&self, tuples: &[HomTuple]) -> Result<OrbitCount> {
        for t in tuples {
            self.check_tuple(t)?;
        }
        let set: BTreeSet<&HomTuple> = tuples.iter().collect();
        let mut seen: BTreeSet<HomTuple> = BTreeSet::new();
        let mut reps = Vec::new();
        // ascending order: the first unseen tuple of an orbit is its minimum
        for &t in &set {
            if seen.contains(t) {
                continue;
            }
            for g in self.elements() {
                let c = self.conj_tuple(g, t);
                if !set.contains(&c) {
                    return Err(Error::NotConjugationClosed);
                }
                seen.insert(c);
            }
            reps.push(t.clone());
        }
        Ok(OrbitCount { count: reps.len(), reps })
    }

    /// Checks that `h` is a non-empty subset closed under product and inverse.
    pub fn check_subgroup(&self, h: &[usize]) -> Result<()> {
        if h.is_empty() {
            return Err(Error::NotSubgroup("empty".into()));
        }
        let mut member = vec![false; self.order];
        for &x in h {
            self.check_element(x)?;
            member[x] = true;
        }
        for &a in h {
            if !member[self.inv(a)] {
                return Err(Error::NotSubgroup(format!("inverse of {a} missing")));
            }
            for &b in h {
                if !member[self.mul(a, b)] {
                    return Err(Error::NotSubgroup(format!("product {a}·{b} missing")));
                }
            }
        }
        Ok(())
    }

    /// Smallest subgroup containing `gens`, as a sorted element list.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        member[0] = true;
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    frontier.push(y);
                }
            }
        }
        self.elements().filter(|&x| member[x]).collect()
    }

    /// The subgroup `h` as a group in its own right, together with the
    /// embedding `sub index → ambient element`. Index `i` maps to the
    /// `i`-th smallest element of `h`, so the identity stays at 0.
    pub fn subgroup(&self, h: &[usize]) -> Result<(FiniteGroup, Vec<usize>)> {
        self.check_subgroup(h)?;
        let elems: Vec<usize> = h.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let mut local = vec![usize::MAX; self.order];
        for (i, &x) in elems.iter().enumerate() {
            local[x] = i;
        }
        let k = elems.len();
        let mut table = Vec::with_capacity(k * k);
        for &a in &elems {
            for &b in &elems {
                table.push(local[self.mul(a, b)]);
            }
        }
        Ok((Self::from_flat(k, table), elems))
    }

    /// Action on left cosets `xH` by left multiplication.
    pub fn coset_action(&self, h: &[usize]) -> Result<CosetAction> {
        self.check_subgroup(h)?;
        let mut coset_of = vec![usize::MAX; self.order];
        let mut cosets = Vec::new();
        for x in self.elements() {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let mut coset: Vec<usize> = h.iter().map(|&y| self.mul(x, y)).collect();
            coset.sort_unstable();
            coset.dedup();
            for &y in &coset {
                coset_of[y] = cosets.len();
            }
            cosets.push(coset);
        }
        let perms = self.elements().map(|g| cosets.iter().map(|c| coset_of[self.mul(g, c[0])]).collect()).collect();
        Ok(CosetAction { cosets, perms })
    }

    /// All subgroups, as sorted element lists, in increasing lexicographic order.
    ///
    /// Built by closing cyclic subgroups under joins; intended for small groups.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let cyclic: BTreeSet<Vec<usize>> = self.elements().map(|x| self.generated_subgroup(&[x])).collect();
        let mut frontier: Vec<Vec<usize>> = cyclic.iter().cloned().collect();
        found.extend(cyclic.iter().cloned());
        while let Some(h) = frontier.pop() {
            for c in &cyclic {
                let mut gens = h.clone();
                gens.extend_from_slice(c);
                let joined = self.generated_subgroup(&gens);
                if found.insert(joined.clone()) {
                    frontier.push(joined);
                }
            }
        }
        found.into_iter().collect()
    }
}

fn unit_mul(a: u8, b: u8) -> (bool, u8) {
    match (a, b) {
        (0, u) | (u, 0) => (false, u),
        (x, y) if x == y => (true, 0),
        (1, 2) => (false, 3),
        (2, 3) => (false, 1),
        (3, 1) => (false, 2),
        (2, 1) => (true, 3),
        (3, 2) => (true, 1),
        (1, 3) => (true, 2),
        _ => unreachable!(),
    }
}

/// `(p ∘ q)(i) = p(q(i))`
fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&i| p[i]).collect()
}

fn is_even(p: &[usize]) -> bool {
    let inversions =
        (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
    inversions % 2 == 0
}

/// Permutations of `0..n` in lexicographic order (identity first).
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
        p.swap(i, j);
        p[i + 1..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_tables() {
        assert!(FiniteGroup::from_table(&[vec![0, 1], vec![1, 0]]).is_ok());
        assert_eq!(FiniteGroup::from_table(&[vec![0, 1], vec![1, 1]]), Err(Error::RowNotPermutation(1)));
        assert_eq!(FiniteGroup::from_table(&[]), Err(Error::EmptyGroup));
        assert_eq!(FiniteGroup::from_table(&[vec![1, 0], vec![0, 1]]), Err(Error::IdentityNotZero));
        assert!(matches!(FiniteGroup::from_table(&[vec![0, 1], vec![1]]), Err(Error::NotSquare { row: 1, .. })));
        assert!(matches!(
            FiniteGroup::from_table(&[vec![0, 2], vec![1, 0]]),
            Err(Error::EntryOutOfRange { row: 0, col: 1, value: 2 })
        ));
    }

    #[test]
    fn detects_non_associative_latin_square() {
        // Latin square with identity 0 of order 5 that is not a group (no group of order 5 is non-cyclic).
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_table(&t), Err(Error::NotAssociative(..))));
    }

    #[test]
    fn s3_from_permutation_composition_validates() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(FiniteGroup::from_table(&s3.rows()), Ok(s3.clone()));
        assert!(!s3.is_abelian());
    }

    #[test]
    fn library_groups_validate() {
        for g in [
            FiniteGroup::cyclic(7),
            FiniteGroup::dihedral(4),
            FiniteGroup::dihedral(6),
            FiniteGroup::symmetric(4),
            FiniteGroup::alternating(4),
            FiniteGroup::quaternion(),
            FiniteGroup::cyclic(2).direct_product(&FiniteGroup::symmetric(3)),
        ] {
            assert_eq!(FiniteGroup::from_table(&g.rows()), Ok(g.clone()));
        }
    }

    #[test]
    fn conjugacy_class_sizes() {
        let sizes = |g: &FiniteGroup| g.conjugacy_classes().iter().map(|c| c.size).collect::<Vec<_>>();
        assert_eq!(FiniteGroup::cyclic(4).conjugacy_classes().len(), 4);
        // identity, the three transpositions (indices 1,2,5 in lexicographic order), the 3-cycles
        assert_eq!(sizes(&FiniteGroup::symmetric(3)), vec![1, 3, 2]);
        assert_eq!(FiniteGroup::quaternion().conjugacy_classes().len(), 5);
        assert_eq!(FiniteGroup::symmetric(4).conjugacy_classes().len(), 5);
        assert_eq!(FiniteGroup::dihedral(4).conjugacy_classes().len(), 5);
    }

    #[test]
    fn centralizers_in_s3() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(s3.centralizer(&[0]), (0..6).collect::<Vec<_>>());
        let transposition = 1; // [0,2,1]
        assert_eq!(s3.element_order(transposition), 2);
        assert_eq!(s3.centralizer(&[transposition]), vec![0, 1]);
        let three_cycle = (0..6).find(|&x| s3.element_order(x) == 3).unwrap();
        assert_eq!(s3.centralizer(&[three_cycle]).len(), 3);
        s3.check_subgroup(&s3.centralizer(&[three_cycle])).unwrap();
    }

    #[test]
    fn conjugation_orbits() {
        use crate::presentation::Presentation;
        let s3 = FiniteGroup::symmetric(3);
        let z = Presentation::integers().hom_enumerate(&s3);
        let orbits = s3.conj_orbit_count(&z).unwrap();
        assert_eq!(orbits.count, 3);
        assert_eq!(orbits.reps, vec![HomTuple(vec![0]), HomTuple(vec![1]), HomTuple(vec![3])]);

        let c6 = FiniteGroup::cyclic(6);
        assert_eq!(s3.conj_orbit_count(&[]).unwrap().count, 0);
        assert_eq!(c6.conj_orbit_count(&Presentation::integers().hom_enumerate(&c6)).unwrap().count, 6);

        // 18 commuting pairs; Σ over classes of #classes(C(g)) = 3 + 2 + 3
        let pairs = Presentation::free_abelian(2).hom_enumerate(&s3);
        assert_eq!(s3.conj_orbit_count(&pairs).unwrap().count, 8);

        assert_eq!(s3.conj_orbit_count(&[HomTuple(vec![1])]), Err(Error::NotConjugationClosed));
    }

    #[test]
    fn coset_actions() {
        let s3 = FiniteGroup::symmetric(3);
        let whole: Vec<usize> = s3.elements().collect();
        let a = s3.coset_action(&whole).unwrap();
        assert_eq!(a.cosets.len(), 1);
        assert!(a.perms.iter().all(|p| p == &vec![0]));

        let regular = s3.coset_action(&[0]).unwrap();
        assert_eq!(regular.cosets.len(), 6);

        let a = s3.coset_action(&[0, 1]).unwrap();
        assert_eq!(a.cosets.len(), 3);
        assert_eq!(a.reps(), vec![0, 2, 4]);
        // homomorphism into permutations, faithful like the natural action
        for g in s3.elements() {
            for h in s3.elements() {
                let gh: Vec<usize> = (0..3).map(|i| a.perms[g][a.perms[h][i]]).collect();
                assert_eq!(gh, a.perms[s3.mul(g, h)]);
            }
        }
        let distinct: BTreeSet<_> = a.perms.iter().collect();
        assert_eq!(distinct.len(), 6);

        assert!(matches!(s3.coset_action(&[0, 3]), Err(Error::NotSubgroup(_))));
    }

    #[test]
    fn subgroup_lattices() {
        assert_eq!(FiniteGroup::symmetric(3).subgroups().len(), 6);
        assert_eq!(FiniteGroup::quaternion().subgroups().len(), 6);
        assert_eq!(FiniteGroup::symmetric(4).subgroups().len(), 30);
        assert_eq!(FiniteGroup::cyclic(12).subgroups().len(), 6);
    }

    #[test]
    fn subgroup_as_group() {
        let s3 = FiniteGroup::symmetric(3);
        let c3 = s3.generated_subgroup(&[3]);
        let (g, emb) = s3.subgroup(&c3).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(emb[0], 0);
        for a in g.elements() {
            for b in g.elements() {
                assert_eq!(emb[g.mul(a, b)], s3.mul(emb[a], emb[b]));
            }
        }
    }
}

//! Finitely presented groups and homomorphisms into finite groups.
//!
//! A relator is a word of signed 1-based generator indices: `2` is the second
//! generator, `-2` its inverse. `Hom(Γ, G)` is identified with the tuples in
//! `G^ℓ` (images of the generators) on which every relator evaluates to 1.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, HomTuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PresentationKind {
    Trivial,
    Cyclic(u64),
    FreeAbelian(usize),
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    generators: usize,
    relators: Vec<Vec<i32>>,
    kind: PresentationKind,
}

impl Presentation {
    /// A custom presentation; every letter must satisfy `1 ≤ |letter| ≤ generators`.
    pub fn new(generators: usize, relators: Vec<Vec<i32>>) -> Result<Self> {
        for (r, word) in relators.iter().enumerate() {
            if let Some(&letter) = word.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > generators) {
                return Err(Error::InvalidLetter { relator: r, letter, generators });
            }
        }
        Ok(Presentation { generators, relators, kind: PresentationKind::Custom })
    }

    /// The trivial group, with no generators.
    pub fn trivial() -> Self {
        Presentation { generators: 0, relators: Vec::new(), kind: PresentationKind::Trivial }
    }

    /// `⟨a | a^k⟩`
    pub fn cyclic(k: u64) -> Result<Self> {
        if k == 0 || k > i32::MAX as u64 {
            return Err(Error::InvalidCyclicOrder);
        }
        Ok(Presentation { generators: 1, relators: vec![vec![1; k as usize]], kind: PresentationKind::Cyclic(k) })
    }

    /// `ℤ^r`: `r` generators with every commutator `[a_i, a_j]`, `i < j`.
    pub fn free_abelian(rank: usize) -> Self {
        let mut relators = Vec::new();
        for i in 1..=rank as i32 {
            for j in i + 1..=rank as i32 {
                relators.push(vec![i, j, -i, -j]);
            }
        }
        Presentation { generators: rank, relators, kind: PresentationKind::FreeAbelian(rank) }
    }

    /// `ℤ` as a free abelian group of rank one.
    pub fn integers() -> Self {
        Self::free_abelian(1)
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relators(&self) -> &[Vec<i32>] {
        &self.relators
    }

    pub fn kind(&self) -> PresentationKind {
        self.kind
    }

    /// Presentation of `Γ₁ × Γ₂`: the generators of `self` followed by those of
    /// `other`, the original relators, and every cross commutator.
    ///
    /// Products of free abelian presentations come back in canonical
    /// `free_abelian` form, which has exactly the same relator set.
    pub fn product(&self, other: &Presentation) -> Presentation {
        match (self.kind, other.kind) {
            (PresentationKind::FreeAbelian(a), PresentationKind::FreeAbelian(b)) => {
                return Presentation::free_abelian(a + b)
            }
            (PresentationKind::Trivial, _) => return other.clone(),
            (_, PresentationKind::Trivial) => return self.clone(),
            _ => {}
        }
        let shift = self.generators as i32;
        let mut relators = self.relators.clone();
        relators.extend(other.relators.iter().map(|w| w.iter().map(|&l| l.signum() * (l.abs() + shift)).collect()));
        for i in 1..=shift {
            for j in 1..=other.generators as i32 {
                let j = j + shift;
                relators.push(vec![i, j, -i, -j]);
            }
        }
        Presentation { generators: self.generators + other.generators, relators, kind: PresentationKind::Custom }
    }

    /// Whether this is syntactically the trivial group: no generators, or a
    /// trivial shorthand.
    pub fn is_trivial_class(&self) -> bool {
        matches!(self.kind, PresentationKind::Trivial | PresentationKind::Cyclic(1) | PresentationKind::FreeAbelian(0))
            || (self.generators == 0)
    }

    /// Whether this is syntactically `ℤ`: one generator and only relators that
    /// freely reduce to the empty word.
    pub fn is_integers_class(&self) -> bool {
        self.generators == 1 && self.relators.iter().all(|w| free_reduce(w).is_empty())
    }

    /// Syntactic class key used to look up catalog entries: `trivial`, `Z`,
    /// `cyclic(k)`, `free_abelian(r)`, or `presentation(ℓ;relators)`.
    pub fn class_key(&self) -> String {
        if self.is_trivial_class() {
            return "trivial".into();
        }
        if self.is_integers_class() {
            return "Z".into();
        }
        match self.kind {
            PresentationKind::Cyclic(k) => format!("cyclic({k})"),
            PresentationKind::FreeAbelian(r) => format!("free_abelian({r})"),
            _ => format!("presentation({};{:?})", self.generators, self.relators),
        }
    }

    /// Evaluates `word` with generator `i` sent to `images[i-1]`.
    pub fn evaluate(word: &[i32], images: &[usize], g: &FiniteGroup) -> usize {
        word.iter().fold(0, |acc, &l| {
            let x = images[l.unsigned_abs() as usize - 1];
            g.mul(acc, if l > 0 { x } else { g.inv(x) })
        })
    }

    pub fn is_homomorphism(&self, t: &HomTuple, g: &FiniteGroup) -> bool {
        t.len() == self.generators && self.relators.iter().all(|w| Self::evaluate(w, t.images(), g) == 0)
    }

    /// `Hom(Γ, G)` in lexicographic order of image indices.
    ///
    /// Generator images are assigned depth first; a relator is checked as soon
    /// as every generator it mentions has an image.
    pub fn hom_enumerate(&self, g: &FiniteGroup) -> Vec<HomTuple> {
        let ell = self.generators;
        // relators grouped by the last generator they need
        let mut ready: Vec<Vec<&[i32]>> = vec![Vec::new(); ell + 1];
        for w in &self.relators {
            let need = w.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
            ready[need].push(w);
        }
        let mut out = Vec::new();
        let mut images = vec![0usize; ell];
        self.extend(g, &ready, &mut images, 0, &mut out);
        out
    }

    fn extend(
        &self,
        g: &FiniteGroup,
        ready: &[Vec<&[i32]>],
        images: &mut Vec<usize>,
        depth: usize,
        out: &mut Vec<HomTuple>,
    ) {
        if depth == images.len() {
            out.push(HomTuple(images.clone()));
            return;
        }
        for x in g.elements() {
            images[depth] = x;
            if ready[depth + 1].iter().all(|w| Self::evaluate(w, images, g) == 0) {
                self.extend(g, ready, images, depth + 1, out);
            }
        }
    }

    /// `Hom(Γ, H)` for a subgroup `H ≤ G`, with images reported as elements of `G`.
    pub fn hom_into_subgroup(&self, g: &FiniteGroup, h: &[usize]) -> Result<Vec<HomTuple>> {
        let (sub, emb) = g.subgroup(h)?;
        // the embedding is increasing, so lexicographic order carries over
        Ok(self.hom_enumerate(&sub).into_iter().map(|t| HomTuple(t.0.iter().map(|&i| emb[i]).collect())).collect())
    }

    /// Exponent-sum matrix: rows are generators, columns are relators.
    pub fn exponent_matrix(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.relators.len()]; self.generators];
        for (c, w) in self.relators.iter().enumerate() {
            for &l in w {
                m[l.unsigned_abs() as usize - 1][c] += l.signum() as i64;
            }
        }
        m
    }
}

impl core::fmt::Display for Presentation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.class_key())
    }
}

fn free_reduce(word: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for &l in word {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(p: &Presentation, g: &FiniteGroup) -> Vec<HomTuple> {
        let ell = p.generators();
        let total = g.order().pow(ell as u32);
        (0..total)
            .map(|mut code| {
                let mut t = vec![0; ell];
                for slot in t.iter_mut().rev() {
                    *slot = code % g.order();
                    code /= g.order();
                }
                HomTuple(t)
            })
            .filter(|t| p.is_homomorphism(t, g))
            .collect()
    }

    #[test]
    fn rejects_bad_letters() {
        assert_eq!(
            Presentation::new(2, vec![vec![1, 3]]),
            Err(Error::InvalidLetter { relator: 0, letter: 3, generators: 2 })
        );
        assert!(Presentation::new(2, vec![vec![0]]).is_err());
        assert_eq!(Presentation::cyclic(0), Err(Error::InvalidCyclicOrder));
    }

    #[test]
    fn hom_examples() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(Presentation::integers().hom_enumerate(&s3).len(), 6);
        let c2 = Presentation::cyclic(2).unwrap();
        assert_eq!(c2.hom_enumerate(&FiniteGroup::cyclic(3)), vec![HomTuple(vec![0])]);
        // brute force: commuting pairs in S3
        let commuting =
            (0..6).flat_map(|x| (0..6).map(move |y| (x, y))).filter(|&(x, y)| s3.mul(x, y) == s3.mul(y, x)).count();
        assert_eq!(commuting, 18);
        assert_eq!(Presentation::free_abelian(2).hom_enumerate(&s3).len(), 18);
        assert_eq!(Presentation::trivial().hom_enumerate(&s3), vec![HomTuple(vec![])]);
    }

    #[test]
    fn hom_matches_brute_force() {
        let klein = Presentation::new(2, vec![vec![1, 1], vec![2, 2], vec![1, 2, 1, 2]]).unwrap();
        let free2 = Presentation::new(2, vec![]).unwrap();
        let mixed = Presentation::new(3, vec![vec![1, 1, 1], vec![2, 3, -2, -3], vec![1, 2, -1, -2]]).unwrap();
        for g in [FiniteGroup::symmetric(3), FiniteGroup::quaternion(), FiniteGroup::dihedral(4)] {
            for p in [&klein, &free2, &mixed, &Presentation::free_abelian(3), &Presentation::cyclic(4).unwrap()] {
                assert_eq!(p.hom_enumerate(&g), brute_force(p, &g), "{p} into order {}", g.order());
            }
        }
    }

    #[test]
    fn class_keys() {
        assert_eq!(Presentation::trivial().class_key(), "trivial");
        assert_eq!(Presentation::free_abelian(0).class_key(), "trivial");
        assert_eq!(Presentation::cyclic(1).unwrap().class_key(), "trivial");
        assert_eq!(Presentation::integers().class_key(), "Z");
        assert_eq!(Presentation::new(1, vec![vec![1, -1]]).unwrap().class_key(), "Z");
        assert_eq!(Presentation::cyclic(3).unwrap().class_key(), "cyclic(3)");
        assert_eq!(Presentation::free_abelian(2).class_key(), "free_abelian(2)");
        assert_eq!(Presentation::new(2, vec![vec![1, 1]]).unwrap().class_key(), "presentation(2;[[1, 1]])");
    }

    #[test]
    fn products_of_presentations() {
        let z = Presentation::integers();
        assert_eq!(z.product(&z), Presentation::free_abelian(2));
        let c3 = Presentation::cyclic(3).unwrap();
        let p = z.product(&c3);
        assert_eq!(p.generators(), 2);
        assert_eq!(p.relators(), &[vec![2, 2, 2], vec![1, 2, -1, -2]]);
        assert_eq!(Presentation::trivial().product(&c3), c3);
    }

    #[test]
    fn exponent_sums() {
        let p = Presentation::new(2, vec![vec![1, 1], vec![2, 2], vec![1, 2, 1, 2]]).unwrap();
        assert_eq!(p.exponent_matrix(), vec![vec![2, 0, 2], vec![0, 2, 2]]);
    }
}

//! Euler calculus on finite cell decompositions.
//!
//! A [`CellSpace`] is a finite list of open cells, each with a dimension. The
//! Euler characteristic of a definable set is the sum of `(-1)^dim` over the
//! cells of any decomposition, so the dimension multiset is all we keep.
//! Embeddings into Euclidean space are not represented: the Euler
//! characteristic does not depend on them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{checked_mul, checked_sum, Error, Result};

/// Separator used to build the ids of product cells. Rejected in input ids.
pub const SEPARATOR: char = '⊗';

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub id: String,
    pub dim: u32,
}

impl Cell {
    pub fn new(id: impl Into<String>, dim: u32) -> Self {
        Cell { id: id.into(), dim }
    }

    /// `(-1)^dim`, the Euler characteristic of an open cell.
    pub fn sign(&self) -> i64 {
        sign(self.dim)
    }
}

#[inline]
pub(crate) fn sign(dim: u32) -> i64 {
    if dim.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// A finite decomposition of a definable space into open cells.
#[derive(Debug, Clone, Default)]
pub struct CellSpace {
    cells: Vec<Cell>,
    index: BTreeMap<String, usize>,
}

impl PartialEq for CellSpace {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells
    }
}

impl Eq for CellSpace {}

impl CellSpace {
    /// Validates user-facing ids: non-empty, pairwise distinct and free of [`SEPARATOR`].
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        for cell in &cells {
            if cell.id.contains(SEPARATOR) {
                return Err(Error::ReservedSeparator(cell.id.clone()));
            }
        }
        Self::from_generated(cells)
    }

    /// Builds a space from internally generated ids (which may contain the separator).
    pub(crate) fn from_generated(cells: Vec<Cell>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, cell) in cells.iter().enumerate() {
            if cell.id.is_empty() {
                return Err(Error::EmptyCellId(i));
            }
            if index.insert(cell.id.clone(), i).is_some() {
                return Err(Error::DuplicateCellId(cell.id.clone()));
            }
        }
        Ok(CellSpace { cells, index })
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, u32)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(id, dim)| Cell::new(id, dim)).collect())
    }

    pub fn empty() -> Self {
        CellSpace::default()
    }

    /// A single 0-cell.
    pub fn point(id: &str) -> Self {
        Self::from_generated(alloc::vec![Cell::new(id, 0)]).expect("non-empty id")
    }

    /// `[0,1]` as two vertices and an open edge.
    pub fn closed_interval() -> Self {
        Self::from_pairs([("v0", 0), ("v1", 0), ("e", 1)]).expect("valid")
    }

    /// The circle as one vertex and one open edge.
    pub fn circle() -> Self {
        Self::from_pairs([("v", 0), ("e", 1)]).expect("valid")
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub(crate) fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownCell(id.to_string()))
    }

    /// Euler characteristic: `Σ (-1)^dim` over the cells.
    pub fn chi(&self) -> i64 {
        // cell counts fit comfortably in i64
        self.cells.iter().map(Cell::sign).sum()
    }

    /// Number of cells in each dimension, indexed by dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let top = self.cells.iter().map(|c| c.dim as usize + 1).max().unwrap_or(0);
        let mut f = alloc::vec![0; top];
        for c in &self.cells {
            f[c.dim as usize] += 1;
        }
        f
    }

    /// Cartesian product. Cell `(a, b)` gets id `a⊗b` and dimension `dim a + dim b`.
    pub fn product(&self, other: &CellSpace) -> Result<CellSpace> {
        let mut cells = Vec::with_capacity(self.len() * other.len());
        for a in &self.cells {
            for b in &other.cells {
                cells.push(Cell::new(product_id(&a.id, &b.id), a.dim + b.dim));
            }
        }
        CellSpace::from_generated(cells).map_err(|e| match e {
            Error::DuplicateCellId(id) => Error::IdCollision(id),
            e => e,
        })
    }

    /// The sub-collection of cells whose ids are in `keep`, in the original order.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<CellSpace> {
        let mask = self.mask(keep)?;
        Ok(self.restrict_mask(&mask))
    }

    pub(crate) fn mask<S: AsRef<str>>(&self, keep: &[S]) -> Result<Vec<bool>> {
        let mut mask = alloc::vec![false; self.len()];
        for id in keep {
            mask[self.require(id.as_ref())?] = true;
        }
        Ok(mask)
    }

    pub(crate) fn restrict_mask(&self, mask: &[bool]) -> CellSpace {
        let cells = self.cells.iter().zip(mask).filter(|(_, &k)| k).map(|(c, _)| c.clone()).collect();
        CellSpace::from_generated(cells).expect("sub-collection of a valid space")
    }

    /// Ids of all cells not in `keep`.
    pub fn complement<S: AsRef<str>>(&self, keep: &[S]) -> Result<Vec<String>> {
        let mask = self.mask(keep)?;
        Ok(self.cells.iter().zip(&mask).filter(|(_, &k)| !k).map(|(c, _)| c.id.clone()).collect())
    }

    /// Disjoint union; ids of `other` must not clash with ids of `self`.
    pub fn disjoint_union(&self, other: &CellSpace) -> Result<CellSpace> {
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().cloned());
        CellSpace::from_generated(cells)
    }
}

pub(crate) fn product_id(a: &str, b: &str) -> String {
    format!("{a}{SEPARATOR}{b}")
}

/// An integer-valued function that is constant on every cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructibleFunction {
    space: CellSpace,
    values: Vec<i64>,
}

impl ConstructibleFunction {
    /// `values` must assign exactly one integer to every cell of `space`.
    pub fn new(space: CellSpace, values: &BTreeMap<String, i64>) -> Result<Self> {
        for key in values.keys() {
            if !space.contains(key) {
                return Err(Error::ExtraValue(key.clone()));
            }
        }
        let values = space
            .cells()
            .iter()
            .map(|c| values.get(&c.id).copied().ok_or_else(|| Error::MissingValue(c.id.clone())))
            .collect::<Result<_>>()?;
        Ok(ConstructibleFunction { space, values })
    }

    /// Values listed in the space's cell order.
    pub fn from_values(space: CellSpace, values: Vec<i64>) -> Result<Self> {
        if values.len() != space.len() {
            let missing = space.cells().get(values.len()).map(|c| c.id.clone());
            return match missing {
                Some(id) => Err(Error::MissingValue(id)),
                None => Err(Error::ExtraValue(format!("#{}", space.len()))),
            };
        }
        Ok(ConstructibleFunction { space, values })
    }

    pub fn from_fn(space: CellSpace, mut f: impl FnMut(&Cell) -> i64) -> Self {
        let values = space.cells().iter().map(&mut f).collect();
        ConstructibleFunction { space, values }
    }

    pub fn constant(space: CellSpace, c: i64) -> Self {
        Self::from_fn(space, |_| c)
    }

    /// The indicator function of the whole space.
    pub fn one(space: CellSpace) -> Self {
        Self::constant(space, 1)
    }

    pub fn space(&self) -> &CellSpace {
        &self.space
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, id: &str) -> Option<i64> {
        self.space.index_of(id).map(|i| self.values[i])
    }

    pub fn to_map(&self) -> BTreeMap<String, i64> {
        self.space.cells().iter().map(|c| c.id.clone()).zip(self.values.iter().copied()).collect()
    }

    /// `∫ f dχ = Σ f(cell)·(-1)^dim`.
    pub fn integrate(&self) -> Result<i64> {
        checked_sum(
            self.space
                .cells()
                .iter()
                .zip(&self.values)
                .map(|(c, &v)| checked_mul(v, c.sign()))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// `∫ f dχ` through the telescoped level-set formula
    /// `Σ_{k≥0} [χ(f > k) − χ(f < −k)]`.
    ///
    /// `χ(f > k)` is constant for `k` between consecutive values of `f`, so
    /// the infinite sum is evaluated one run of equal terms at a time.
    pub fn integrate_levelset(&self) -> Result<i64> {
        let levels: BTreeSet<i64> = self.values.iter().copied().collect();
        let mut total = 0i64;

        // k ∈ [prev, p): the set {f > k} equals {f ≥ p}
        let mut prev = 0i64;
        for &p in levels.iter().filter(|&&v| v > 0) {
            let upper = self.level_chi(|v| v >= p);
            let run = p.checked_sub(prev).ok_or(Error::Overflow)?;
            total = total.checked_add(checked_mul(run, upper)?).ok_or(Error::Overflow)?;
            prev = p;
        }

        let mut prev = 0i64;
        for &q in levels.iter().rev().filter(|&&v| v < 0) {
            let depth = q.checked_neg().ok_or(Error::Overflow)?;
            let lower = self.level_chi(|v| v <= q);
            let run = depth.checked_sub(prev).ok_or(Error::Overflow)?;
            total = total.checked_sub(checked_mul(run, lower)?).ok_or(Error::Overflow)?;
            prev = depth;
        }
        Ok(total)
    }

    /// χ of the level set `{cell : pred(f(cell))}`, built as a restricted space.
    fn level_chi(&self, pred: impl Fn(i64) -> bool) -> i64 {
        let mask: Vec<bool> = self.values.iter().map(|&v| pred(v)).collect();
        self.space.restrict_mask(&mask).chi()
    }

    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<ConstructibleFunction> {
        let mask = self.space.mask(keep)?;
        let values = self.values.iter().zip(&mask).filter(|(_, &k)| k).map(|(&v, _)| v).collect();
        Ok(ConstructibleFunction { space: self.space.restrict_mask(&mask), values })
    }
}

/// A cell-to-cell model of a definable map after Hardt trivialization.
///
/// Over every point of a target cell `c`, the fiber meets each source cell `s`
/// with `assign(s) = c` in one open cell of dimension `dim s − dim c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMap {
    source: CellSpace,
    target: CellSpace,
    assign: Vec<usize>,
}

impl CellMap {
    pub fn new(source: CellSpace, target: CellSpace, assign: &BTreeMap<String, String>) -> Result<Self> {
        for key in assign.keys() {
            if !source.contains(key) {
                return Err(Error::ExtraValue(key.clone()));
            }
        }
        let mut idx = Vec::with_capacity(source.len());
        for cell in source.cells() {
            let tgt = assign.get(&cell.id).ok_or_else(|| Error::MissingValue(cell.id.clone()))?;
            idx.push(target.require(tgt)?);
        }
        Self::from_indices(source, target, idx)
    }

    /// `assign[i]` is the index of the target cell of source cell `i`.
    pub fn from_indices(source: CellSpace, target: CellSpace, assign: Vec<usize>) -> Result<Self> {
        if assign.len() != source.len() {
            return Err(Error::MissingValue(
                source.cells().get(assign.len()).map(|c| c.id.clone()).unwrap_or_default(),
            ));
        }
        for (s, &t) in source.cells().iter().zip(&assign) {
            let Some(tc) = target.cells().get(t) else {
                return Err(Error::UnknownCell(format!("#{t}")));
            };
            if s.dim < tc.dim {
                return Err(Error::DimensionIncrease {
                    source_cell: s.id.clone(),
                    source_dim: s.dim,
                    target_cell: tc.id.clone(),
                    target_dim: tc.dim,
                });
            }
        }
        Ok(CellMap { source, target, assign })
    }

    pub fn identity(space: CellSpace) -> Self {
        let assign = (0..space.len()).collect();
        CellMap { source: space.clone(), target: space, assign }
    }

    /// The map collapsing `space` onto a single point with id `point`.
    pub fn collapse(space: CellSpace, point: &str) -> Self {
        let assign = alloc::vec![0; space.len()];
        CellMap { source: space, target: CellSpace::point(point), assign }
    }

    pub fn source(&self) -> &CellSpace {
        &self.source
    }

    pub fn target(&self) -> &CellSpace {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    pub fn image_of(&self, source_id: &str) -> Option<&str> {
        let s = self.source.index_of(source_id)?;
        Some(self.target.cells()[self.assign[s]].id.as_str())
    }

    /// χ of the fiber over any point of target cell `c`.
    pub fn fiber_chi(&self, c: &str) -> Result<i64> {
        let t = self.target.require(c)?;
        let tdim = self.target.cells()[t].dim;
        Ok(self.source.cells().iter().zip(&self.assign).filter(|(_, &a)| a == t).map(|(s, _)| sign(s.dim - tdim)).sum())
    }

    /// `(φ_* f)(c) = Σ_{assign(s)=c} f(s)·(-1)^(dim s − dim c)`, the fiberwise integral.
    pub fn pushforward(&self, f: &ConstructibleFunction) -> Result<ConstructibleFunction> {
        if f.space() != &self.source {
            return Err(Error::SpaceMismatch);
        }
        let mut out = alloc::vec![0i64; self.target.len()];
        for ((s, &t), &v) in self.source.cells().iter().zip(&self.assign).zip(f.values()) {
            let term = checked_mul(v, sign(s.dim - self.target.cells()[t].dim))?;
            out[t] = out[t].checked_add(term).ok_or(Error::Overflow)?;
        }
        ConstructibleFunction::from_values(self.target.clone(), out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn map(pairs: &[(&str, i64)]) -> BTreeMap<String, i64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    /// Unit square: 4 corners, 4 edges (b,t horizontal; l,r vertical), one face.
    fn square() -> CellSpace {
        CellSpace::from_pairs([
            ("p00", 0),
            ("p10", 0),
            ("p01", 0),
            ("p11", 0),
            ("b", 1),
            ("t", 1),
            ("l", 1),
            ("r", 1),
            ("f", 2),
        ])
        .unwrap()
    }

    /// Projection of the square onto the x-axis interval.
    fn projection() -> CellMap {
        let assign: BTreeMap<String, String> = [
            ("p00", "v0"),
            ("p01", "v0"),
            ("l", "v0"),
            ("p10", "v1"),
            ("p11", "v1"),
            ("r", "v1"),
            ("b", "e"),
            ("t", "e"),
            ("f", "e"),
        ]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
        CellMap::new(square(), CellSpace::closed_interval(), &assign).unwrap()
    }

    #[test]
    fn chi_of_basic_spaces() {
        assert_eq!(CellSpace::empty().chi(), 0);
        assert_eq!(CellSpace::closed_interval().chi(), 1);
        assert_eq!(CellSpace::from_pairs([("v0", 0), ("e", 1)]).unwrap().chi(), 0);
        assert_eq!(CellSpace::circle().chi(), 0);
        assert_eq!(square().chi(), 1);
    }

    #[test]
    fn rejects_bad_ids() {
        assert_eq!(CellSpace::from_pairs([("a", 0), ("a", 1)]), Err(Error::DuplicateCellId("a".into())));
        assert_eq!(CellSpace::from_pairs([("", 0)]), Err(Error::EmptyCellId(0)));
        assert_eq!(CellSpace::from_pairs([("a⊗b", 0)]), Err(Error::ReservedSeparator("a⊗b".into())));
    }

    #[test]
    fn integrate_examples() {
        let x = CellSpace::closed_interval();
        let f = ConstructibleFunction::new(x.clone(), &map(&[("v0", 1), ("v1", 1), ("e", 0)])).unwrap();
        assert_eq!(f.integrate(), Ok(2));
        assert_eq!(f.integrate_levelset(), Ok(2));

        let c = ConstructibleFunction::constant(square(), -7);
        assert_eq!(c.integrate(), Ok(-7 * square().chi()));

        // SO(2) acting on S²: poles carry χ(Hom(ℤ^ℓ, SO(2))) = 0, the open interval 1.
        let orbit = CellSpace::from_pairs([("s", 0), ("n", 0), ("e", 1)]).unwrap();
        let f = ConstructibleFunction::new(orbit, &map(&[("s", 0), ("n", 0), ("e", 1)])).unwrap();
        assert_eq!(f.integrate(), Ok(-1));
    }

    #[test]
    fn levelset_matches_direct_sum() {
        let half_open = CellSpace::from_pairs([("v0", 0), ("e", 1)]).unwrap();
        let f = ConstructibleFunction::new(half_open, &map(&[("v0", 2), ("e", -1)])).unwrap();
        // direct cell sum: 2·1 + (−1)·(−1)
        assert_eq!(f.integrate(), Ok(3));
        assert_eq!(f.integrate_levelset(), Ok(3));

        let zero = ConstructibleFunction::constant(square(), 0);
        assert_eq!(zero.integrate_levelset(), Ok(0));
    }

    #[test]
    fn function_totality() {
        let x = CellSpace::closed_interval();
        assert_eq!(
            ConstructibleFunction::new(x.clone(), &map(&[("v0", 1), ("e", 0)])),
            Err(Error::MissingValue("v1".into()))
        );
        assert_eq!(
            ConstructibleFunction::new(x, &map(&[("v0", 1), ("v1", 1), ("e", 0), ("z", 3)])),
            Err(Error::ExtraValue("z".into()))
        );
    }

    #[test]
    fn overflow_is_an_error() {
        let x = CellSpace::from_pairs([("a", 0), ("b", 0)]).unwrap();
        let f = ConstructibleFunction::from_values(x, vec![i64::MAX, 1]).unwrap();
        assert_eq!(f.integrate(), Err(Error::Overflow));
    }

    #[test]
    fn products() {
        let i = CellSpace::closed_interval();
        assert!(i.product(&CellSpace::empty()).unwrap().is_empty());
        let sq = i.product(&i).unwrap();
        assert_eq!(sq.len(), 9);
        assert_eq!(sq.chi(), 1);
        assert_eq!(CellSpace::circle().product(&i).unwrap().chi(), 0);
        assert!(sq.contains("v0⊗e"));
    }

    #[test]
    fn restrictions() {
        let i = CellSpace::closed_interval();
        assert_eq!(i.restrict(&["v0", "v1", "e"]).unwrap(), i);
        let open = i.restrict(&["e"]).unwrap();
        assert_eq!(open.chi(), -1);
        assert_eq!(i.restrict::<&str>(&[]).unwrap().chi(), 0);
        assert_eq!(i.restrict(&["q"]), Err(Error::UnknownCell("q".into())));
    }

    #[test]
    fn fiber_chi_of_projection() {
        let m = projection();
        assert_eq!(m.fiber_chi("v0"), Ok(1));
        assert_eq!(m.fiber_chi("v1"), Ok(1));
        assert_eq!(m.fiber_chi("e"), Ok(1));
        assert_eq!(m.fiber_chi("nope"), Err(Error::UnknownCell("nope".into())));

        let id = CellMap::identity(square());
        for c in square().cells() {
            assert_eq!(id.fiber_chi(&c.id), Ok(1));
        }
    }

    #[test]
    fn pushforward_examples() {
        let m = projection();
        let one = ConstructibleFunction::one(square());
        let pushed = m.pushforward(&one).unwrap();
        assert_eq!(pushed.values(), &[1, 1, 1]);
        assert_eq!(pushed.integrate(), one.integrate());
        assert_eq!(pushed.integrate(), Ok(1));

        let f = ConstructibleFunction::from_fn(square(), |c| c.dim as i64 + 3);
        assert_eq!(CellMap::identity(square()).pushforward(&f).unwrap(), f);

        let circle = ConstructibleFunction::one(CellSpace::circle());
        let collapsed = CellMap::collapse(CellSpace::circle(), "pt").pushforward(&circle).unwrap();
        assert_eq!(collapsed.values(), &[0]);

        let wrong = ConstructibleFunction::one(CellSpace::circle());
        assert_eq!(m.pushforward(&wrong), Err(Error::SpaceMismatch));
    }

    #[test]
    fn cell_map_rejects_dimension_increase() {
        let src = CellSpace::from_pairs([("p", 0)]).unwrap();
        let tgt = CellSpace::from_pairs([("e", 1)]).unwrap();
        let assign = [("p".to_string(), "e".to_string())].into_iter().collect();
        assert!(matches!(CellMap::new(src, tgt, &assign), Err(Error::DimensionIncrease { .. })));
    }
}

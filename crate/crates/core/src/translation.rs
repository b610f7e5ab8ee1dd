//! Finite translation groupoids `G⋉X` on rigid `G`-cell complexes.
//!
//! A [`RigidGComplex`] is a finite group acting on a [`CellSpace`] by
//! dimension-preserving permutations of cells. Rigidity (an element that maps
//! a cell to itself fixes it pointwise) is assumed, not checked: it is what
//! makes fixed sets subcomplexes. Barycentric subdivisions of regular
//! `G`-complexes are rigid.
//!
//! This module computes Γ-Euler characteristics of `G⋉X` by three routes
//! that must agree:
//!
//! * [`chi_gamma_strata`]: integrate `χ(G_x\Hom(Γ,G_x))` over the orbit space,
//! * [`lambda_chi`]: χ of the orbit space of the explicit Γ-inertia complex,
//! * [`chi_gamma_noniter`]: `Σ_{[φ]} χ(C_G(φ)\X^{⟨φ⟩})` over conjugacy classes of
//!   homomorphisms,
//!
//! plus the recursive order-ℓ characteristic [`chi_order_ell`] and the
//! string-theoretic one [`chi_string_orb`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::catalog::IsotropyModel;
use crate::error::{checked_sum, Error, Result};
use crate::group::{FiniteGroup, HomTuple};
use crate::groupoid::OrbitGroupoid;
use crate::presentation::Presentation;
use crate::space::{Cell, CellMap, CellSpace};

/// Default cap on the order ℓ accepted by [`chi_order_ell`].
pub const DEFAULT_RECURSION_CAP: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidGComplex {
    group: FiniteGroup,
    space: CellSpace,
    /// `action[g][c]` is the index of the cell `g·c`.
    action: Vec<Vec<usize>>,
}

/// Orbit decomposition of the cells of a complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbits {
    /// Orbit index of every cell.
    pub of: Vec<usize>,
    /// Representative cell of every orbit: the cell with the smallest id.
    /// Orbits are numbered in increasing order of representative id.
    pub reps: Vec<usize>,
}

impl RigidGComplex {
    /// Validates that `action` is a homomorphism from `group` into the
    /// dimension-preserving permutations of the cells.
    pub fn new(group: FiniteGroup, space: CellSpace, action: Vec<Vec<usize>>) -> Result<Self> {
        let n = space.len();
        if action.len() < group.order() {
            return Err(Error::ActionMissing(action.len()));
        }
        if action.len() > group.order() {
            return Err(Error::ElementOutOfRange(group.order(), group.order()));
        }
        for (g, perm) in action.iter().enumerate() {
            if perm.len() != n {
                return Err(Error::ActionNotBijective(g));
            }
            let mut hit = vec![false; n];
            for (c, &d) in perm.iter().enumerate() {
                if d >= n || core::mem::replace(&mut hit[d], true) {
                    return Err(Error::ActionNotBijective(g));
                }
                if space.cells()[c].dim != space.cells()[d].dim {
                    return Err(Error::ActionDimension { element: g, cell: space.cells()[c].id.clone() });
                }
            }
        }
        if action.first().is_some_and(|id| id.iter().enumerate().any(|(c, &d)| c != d)) {
            return Err(Error::ActionIdentity);
        }
        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h);
                if (0..n).any(|c| action[g][action[h][c]] != action[gh][c]) {
                    return Err(Error::ActionNotHomomorphism(g, h));
                }
            }
        }
        Ok(RigidGComplex { group, space, action })
    }

    /// Action given as id-to-id maps keyed by group element. The identity
    /// entry may be omitted; every other element must be present.
    pub fn from_maps(
        group: FiniteGroup,
        space: CellSpace,
        maps: &BTreeMap<usize, BTreeMap<String, String>>,
    ) -> Result<Self> {
        if let Some((&g, _)) = maps.range(group.order()..).next() {
            return Err(Error::ElementOutOfRange(g, group.order()));
        }
        let mut action = Vec::with_capacity(group.order());
        for g in group.elements() {
            let Some(map) = maps.get(&g) else {
                if g == 0 {
                    action.push((0..space.len()).collect());
                    continue;
                }
                return Err(Error::ActionMissing(g));
            };
            for key in map.keys() {
                space.require(key)?;
            }
            let perm = space
                .cells()
                .iter()
                .map(|c| {
                    let img = map.get(&c.id).ok_or_else(|| Error::MissingValue(format!("{} (element {g})", c.id)))?;
                    space.require(img)
                })
                .collect::<Result<Vec<_>>>()?;
            action.push(perm);
        }
        Self::new(group, space, action)
    }

    /// Every element acts as the identity.
    pub fn trivial_action(group: FiniteGroup, space: CellSpace) -> Self {
        let action = vec![(0..space.len()).collect(); group.order()];
        RigidGComplex { group, space, action }
    }

    /// Disjoint union of coset spaces `G/H_k`, the cells of the `k`-th orbit
    /// having dimension `dim_k`. Cell ids are `o{k}.{r}` with `r` the minimal
    /// element of the coset.
    pub fn induced(group: FiniteGroup, orbits: &[(Vec<usize>, u32)]) -> Result<Self> {
        let mut cells = Vec::new();
        let mut action: Vec<Vec<usize>> = vec![Vec::new(); group.order()];
        for (k, (h, dim)) in orbits.iter().enumerate() {
            let cosets = group.coset_action(h)?;
            let offset = cells.len();
            for rep in cosets.reps() {
                cells.push(Cell::new(format!("o{k}.{rep}"), *dim));
            }
            for g in group.elements() {
                action[g].extend(cosets.perms[g].iter().map(|&i| i + offset));
            }
        }
        let space = CellSpace::new(cells)?;
        Self::new(group, space, action)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn space(&self) -> &CellSpace {
        &self.space
    }

    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// Index of `g · cell`.
    pub fn act(&self, g: usize, cell: usize) -> usize {
        self.action[g][cell]
    }

    fn stabilizer_of(&self, c: usize) -> Vec<usize> {
        self.group.elements().filter(|&g| self.action[g][c] == c).collect()
    }

    /// Sorted stabilizer subgroup `G_c`.
    pub fn stabilizer(&self, cell: &str) -> Result<Vec<usize>> {
        Ok(self.stabilizer_of(self.space.require(cell)?))
    }

    pub fn orbits(&self) -> Orbits {
        let n = self.space.len();
        let mut of = vec![usize::MAX; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for c in 0..n {
            if of[c] != usize::MAX {
                continue;
            }
            let k = members.len();
            let mut orbit = Vec::new();
            for g in self.group.elements() {
                let d = self.action[g][c];
                if of[d] == usize::MAX {
                    of[d] = k;
                    orbit.push(d);
                }
            }
            members.push(orbit);
        }
        let ids = self.space.cells();
        let mut reps: Vec<(usize, usize)> = members
            .iter()
            .enumerate()
            .map(|(k, m)| (k, *m.iter().min_by(|&&a, &&b| ids[a].id.cmp(&ids[b].id)).expect("non-empty orbit")))
            .collect();
        reps.sort_by(|a, b| ids[a.1].id.cmp(&ids[b.1].id));
        let mut renumber = vec![0; reps.len()];
        for (new, &(old, _)) in reps.iter().enumerate() {
            renumber[old] = new;
        }
        Orbits { of: of.into_iter().map(|k| renumber[k]).collect(), reps: reps.into_iter().map(|(_, r)| r).collect() }
    }

    /// χ of the orbit space `G\X`: one open cell per orbit of cells.
    pub fn orbit_space_chi(&self) -> i64 {
        self.orbits().reps.iter().map(|&r| self.space.cells()[r].sign()).sum()
    }

    /// The orbit space as a cell space, cells named after their representatives.
    pub fn orbit_space(&self) -> CellSpace {
        let cells = self.orbits().reps.iter().map(|&r| self.space.cells()[r].clone()).collect();
        CellSpace::from_generated(cells).expect("representatives are distinct cells")
    }

    /// Orbit-space groupoid: one cell per orbit labelled by the stabilizer of its representative.
    pub fn orbit_groupoid(&self) -> OrbitGroupoid {
        let reps = self.orbits().reps;
        let labels = reps
            .iter()
            .map(|&r| {
                let (h, _) = self.group.subgroup(&self.stabilizer_of(r)).expect("stabilizers are subgroups");
                IsotropyModel::Finite(h)
            })
            .collect();
        OrbitGroupoid::from_parts(self.orbit_space(), labels)
    }

    /// `X^{⟨t⟩}` with the action of the centralizer `C_G(t)`, which becomes
    /// the group of the result (re-indexed as in [`FiniteGroup::subgroup`]).
    pub fn fixed_subcomplex(&self, t: &HomTuple) -> Result<RigidGComplex> {
        self.group.check_tuple(t)?;
        let keep: Vec<usize> =
            (0..self.space.len()).filter(|&c| t.images().iter().all(|&x| self.action[x][c] == c)).collect();
        let centralizer = self.group.centralizer(t.images());
        let (group, emb) = self.group.subgroup(&centralizer)?;
        self.sub_complex(group, &emb, &keep)
    }

    /// Restriction to the cells `keep` (which must be invariant under the
    /// elements `emb` of the ambient group), acted on by `group` through `emb`.
    fn sub_complex(&self, group: FiniteGroup, emb: &[usize], keep: &[usize]) -> Result<RigidGComplex> {
        let mut local = vec![usize::MAX; self.space.len()];
        for (i, &c) in keep.iter().enumerate() {
            local[c] = i;
        }
        let cells = keep.iter().map(|&c| self.space.cells()[c].clone()).collect();
        let space = CellSpace::from_generated(cells)?;
        let mut action = Vec::with_capacity(group.order());
        for &g in emb {
            let perm = keep
                .iter()
                .map(|&c| match local[self.action[g][c]] {
                    usize::MAX => Err(Error::NotInvariant(self.space.cells()[c].id.clone())),
                    i => Ok(i),
                })
                .collect::<Result<Vec<_>>>()?;
            action.push(perm);
        }
        Ok(RigidGComplex { group, space, action })
    }

    /// Restriction to a `G`-invariant set of cells.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<RigidGComplex> {
        let mask = self.space.mask(keep)?;
        let idx: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        let emb: Vec<usize> = self.group.elements().collect();
        self.sub_complex(self.group.clone(), &emb, &idx)
    }

    /// `X × Y` with the product group `G × H` acting factorwise.
    pub fn product(&self, other: &RigidGComplex) -> Result<RigidGComplex> {
        let group = self.group.direct_product(&other.group);
        let space = self.space.product(&other.space)?;
        let (m, ny) = (other.group.order(), other.space.len());
        let action = group
            .elements()
            .map(|gh| {
                let (g, h) = (gh / m, gh % m);
                (0..space.len()).map(|c| self.action[g][c / ny] * ny + other.action[h][c % ny]).collect()
            })
            .collect();
        Ok(RigidGComplex { group, space, action })
    }

    /// Disjoint union of two complexes over the same group.
    pub fn disjoint_union(&self, other: &RigidGComplex) -> Result<RigidGComplex> {
        if self.group != other.group {
            return Err(Error::NotSubgroup("disjoint union needs the same group".into()));
        }
        let space = self.space.disjoint_union(&other.space)?;
        let shift = self.space.len();
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&c| c + shift)).collect())
            .collect();
        Ok(RigidGComplex { group: self.group.clone(), space, action })
    }
}

/// The Γ-inertia complex: cells `(t, c)` with every image of `t` in `G_c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InertiaComplex {
    /// `G` acting by `g·(t, c) = (g t g⁻¹, g·c)`.
    pub complex: RigidGComplex,
    /// `pairs[i]` is the `(tuple, base cell index)` of cell `i`.
    pub pairs: Vec<(HomTuple, usize)>,
}

impl InertiaComplex {
    /// Base cell index of every inertia cell.
    pub fn anchor(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|(_, c)| *c)
    }
}

fn inertia_id(cell: &str, t: &HomTuple) -> String {
    let images: Vec<String> = t.images().iter().map(|x| format!("{x}")).collect();
    format!("{cell}[{}]", images.join(","))
}

/// Builds `Λ_Γ(G⋉X)`; an inertia cell has the dimension of its base cell.
pub fn inertia_complex(p: &Presentation, x: &RigidGComplex) -> Result<InertiaComplex> {
    let g = x.group();
    let mut pairs = Vec::new();
    let mut cells = Vec::new();
    let mut hom_cache: BTreeMap<Vec<usize>, Vec<HomTuple>> = BTreeMap::new();
    for (c, cell) in x.space().cells().iter().enumerate() {
        let stab = x.stabilizer_of(c);
        if !hom_cache.contains_key(&stab) {
            let homs = p.hom_into_subgroup(g, &stab)?;
            hom_cache.insert(stab.clone(), homs);
        }
        for t in &hom_cache[&stab] {
            cells.push(Cell::new(inertia_id(&cell.id, t), cell.dim));
            pairs.push((t.clone(), c));
        }
    }
    let index: BTreeMap<(&HomTuple, usize), usize> = pairs.iter().enumerate().map(|(i, (t, c))| ((t, *c), i)).collect();
    let mut action = Vec::with_capacity(g.order());
    for h in g.elements() {
        let perm = pairs
            .iter()
            .map(|(t, c)| {
                let moved = g.conj_tuple(h, t);
                index.get(&(&moved, x.act(h, *c))).copied().ok_or(Error::NotConjugationClosed)
            })
            .collect::<Result<Vec<_>>>()?;
        action.push(perm);
    }
    let space = CellSpace::from_generated(cells)?;
    let complex = RigidGComplex::new(g.clone(), space, action)?;
    Ok(InertiaComplex { complex, pairs })
}

/// `Λχ_Γ(G⋉X) = χ(|Λ_Γ(G⋉X)|)`.
pub fn lambda_chi(p: &Presentation, x: &RigidGComplex) -> Result<i64> {
    Ok(inertia_complex(p, x)?.complex.orbit_groupoid().space().chi())
}

/// `χ_Γ(G⋉X)` by stratum-wise integration over the orbit space.
pub fn chi_gamma_strata(p: &Presentation, x: &RigidGComplex) -> Result<i64> {
    x.orbit_groupoid().chi_gamma(p)
}

/// One summand of the non-iterative formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorTerm {
    pub rep: HomTuple,
    pub chi: i64,
}

/// Summands `χ(C_G(φ)\X^{⟨φ⟩})` over representatives of `G\Hom(Γ,G)`.
pub fn twisted_sectors(p: &Presentation, x: &RigidGComplex) -> Result<Vec<SectorTerm>> {
    let g = x.group();
    let classes = g.conj_orbit_count(&p.hom_enumerate(g))?;
    classes
        .reps
        .into_iter()
        .map(|t| {
            let chi = x.fixed_subcomplex(&t)?.orbit_space_chi();
            Ok(SectorTerm { rep: t, chi })
        })
        .collect()
}

/// `χ_Γ(G⋉X) = Σ_{[φ] ∈ G\Hom(Γ,G)} χ(C_G(φ)\X^{⟨φ⟩})`.
pub fn chi_gamma_noniter(p: &Presentation, x: &RigidGComplex) -> Result<i64> {
    checked_sum(twisted_sectors(p, x)?.into_iter().map(|s| s.chi))
}

/// Orbifold Euler characteristic `Σ_{[g]} χ(C_G(g)\X^{⟨g⟩})`.
pub fn chi_string_orb(x: &RigidGComplex) -> Result<i64> {
    let g = x.group();
    let mut terms = Vec::new();
    for class in g.conjugacy_classes() {
        terms.push(x.fixed_subcomplex(&HomTuple(vec![class.rep]))?.orbit_space_chi());
    }
    checked_sum(terms)
}

/// `χ^(ℓ)(X, G)`: `χ(G\X)` for `ℓ = 0`, otherwise `Σ_{[g]} χ^(ℓ-1)(X^{⟨g⟩}, C_G(g))`.
pub fn chi_order_ell(x: &RigidGComplex, ell: usize, cap: usize) -> Result<i64> {
    if ell > cap {
        return Err(Error::RecursionCap { requested: ell, cap });
    }
    order_ell(x, ell)
}

fn order_ell(x: &RigidGComplex, ell: usize) -> Result<i64> {
    if ell == 0 {
        return Ok(x.orbit_space_chi());
    }
    let g = x.group();
    let mut terms = Vec::new();
    for class in g.conjugacy_classes() {
        let fixed = x.fixed_subcomplex(&HomTuple(vec![class.rep]))?;
        terms.push(if fixed.space().is_empty() { 0 } else { order_ell(&fixed, ell - 1)? });
    }
    checked_sum(terms)
}

/// One node of the `χ^(ℓ)` recursion, for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderEllNode {
    /// Class representatives chosen along the path, as elements of the
    /// successive centralizers.
    pub path: Vec<usize>,
    pub group_order: usize,
    pub cells: usize,
    pub value: i64,
}

/// `χ^(ℓ)` together with the value at every node of the recursion tree
/// (pre-order, root first).
pub fn chi_order_ell_tree(x: &RigidGComplex, ell: usize, cap: usize) -> Result<(i64, Vec<OrderEllNode>)> {
    if ell > cap {
        return Err(Error::RecursionCap { requested: ell, cap });
    }
    let mut nodes = Vec::new();
    let v = order_ell_tree(x, ell, Vec::new(), &mut nodes)?;
    Ok((v, nodes))
}

fn order_ell_tree(x: &RigidGComplex, ell: usize, path: Vec<usize>, nodes: &mut Vec<OrderEllNode>) -> Result<i64> {
    let slot = nodes.len();
    nodes.push(OrderEllNode { path: path.clone(), group_order: x.group().order(), cells: x.space().len(), value: 0 });
    let value = if ell == 0 {
        x.orbit_space_chi()
    } else {
        let mut terms = Vec::new();
        for class in x.group().conjugacy_classes() {
            let fixed = x.fixed_subcomplex(&HomTuple(vec![class.rep]))?;
            let mut sub = path.clone();
            sub.push(class.rep);
            terms.push(order_ell_tree(&fixed, ell - 1, sub, nodes)?);
        }
        checked_sum(terms)?
    };
    nodes[slot].value = value;
    Ok(value)
}

/// Anchor map `|Λ_Γ(G⋉X)| → |G⋉X|`, `[(t, c)] ↦ [c]`, on orbit spaces.
///
/// Inertia cells have the dimension of their base cell, so every fiber is a
/// finite set of points and the pushforward of `1` counts
/// `|G_c\Hom(Γ,G_c)|` over each orbit.
pub fn anchor_map(p: &Presentation, x: &RigidGComplex) -> Result<CellMap> {
    let inertia = inertia_complex(p, x)?;
    let inertia_orbits = inertia.complex.orbits();
    let base_orbits = x.orbits();
    let assign = inertia_orbits.reps.iter().map(|&r| base_orbits.of[inertia.pairs[r].1]).collect();
    CellMap::from_indices(inertia.complex.orbit_space(), x.orbit_space(), assign)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationCheck {
    /// `Λχ_{Γ₂}(Λ_{Γ₁}(G⋉X))`
    pub chi_iterated: i64,
    /// `Λχ_{Γ₁×Γ₂}(G⋉X)`
    pub chi_product: i64,
}

impl IterationCheck {
    pub fn agrees(&self) -> bool {
        self.chi_iterated == self.chi_product
    }
}

pub fn iterate_inertia(p1: &Presentation, p2: &Presentation, x: &RigidGComplex) -> Result<IterationCheck> {
    let first = inertia_complex(p1, x)?;
    Ok(IterationCheck { chi_iterated: lambda_chi(p2, &first.complex)?, chi_product: lambda_chi(&p1.product(p2), x)? })
}

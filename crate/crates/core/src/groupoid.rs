//! Orbit-space-definable groupoids as labelled cell spaces.
//!
//! An [`OrbitGroupoid`] records the orbit space `|𝒢|` as a [`CellSpace`] and
//! the isotropy group of each stratum as an [`IsotropyModel`]. Strata are
//! partitioned by identical labels, a refinement of the weak-orbit-type
//! partition that leaves every integral unchanged.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::catalog::IsotropyModel;
use crate::error::{checked_mul, checked_sum, Error, Result};
use crate::presentation::Presentation;
use crate::space::{Cell, CellSpace, ConstructibleFunction};
use crate::translation::{chi_gamma_strata, RigidGComplex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitGroupoid {
    space: CellSpace,
    isotropy: Vec<IsotropyModel>,
}

/// Contribution of one stratum to `χ_Γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumTerm {
    pub cell: String,
    pub dim: u32,
    pub isotropy: String,
    /// `χ(K\Hom(Γ,K))` for the stratum's isotropy `K`.
    pub value: i64,
    /// `(-1)^dim · value`
    pub contribution: i64,
}

impl OrbitGroupoid {
    /// Every cell of `space` must carry exactly one label.
    pub fn new(space: CellSpace, labels: BTreeMap<String, IsotropyModel>) -> Result<Self> {
        if let Some(extra) = labels.keys().find(|k| !space.contains(k)) {
            return Err(Error::ExtraValue(extra.clone()));
        }
        let mut labels = labels;
        let isotropy = space
            .cells()
            .iter()
            .map(|c| labels.remove(&c.id).ok_or_else(|| Error::MissingValue(c.id.clone())))
            .collect::<Result<_>>()?;
        Ok(OrbitGroupoid { space, isotropy })
    }

    pub fn from_strata(strata: Vec<(Cell, IsotropyModel)>) -> Result<Self> {
        let (cells, isotropy): (Vec<Cell>, Vec<IsotropyModel>) = strata.into_iter().unzip();
        Ok(OrbitGroupoid { space: CellSpace::new(cells)?, isotropy })
    }

    pub(crate) fn from_parts(space: CellSpace, isotropy: Vec<IsotropyModel>) -> Self {
        debug_assert_eq!(space.len(), isotropy.len());
        OrbitGroupoid { space, isotropy }
    }

    /// A bundle of compact groups: every point has isotropy `label`.
    pub fn constant(space: CellSpace, label: IsotropyModel) -> Self {
        let isotropy = alloc::vec![label; space.len()];
        OrbitGroupoid { space, isotropy }
    }

    pub fn space(&self) -> &CellSpace {
        &self.space
    }

    pub fn labels(&self) -> &[IsotropyModel] {
        &self.isotropy
    }

    pub fn label(&self, id: &str) -> Option<&IsotropyModel> {
        self.space.index_of(id).map(|i| &self.isotropy[i])
    }

    pub fn strata(&self) -> impl Iterator<Item = (&Cell, &IsotropyModel)> {
        self.space.cells().iter().zip(&self.isotropy)
    }

    /// Whether any label is a user-supplied catalog entry.
    pub fn uses_custom_entries(&self) -> bool {
        self.isotropy.iter().any(IsotropyModel::is_user_supplied)
    }

    /// The constructible function `x ↦ χ(𝒢_x^x\Hom(Γ,𝒢_x^x))`.
    pub fn integrand(&self, p: &Presentation) -> Result<ConstructibleFunction> {
        let values = self
            .strata()
            .map(|(c, m)| m.chi_hom_quotient(p).map_err(|e| e.at_cell(&c.id)))
            .collect::<Result<Vec<_>>>()?;
        ConstructibleFunction::from_values(self.space.clone(), values)
    }

    /// Per-stratum summands of `χ_Γ`, in cell order.
    pub fn chi_gamma_breakdown(&self, p: &Presentation) -> Result<Vec<StratumTerm>> {
        self.strata()
            .map(|(c, m)| {
                let value = m.chi_hom_quotient(p).map_err(|e| e.at_cell(&c.id))?;
                Ok(StratumTerm {
                    cell: c.id.clone(),
                    dim: c.dim,
                    isotropy: m.label(),
                    value,
                    contribution: checked_mul(value, c.sign())?,
                })
            })
            .collect()
    }

    /// `χ_Γ(𝒢) = ∫_{|𝒢|} χ(𝒢_x^x\Hom(Γ,𝒢_x^x)) dχ`.
    ///
    /// Computed as a direct stratum sum and as the Euler integral of
    /// [`Self::integrand`]; the two must agree.
    pub fn chi_gamma(&self, p: &Presentation) -> Result<i64> {
        let direct = checked_sum(self.chi_gamma_breakdown(p)?.into_iter().map(|t| t.contribution))?;
        let integral = self.integrand(p)?.integrate()?;
        if direct != integral {
            return Err(Error::Disagreement {
                name: "chi_gamma: stratum sum vs integral".into(),
                lhs: direct,
                rhs: integral,
            });
        }
        Ok(direct)
    }

    /// `χ_ℤ(𝒢) = ∫ χ(Ad_{𝒢_x^x}\𝒢_x^x) dχ`, evaluated from the cell models of
    /// the adjoint quotients. Custom labels without a cell model fall back to
    /// their χ table.
    pub fn chi_z(&self) -> Result<i64> {
        let z = Presentation::integers();
        let terms = self
            .strata()
            .map(|(c, m)| {
                let chi = match m.ad_quotient_model() {
                    Ok(model) => model.chi(),
                    Err(_) if matches!(m, IsotropyModel::Custom(_)) => m.chi_hom_quotient(&z)?,
                    Err(e) => return Err(e.at_cell(&c.id)),
                };
                checked_mul(chi, c.sign())
            })
            .collect::<Result<Vec<_>>>()?;
        checked_sum(terms)
    }

    /// Product groupoid: product orbit space, product isotropy labels.
    pub fn product(&self, other: &OrbitGroupoid) -> Result<OrbitGroupoid> {
        let space = self.space.product(&other.space)?;
        let mut isotropy = Vec::with_capacity(space.len());
        for a in &self.isotropy {
            for b in &other.isotropy {
                isotropy.push(IsotropyModel::Product(alloc::vec![a.clone(), b.clone()]));
            }
        }
        Ok(OrbitGroupoid { space, isotropy })
    }

    /// Restriction to the strata `keep`.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<OrbitGroupoid> {
        let mask = self.space.mask(keep)?;
        let isotropy = self.isotropy.iter().zip(&mask).filter(|(_, &k)| k).map(|(m, _)| m.clone()).collect();
        Ok(OrbitGroupoid { space: self.space.restrict_mask(&mask), isotropy })
    }
}

/// `χ_Γ` of a groupoid covered by disjoint chart images, each the orbit space
/// of a finite translation groupoid. Disjointness is the caller's assertion.
pub fn chi_gamma_atlas(pieces: &[RigidGComplex], p: &Presentation) -> Result<i64> {
    let values = pieces
        .iter()
        .enumerate()
        .map(|(index, x)| chi_gamma_strata(p, x).map_err(|e| Error::AtlasPiece { index, source: e.into() }))
        .collect::<Result<Vec<_>>>()?;
    checked_sum(values)
}

/// Prediction of the abelian-extension formula
/// `χ_{ℤ^ℓ}(𝒢) = χ(Hom(ℤ^ℓ, B)) · χ_{ℤ^ℓ}(H⋉X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtensionPrediction {
    pub predicted: i64,
    /// `χ(Hom(ℤ^ℓ, B))` for the bundle fiber `B`.
    pub factor_b: i64,
    /// `χ_{ℤ^ℓ}(H⋉X)`
    pub factor_h: i64,
}

/// Evaluates the abelian-extension formula for a fiber `B` (finite abelian or
/// a torus) and a finite group `H` acting on `x`. The formula only holds when
/// every isotropy group of the extension is abelian; for non-abelian
/// extensions such as `O(2)` it can fail.
pub fn abelian_extension_chi(fiber: &IsotropyModel, x: &RigidGComplex, ell: usize) -> Result<ExtensionPrediction> {
    let p = Presentation::free_abelian(ell);
    let factor_b = fiber.hom_chi_abelian(&p)?;
    let factor_h = chi_gamma_strata(&p, x)?;
    Ok(ExtensionPrediction { predicted: checked_mul(factor_b, factor_h)?, factor_b, factor_h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use alloc::string::ToString;
    use alloc::vec;

    fn so2_on_sphere() -> OrbitGroupoid {
        OrbitGroupoid::from_strata(vec![
            (Cell::new("south", 0), IsotropyModel::Torus(1)),
            (Cell::new("north", 0), IsotropyModel::Torus(1)),
            (Cell::new("band", 1), IsotropyModel::trivial()),
        ])
        .unwrap()
    }

    fn so3_on_r3() -> OrbitGroupoid {
        OrbitGroupoid::from_strata(vec![
            (Cell::new("origin", 0), IsotropyModel::SO3),
            (Cell::new("ray", 1), IsotropyModel::Torus(1)),
        ])
        .unwrap()
    }

    fn point(label: IsotropyModel) -> OrbitGroupoid {
        OrbitGroupoid::constant(CellSpace::point("pt"), label)
    }

    #[test]
    fn so2_on_sphere_values() {
        let g = so2_on_sphere();
        for ell in 1..4 {
            assert_eq!(g.chi_gamma(&Presentation::free_abelian(ell)), Ok(-1));
        }
        for k in 1..6u64 {
            assert_eq!(g.chi_gamma(&Presentation::cyclic(k).unwrap()), Ok(2 * k as i64 - 1));
        }
        let squared = g.product(&g).unwrap();
        for k in 1..4u64 {
            assert_eq!(squared.chi_gamma(&Presentation::cyclic(k).unwrap()), Ok((2 * k as i64 - 1).pow(2)));
        }
    }

    #[test]
    fn so3_on_r3_values() {
        let g = so3_on_r3();
        assert_eq!(g.chi_z(), Ok(1));
        assert_eq!(g.chi_gamma(&Presentation::integers()), Ok(1));
        assert_eq!(g.restrict(&["origin"]).unwrap().chi_z(), Ok(1));
        assert_eq!(g.restrict(&["ray"]).unwrap().chi_z(), Ok(0));
        let err = g.chi_gamma(&Presentation::free_abelian(2)).unwrap_err();
        match err {
            Error::Unsupported(u) => {
                assert_eq!(u.cell.as_deref(), Some("origin"));
                assert_eq!(u.presentation, "free_abelian(2)");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn so2_on_x_values() {
        // ray [0,∞) with SO(2) isotropy, disk radii (0,1] with trivial isotropy
        let a = OrbitGroupoid::from_strata(vec![
            (Cell::new("origin", 0), IsotropyModel::Torus(1)),
            (Cell::new("ray", 1), IsotropyModel::Torus(1)),
            (Cell::new("rim", 0), IsotropyModel::trivial()),
            (Cell::new("radius", 1), IsotropyModel::trivial()),
        ])
        .unwrap();
        for p in [Presentation::integers(), Presentation::free_abelian(2), Presentation::cyclic(3).unwrap()] {
            assert_eq!(a.chi_gamma(&p), Ok(0));
        }
    }

    #[test]
    fn small_groupoids() {
        assert_eq!(point(IsotropyModel::trivial()).chi_gamma(&Presentation::cyclic(4).unwrap()), Ok(1));
        assert_eq!(point(IsotropyModel::Finite(FiniteGroup::symmetric(3))).chi_z(), Ok(3));
        assert_eq!(OrbitGroupoid::constant(CellSpace::circle(), IsotropyModel::trivial()).chi_z(), Ok(0));
        let c2 = point(IsotropyModel::Finite(FiniteGroup::cyclic(2)));
        assert_eq!(c2.product(&c2).unwrap().chi_gamma(&Presentation::integers()), Ok(4));
        let g = so2_on_sphere();
        let unit = g.product(&point(IsotropyModel::trivial())).unwrap();
        assert_eq!(unit.chi_gamma(&Presentation::cyclic(3).unwrap()), g.chi_gamma(&Presentation::cyclic(3).unwrap()));
    }

    #[test]
    fn bundle_of_compact_groups() {
        // χ_Γ = χ(base) · χ(K\Hom(Γ,K))
        let base = CellSpace::closed_interval().product(&CellSpace::closed_interval()).unwrap();
        let k = IsotropyModel::Finite(FiniteGroup::quaternion());
        let bundle = OrbitGroupoid::constant(base.clone(), k.clone());
        let p = Presentation::free_abelian(2);
        assert_eq!(bundle.chi_gamma(&p), Ok(base.chi() * k.chi_hom_quotient(&p).unwrap()));
    }

    #[test]
    fn labels_must_be_total() {
        let space = CellSpace::closed_interval();
        let labels: BTreeMap<String, IsotropyModel> =
            [("v0".to_string(), IsotropyModel::SO3), ("e".to_string(), IsotropyModel::O2)].into_iter().collect();
        assert_eq!(OrbitGroupoid::new(space, labels), Err(Error::MissingValue("v1".into())));
    }

    #[test]
    fn extension_counterexample() {
        let h = FiniteGroup::cyclic(2);
        let x = RigidGComplex::trivial_action(h, CellSpace::point("x"));
        let pred = abelian_extension_chi(&IsotropyModel::Torus(1), &x, 1).unwrap();
        assert_eq!(pred, ExtensionPrediction { predicted: 0, factor_b: 0, factor_h: 2 });
        let actual = point(IsotropyModel::O2).chi_z().unwrap();
        assert_eq!(actual, 2);
        assert_ne!(actual, pred.predicted);

        let trivial = RigidGComplex::trivial_action(FiniteGroup::trivial(), CellSpace::point("x"));
        let c2 = IsotropyModel::Finite(FiniteGroup::cyclic(2));
        assert_eq!(abelian_extension_chi(&c2, &trivial, 1).unwrap().predicted, 2);
        assert!(matches!(
            abelian_extension_chi(&IsotropyModel::Finite(FiniteGroup::symmetric(3)), &trivial, 1),
            Err(Error::NonAbelianFiber(_))
        ));
    }
}

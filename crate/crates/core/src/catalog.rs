//! Catalog of compact isotropy groups.
//!
//! For each supported `(K, Γ)` the catalog knows `χ(K\Hom(Γ,K))`, the
//! integrand of the stratum-wise Γ-Euler characteristic, and for `Γ = ℤ` a
//! cell model of the adjoint quotient `Ad_K\K`. Combinations without a known
//! value are refused with [`Error::Unsupported`] rather than guessed.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{checked_mul, Error, Result};
use crate::group::FiniteGroup;
use crate::presentation::Presentation;
use crate::snf::abelianize;
use crate::space::{Cell, CellSpace};

/// A user-supplied catalog entry: χ values and optional `Ad`-quotient cell
/// models keyed by [`Presentation::class_key`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CustomModel {
    name: String,
    chi: BTreeMap<String, i64>,
    cells: BTreeMap<String, CellSpace>,
}

impl CustomModel {
    /// A class that only has a cell model gets its χ from that model; a class
    /// with both must have them agree.
    pub fn new(
        name: impl Into<String>,
        mut chi: BTreeMap<String, i64>,
        cells: BTreeMap<String, CellSpace>,
    ) -> Result<Self> {
        let name = name.into();
        for (key, space) in &cells {
            match chi.get(key) {
                Some(&v) if v != space.chi() => {
                    return Err(Error::Disagreement {
                        name: format!("custom model {name}, class {key}"),
                        lhs: v,
                        rhs: space.chi(),
                    })
                }
                Some(_) => {}
                None => {
                    chi.insert(key.clone(), space.chi());
                }
            }
        }
        Ok(CustomModel { name, chi, cells })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chi_table(&self) -> &BTreeMap<String, i64> {
        &self.chi
    }

    pub fn cell_models(&self) -> &BTreeMap<String, CellSpace> {
        &self.cells
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsotropyModel {
    Finite(FiniteGroup),
    /// `n`-dimensional torus; `Torus(1)` is `SO(2)`.
    Torus(u32),
    SO3,
    O2,
    Product(Vec<IsotropyModel>),
    Custom(CustomModel),
}

impl IsotropyModel {
    pub fn trivial() -> Self {
        IsotropyModel::Finite(FiniteGroup::trivial())
    }

    pub fn torus(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTorus);
        }
        Ok(IsotropyModel::Torus(n))
    }

    pub fn product(factors: Vec<IsotropyModel>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyProduct);
        }
        Ok(IsotropyModel::Product(factors))
    }

    /// Short human-readable label used in diagnostics and reports.
    pub fn label(&self) -> String {
        match self {
            IsotropyModel::Finite(g) if g.order() == 1 => "trivial".into(),
            IsotropyModel::Finite(g) => format!("finite(order {})", g.order()),
            IsotropyModel::Torus(n) => format!("torus({n})"),
            IsotropyModel::SO3 => "SO3".into(),
            IsotropyModel::O2 => "O2".into(),
            IsotropyModel::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(IsotropyModel::label).collect();
                format!("product({})", parts.join(", "))
            }
            IsotropyModel::Custom(c) => format!("custom({})", c.name),
        }
    }

    /// Whether any part of this model comes from a user-supplied entry.
    pub fn is_user_supplied(&self) -> bool {
        match self {
            IsotropyModel::Custom(_) => true,
            IsotropyModel::Product(fs) => fs.iter().any(IsotropyModel::is_user_supplied),
            _ => false,
        }
    }

    /// `Some(true/false)` when abelianness is known from the model.
    pub fn is_abelian(&self) -> Option<bool> {
        match self {
            IsotropyModel::Finite(g) => Some(g.is_abelian()),
            IsotropyModel::Torus(_) => Some(true),
            IsotropyModel::SO3 | IsotropyModel::O2 => Some(false),
            IsotropyModel::Product(fs) => fs.iter().try_fold(true, |acc, f| f.is_abelian().map(|a| acc && a)),
            IsotropyModel::Custom(_) => None,
        }
    }

    fn refuse(&self, p: &Presentation) -> Error {
        Error::unsupported(self.label(), p.class_key())
    }

    /// `χ(K\Hom(Γ,K))` for `K` this model.
    ///
    /// Every model answers 1 for a trivial Γ: `Hom(1, K)/K` is a point.
    pub fn chi_hom_quotient(&self, p: &Presentation) -> Result<i64> {
        if p.is_trivial_class() && !matches!(self, IsotropyModel::Custom(_)) {
            return Ok(1);
        }
        match self {
            IsotropyModel::Finite(g) => {
                let orbits = g.conj_orbit_count(&p.hom_enumerate(g))?;
                i64::try_from(orbits.count).map_err(|_| Error::Overflow)
            }
            IsotropyModel::Torus(n) => torus_hom_chi(*n, p),
            IsotropyModel::SO3 if p.is_integers_class() => Ok(1),
            IsotropyModel::O2 if p.is_integers_class() => Ok(2),
            IsotropyModel::SO3 | IsotropyModel::O2 => Err(self.refuse(p)),
            IsotropyModel::Product(fs) => fs.iter().try_fold(1i64, |acc, f| checked_mul(acc, f.chi_hom_quotient(p)?)),
            IsotropyModel::Custom(c) => match c.chi.get(&p.class_key()) {
                Some(&v) => Ok(v),
                None if p.is_trivial_class() => Ok(1),
                None => Err(self.refuse(p)),
            },
        }
    }

    /// `χ(Hom(Γ, K))` for an abelian `K` (conjugation is trivial, so this is
    /// also the quotient's χ). Non-abelian and custom models are rejected.
    pub fn hom_chi_abelian(&self, p: &Presentation) -> Result<i64> {
        match self {
            IsotropyModel::Torus(n) => torus_hom_chi(*n, p),
            IsotropyModel::Finite(g) if g.is_abelian() => {
                i64::try_from(p.hom_enumerate(g).len()).map_err(|_| Error::Overflow)
            }
            IsotropyModel::Product(fs) if self.is_abelian() == Some(true) => {
                fs.iter().try_fold(1i64, |acc, f| checked_mul(acc, f.hom_chi_abelian(p)?))
            }
            _ => Err(Error::NonAbelianFiber(self.label())),
        }
    }

    /// Cell model of the adjoint quotient `Ad_K\K`.
    pub fn ad_quotient_model(&self) -> Result<CellSpace> {
        match self {
            IsotropyModel::Finite(g) => CellSpace::from_generated(
                g.conjugacy_classes().iter().map(|c| Cell::new(format!("class{}", c.rep), 0)).collect(),
            ),
            IsotropyModel::Torus(n) => {
                // abelian, so the quotient is the torus itself: a product of circles
                let mut space = CellSpace::circle();
                for _ in 1..*n {
                    space = space.product(&CellSpace::circle())?;
                }
                Ok(space)
            }
            IsotropyModel::SO3 => Ok(CellSpace::closed_interval()),
            IsotropyModel::O2 => CellSpace::closed_interval().disjoint_union(&CellSpace::point("p")),
            IsotropyModel::Product(fs) => {
                let mut models = fs.iter().map(IsotropyModel::ad_quotient_model);
                let first = models.next().ok_or(Error::EmptyProduct)??;
                models.try_fold(first, |acc, m| acc.product(&m?))
            }
            IsotropyModel::Custom(c) => c.cells.get("Z").cloned().ok_or_else(|| self.refuse(&Presentation::integers())),
        }
    }
}

/// `χ(Hom(Γ, Tⁿ))`: zero when `Γ^ab` has positive rank, otherwise
/// `|torsion(Γ^ab)|ⁿ` (a finite set of points).
pub fn torus_hom_chi(n: u32, p: &Presentation) -> Result<i64> {
    let ab = abelianize(p)?;
    if ab.rank > 0 {
        return Ok(0);
    }
    ab.torsion_order()?.checked_pow(n).ok_or(Error::Overflow)
}

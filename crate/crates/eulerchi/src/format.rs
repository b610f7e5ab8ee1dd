//! JSON file formats.
//!
//! Every document type has a serde mirror (`*Doc`) and a conversion into the
//! validated core type. Nested documents (a function's space, a complex's
//! group, ...) may be given inline or as a path relative to the file that
//! references them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use eulerchi_core::catalog::CustomModel;
use eulerchi_core::presentation::PresentationKind;
use eulerchi_core::{
    Cell, CellMap, CellSpace, ConstructibleFunction, FiniteGroup, IsotropyModel, OrbitGroupoid, Presentation,
    RigidGComplex,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::report::InputDigest;

/// A nested document given inline or as a path.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Path(String),
    Inline(T),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDoc {
    pub id: String,
    pub dim: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSpaceDoc {
    pub cells: Vec<CellDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionDoc {
    pub space: Ref<CellSpaceDoc>,
    pub values: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellMapDoc {
    pub source: Ref<CellSpaceDoc>,
    pub target: Ref<CellSpaceDoc>,
    pub assign: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDoc {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PresentationDoc {
    Trivial,
    Cyclic { order: u64 },
    FreeAbelian { rank: usize },
    Presentation { generators: usize, relators: Vec<Vec<i32>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum IsotropyDoc {
    #[serde(rename = "finite")]
    Finite {
        group: Ref<GroupDoc>,
    },
    #[serde(rename = "torus")]
    Torus {
        n: u32,
    },
    SO3,
    O2,
    #[serde(rename = "product")]
    Product {
        factors: Vec<IsotropyDoc>,
    },
    #[serde(rename = "custom")]
    Custom {
        name: String,
        #[serde(default)]
        chi: BTreeMap<String, i64>,
        #[serde(default)]
        cells: BTreeMap<String, CellSpaceDoc>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StratumDoc {
    pub id: String,
    pub dim: u32,
    pub isotropy: IsotropyDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupoidDoc {
    pub strata: Vec<StratumDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub group: Ref<GroupDoc>,
    pub cells: Vec<CellDoc>,
    /// Keyed by group element index; the identity may be omitted.
    #[serde(default)]
    pub action: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtlasDoc {
    pub pieces: Vec<Ref<ComplexDoc>>,
    /// The caller's assertion that the chart images are disjoint.
    #[serde(default)]
    pub disjoint: bool,
}

impl From<&CellSpace> for CellSpaceDoc {
    fn from(space: &CellSpace) -> Self {
        CellSpaceDoc { cells: space.cells().iter().map(|c| CellDoc { id: c.id.clone(), dim: c.dim }).collect() }
    }
}

impl From<&FiniteGroup> for GroupDoc {
    fn from(g: &FiniteGroup) -> Self {
        GroupDoc { order: g.order(), table: g.rows() }
    }
}

impl From<&Presentation> for PresentationDoc {
    fn from(p: &Presentation) -> Self {
        match p.kind() {
            PresentationKind::Trivial => PresentationDoc::Trivial,
            PresentationKind::Cyclic(order) => PresentationDoc::Cyclic { order },
            PresentationKind::FreeAbelian(rank) => PresentationDoc::FreeAbelian { rank },
            PresentationKind::Custom => {
                PresentationDoc::Presentation { generators: p.generators(), relators: p.relators().to_vec() }
            }
        }
    }
}

impl ComplexDoc {
    pub fn from_complex(x: &RigidGComplex) -> Self {
        let cells = x.space().cells();
        let action = x
            .action()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(g, perm)| {
                let map = perm.iter().enumerate().map(|(c, &d)| (cells[c].id.clone(), cells[d].id.clone())).collect();
                (g.to_string(), map)
            })
            .collect();
        ComplexDoc {
            group: Ref::Inline(GroupDoc::from(x.group())),
            cells: cells.iter().map(|c| CellDoc { id: c.id.clone(), dim: c.dim }).collect(),
            action,
        }
    }
}

pub fn cell_space(doc: &CellSpaceDoc) -> Result<CellSpace> {
    cells(&doc.cells).map_err(|e| CliError::invalid("cells", e))
}

fn cells(docs: &[CellDoc]) -> eulerchi_core::Result<CellSpace> {
    CellSpace::new(docs.iter().map(|c| Cell::new(c.id.clone(), c.dim)).collect())
}

pub fn group(doc: &GroupDoc) -> Result<FiniteGroup> {
    if doc.order != doc.table.len() {
        return Err(CliError::Usage(format!("group: order {} but table has {} rows", doc.order, doc.table.len())));
    }
    FiniteGroup::from_table(&doc.table).map_err(|e| CliError::invalid("group.table", e))
}

pub fn presentation(doc: &PresentationDoc) -> Result<Presentation> {
    let p = match doc {
        PresentationDoc::Trivial => Ok(Presentation::trivial()),
        PresentationDoc::Cyclic { order } => Presentation::cyclic(*order),
        PresentationDoc::FreeAbelian { rank } => Ok(Presentation::free_abelian(*rank)),
        PresentationDoc::Presentation { generators, relators } => Presentation::new(*generators, relators.clone()),
    };
    p.map_err(|e| CliError::invalid("gamma", e))
}

/// Reads JSON documents, resolving nested paths and recording a digest of
/// every file read.
#[derive(Debug, Default)]
pub struct Loader {
    inputs: Vec<InputDigest>,
}

impl Loader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_inputs(self) -> Vec<InputDigest> {
        self.inputs
    }

    /// Parses `path` as JSON and returns the value with the directory that
    /// nested relative paths are resolved against.
    pub fn read<T: DeserializeOwned>(&mut self, path: &Path) -> Result<(T, PathBuf)> {
        let bytes = fs::read(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        self.record(path.display().to_string(), &bytes);
        let value = parse(&bytes, path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((value, base))
    }

    /// A command-line argument that is either a JSON document itself (starts
    /// with `{`) or a path to one.
    pub fn read_arg<T: DeserializeOwned>(&mut self, arg: &str) -> Result<(T, PathBuf)> {
        if arg.trim_start().starts_with('{') {
            self.record("<inline>".into(), arg.as_bytes());
            let value = parse(arg.as_bytes(), Path::new("<inline>"))?;
            return Ok((value, PathBuf::new()));
        }
        self.read(Path::new(arg))
    }

    fn record(&mut self, path: String, bytes: &[u8]) {
        let sha256 = hex::encode(Sha256::digest(bytes));
        self.inputs.push(InputDigest { path, sha256 });
    }

    fn resolve<T: DeserializeOwned + Clone>(&mut self, r: &Ref<T>, base: &Path) -> Result<(T, PathBuf)> {
        match r {
            Ref::Inline(v) => Ok((v.clone(), base.to_owned())),
            Ref::Path(p) => self.read(&base.join(p)),
        }
    }

    pub fn cell_space(&mut self, arg: &str) -> Result<CellSpace> {
        let (doc, _) = self.read_arg::<CellSpaceDoc>(arg)?;
        cell_space(&doc)
    }

    pub fn function(&mut self, arg: &str) -> Result<ConstructibleFunction> {
        let (doc, base) = self.read_arg::<FunctionDoc>(arg)?;
        let (space, _) = self.resolve(&doc.space, &base)?;
        let space = cell_space(&space)?;
        ConstructibleFunction::new(space, &doc.values).map_err(|e| CliError::invalid("values", e))
    }

    pub fn cell_map(&mut self, arg: &str) -> Result<CellMap> {
        let (doc, base) = self.read_arg::<CellMapDoc>(arg)?;
        let (source, _) = self.resolve(&doc.source, &base)?;
        let (target, _) = self.resolve(&doc.target, &base)?;
        let source = cell_space(&source).map_err(|e| context(e, "source"))?;
        let target = cell_space(&target).map_err(|e| context(e, "target"))?;
        CellMap::new(source, target, &doc.assign).map_err(|e| CliError::invalid("assign", e))
    }

    pub fn presentation(&mut self, arg: &str) -> Result<Presentation> {
        let (doc, _) = self.read_arg::<PresentationDoc>(arg)?;
        presentation(&doc)
    }

    pub fn isotropy(&mut self, arg: &str) -> Result<IsotropyModel> {
        let (doc, base) = self.read_arg::<IsotropyDoc>(arg)?;
        self.isotropy_doc(&doc, &base)
    }

    pub fn isotropy_doc(&mut self, doc: &IsotropyDoc, base: &Path) -> Result<IsotropyModel> {
        let invalid = |e| CliError::invalid("isotropy", e);
        match doc {
            IsotropyDoc::Finite { group: g } => {
                let (g, _) = self.resolve(g, base)?;
                Ok(IsotropyModel::Finite(group(&g)?))
            }
            IsotropyDoc::Torus { n } => IsotropyModel::torus(*n).map_err(invalid),
            IsotropyDoc::SO3 => Ok(IsotropyModel::SO3),
            IsotropyDoc::O2 => Ok(IsotropyModel::O2),
            IsotropyDoc::Product { factors } => {
                let factors = factors.iter().map(|f| self.isotropy_doc(f, base)).collect::<Result<Vec<_>>>()?;
                IsotropyModel::product(factors).map_err(invalid)
            }
            IsotropyDoc::Custom { name, chi, cells } => {
                let cells =
                    cells.iter().map(|(k, v)| Ok((k.clone(), cell_space(v)?))).collect::<Result<BTreeMap<_, _>>>()?;
                Ok(IsotropyModel::Custom(CustomModel::new(name.clone(), chi.clone(), cells).map_err(invalid)?))
            }
        }
    }

    pub fn groupoid(&mut self, arg: &str) -> Result<OrbitGroupoid> {
        let (doc, base) = self.read_arg::<GroupoidDoc>(arg)?;
        let mut strata = Vec::with_capacity(doc.strata.len());
        for s in &doc.strata {
            let label =
                self.isotropy_doc(&s.isotropy, &base).map_err(|e| context(e, &format!("stratum `{}`", s.id)))?;
            strata.push((Cell::new(s.id.clone(), s.dim), label));
        }
        OrbitGroupoid::from_strata(strata).map_err(|e| CliError::invalid("strata", e))
    }

    pub fn complex(&mut self, arg: &str) -> Result<RigidGComplex> {
        let (doc, base) = self.read_arg::<ComplexDoc>(arg)?;
        self.complex_doc(&doc, &base)
    }

    pub fn complex_doc(&mut self, doc: &ComplexDoc, base: &Path) -> Result<RigidGComplex> {
        let (g, _) = self.resolve(&doc.group, base)?;
        let g = group(&g)?;
        let space = cells(&doc.cells).map_err(|e| CliError::invalid("cells", e))?;
        let mut maps = BTreeMap::new();
        for (key, map) in &doc.action {
            let element: usize = key
                .parse()
                .map_err(|_| CliError::Usage(format!("action: key `{key}` is not a group element index")))?;
            maps.insert(element, map.clone());
        }
        RigidGComplex::from_maps(g, space, &maps).map_err(|e| CliError::invalid("action", e))
    }

    pub fn atlas(&mut self, arg: &str) -> Result<(Vec<RigidGComplex>, bool)> {
        let (doc, base) = self.read_arg::<AtlasDoc>(arg)?;
        let mut pieces = Vec::with_capacity(doc.pieces.len());
        for (i, piece) in doc.pieces.iter().enumerate() {
            let (piece, piece_base) = self.resolve(piece, &base)?;
            pieces.push(self.complex_doc(&piece, &piece_base).map_err(|e| context(e, &format!("piece {i}")))?);
        }
        Ok((pieces, doc.disjoint))
    }
}

fn parse<T: DeserializeOwned>(bytes: &[u8], path: &Path) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = match e.path().to_string() {
            root if root == "." => "(root)".to_owned(),
            p => p,
        };
        CliError::Json { path: path.to_owned(), field, source: e.into_inner() }
    })
}

fn context(e: CliError, what: &str) -> CliError {
    match e {
        CliError::Invalid { context, source } => CliError::Invalid { context: format!("{what}: {context}"), source },
        CliError::Usage(msg) => CliError::Usage(format!("{what}: {msg}")),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presentation_docs_round_trip() {
        for p in [
            Presentation::trivial(),
            Presentation::cyclic(4).unwrap(),
            Presentation::free_abelian(2),
            Presentation::new(2, vec![vec![1, 2, -1, -2]]).unwrap(),
        ] {
            let json = serde_json::to_string(&PresentationDoc::from(&p)).unwrap();
            let back: PresentationDoc = serde_json::from_str(&json).unwrap();
            assert_eq!(presentation(&back).unwrap(), p);
        }
        let doc: PresentationDoc = serde_json::from_str(r#"{"kind":"free_abelian","rank":2}"#).unwrap();
        assert_eq!(doc, PresentationDoc::FreeAbelian { rank: 2 });
    }

    #[test]
    fn isotropy_docs_parse() {
        let mut loader = Loader::new();
        let so3 = loader.isotropy(r#"{"kind":"SO3"}"#).unwrap();
        assert_eq!(so3, IsotropyModel::SO3);
        let prod = loader
            .isotropy(r#"{"kind":"product","factors":[{"kind":"torus","n":1},{"kind":"finite","group":{"order":2,"table":[[0,1],[1,0]]}}]}"#)
            .unwrap();
        assert_eq!(prod.label(), "product(torus(1), finite(order 2))");
        let custom = loader.isotropy(r#"{"kind":"custom","name":"K","chi":{"Z":2,"cyclic(3)":5}}"#).unwrap();
        assert_eq!(custom.chi_hom_quotient(&Presentation::cyclic(3).unwrap()).unwrap(), 5);
        assert!(loader.isotropy(r#"{"kind":"torus","n":0}"#).is_err());
    }

    #[test]
    fn complex_doc_round_trip() {
        let x = RigidGComplex::induced(FiniteGroup::symmetric(3), &[(vec![0, 1], 0), (vec![0], 1)]).unwrap();
        let doc = ComplexDoc::from_complex(&x);
        let json = serde_json::to_string(&doc).unwrap();
        let mut loader = Loader::new();
        assert_eq!(loader.complex(&json).unwrap(), x);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let mut loader = Loader::new();
        let err = loader.cell_space(r#"{"cells":[{"id":"a"}]}"#).unwrap_err();
        assert!(err.to_string().contains("dim"), "{err}");
        let err = loader.cell_space(r#"{"cells":[{"id":"a","dim":0},{"id":"a","dim":1}]}"#).unwrap_err();
        assert!(err.to_string().contains("duplicate cell id `a`"), "{err}");
    }
}

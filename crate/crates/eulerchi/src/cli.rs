//! Argument parsing and command dispatch for the `eulerchi` binary.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use eulerchi_core::groupoid::{abelian_extension_chi, chi_gamma_atlas};
use eulerchi_core::translation::{
    anchor_map, chi_gamma_noniter, chi_gamma_strata, chi_order_ell_tree, chi_string_orb, inertia_complex, lambda_chi,
    twisted_sectors, DEFAULT_RECURSION_CAP,
};
use eulerchi_core::{ConstructibleFunction, Presentation};
use serde_json::{json, Value};

use crate::error::{exit, CliError, Result};
use crate::format::{ComplexDoc, Loader};
use crate::report::{ErrorReport, Report};
use crate::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Strata,
    Inertia,
    Noniter,
    All,
}

#[derive(Debug, Parser)]
#[command(
    name = "eulerchi",
    version,
    about = "Exact Euler characteristics of orbit spaces, Γ-loop spaces and inertia groupoids"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub report: Format,
    /// Write the report to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Recursion cap for χ^(ℓ).
    #[arg(long, global = true, env = "EULERCHI_RECURSION_CAP", default_value_t = DEFAULT_RECURSION_CAP)]
    pub cap: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Euler characteristic of a cell space.
    Chi { space: String },
    /// Euler integral of a constructible function.
    Integrate { function: String },
    /// Pushforward of a constructible function along a cell map.
    Pushforward {
        map: String,
        /// Function on the source (defaults to the constant 1).
        #[arg(long)]
        function: Option<String>,
    },
    /// χ_Γ of an orbit-space groupoid, with a per-stratum breakdown.
    GammaChi {
        groupoid: String,
        /// Γ as a presentation file or inline JSON.
        #[arg(long)]
        gamma: String,
        /// Also evaluate χ_ℤ from the adjoint-quotient cell models.
        #[arg(long)]
        chi_z: bool,
    },
    /// χ_Γ of a finite translation groupoid by strata, inertia and the non-iterative formula.
    Translation {
        complex: String,
        #[arg(long)]
        gamma: String,
        #[arg(long, value_enum, default_value = "all")]
        method: Method,
    },
    /// Order-ℓ Euler characteristic χ^(ℓ) with its recursion tree.
    OrderEll {
        complex: String,
        #[arg(long)]
        ell: usize,
    },
    /// The Γ-inertia complex, its orbit space and the anchor map.
    Inertia {
        complex: String,
        #[arg(long)]
        gamma: String,
        /// Write the inertia complex as a complex file.
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
    },
    /// χ_Γ summed over the pieces of an atlas.
    Atlas {
        atlas: String,
        #[arg(long)]
        gamma: String,
    },
    /// Abelian-extension prediction χ(Hom(ℤ^ℓ,B))·χ_{ℤ^ℓ}(H⋉X).
    Extension {
        /// Isotropy model of the bundle fiber B.
        #[arg(long)]
        fiber: String,
        /// Complex with the action of H.
        #[arg(long)]
        complex: String,
        #[arg(long)]
        ell: usize,
        /// Isotropy model of the actual extension group, compared against the prediction.
        #[arg(long)]
        actual: Option<String>,
    },
    /// Randomized cross-validation of all invariants.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 24)]
        max_group: usize,
        #[arg(long, default_value_t = 60)]
        max_cells: usize,
        /// Where to write a minimized failing instance.
        #[arg(long, default_value = "eulerchi-counterexample.json")]
        dump: PathBuf,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Chi { .. } => "chi",
            Command::Integrate { .. } => "integrate",
            Command::Pushforward { .. } => "pushforward",
            Command::GammaChi { .. } => "gamma-chi",
            Command::Translation { .. } => "translation",
            Command::OrderEll { .. } => "order-ell",
            Command::Inertia { .. } => "inertia",
            Command::Atlas { .. } => "atlas",
            Command::Extension { .. } => "extension",
            Command::Verify { .. } => "verify",
        }
    }
}

/// What the process should print and exit with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::VALIDATION } else { exit::OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { stdout: String::new(), stderr: text, code }
            } else {
                Output { stdout: text, stderr: String::new(), code }
            };
        }
    };
    let name = cli.command.name();
    let (body, code) = match execute(&cli) {
        Ok(report) => {
            let body = match cli.report {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            (body, report.exit_code())
        }
        Err(e) => {
            let code = e.exit_code();
            match cli.report {
                Format::Json => (ErrorReport::new(name, &e).to_json(), code),
                Format::Text => return Output { stdout: String::new(), stderr: format!("error: {e}\n"), code },
            }
        }
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => Output { stdout: String::new(), stderr: String::new(), code },
            Err(e) => Output {
                stdout: String::new(),
                stderr: format!("error: {}: {e}\n", path.display()),
                code: exit::VALIDATION,
            },
        },
        None => Output { stdout: body, stderr: String::new(), code },
    }
}

pub fn execute(cli: &Cli) -> Result<Report> {
    let mut loader = Loader::new();
    let mut report = dispatch(cli, &mut loader)?;
    report.inputs = loader.into_inputs();
    Ok(report)
}

fn dispatch(cli: &Cli, loader: &mut Loader) -> Result<Report> {
    match &cli.command {
        Command::Chi { space } => {
            let space = loader.cell_space(space)?;
            let mut report = Report::new("chi", space.chi());
            report.breakdown.push(json!({ "f_vector": space.f_vector() }));
            Ok(report)
        }
        Command::Integrate { function } => {
            let f = loader.function(function)?;
            let sum = f.integrate()?;
            let mut report = Report::new("integrate", sum);
            report.breakdown = f
                .space()
                .cells()
                .iter()
                .zip(f.values())
                .map(|(c, v)| json!({ "cell": c.id, "dim": c.dim, "value": v, "contribution": v * c.sign() }))
                .collect();
            report.assert_eq("cell sum = level-set formula", sum, f.integrate_levelset()?);
            Ok(report)
        }
        Command::Pushforward { map, function } => {
            let m = loader.cell_map(map)?;
            let f = match function {
                Some(path) => loader.function(path)?,
                None => ConstructibleFunction::one(m.source().clone()),
            };
            let pushed = m.pushforward(&f)?;
            let mut report = Report::new("pushforward", json!(pushed.to_map()));
            report.breakdown = m
                .target()
                .cells()
                .iter()
                .map(|c| Ok(json!({ "cell": c.id, "fiber_chi": m.fiber_chi(&c.id)?, "value": pushed.value(&c.id) })))
                .collect::<Result<_>>()?;
            report.assert_eq("integral of pushforward = integral", pushed.integrate()?, f.integrate()?);
            Ok(report)
        }
        Command::GammaChi { groupoid, gamma, chi_z } => {
            let g = loader.groupoid(groupoid)?;
            let p = loader.presentation(gamma)?;
            let terms = g.chi_gamma_breakdown(&p)?;
            let value = g.chi_gamma(&p)?;
            let mut report = Report::new("gamma-chi", value);
            report.breakdown = terms
                .iter()
                .map(|t| {
                    json!({
                        "cell": t.cell, "dim": t.dim, "isotropy": t.isotropy,
                        "value": t.value, "contribution": t.contribution,
                    })
                })
                .collect();
            report.assert_eq(
                "stratum sum = integral",
                terms.iter().map(|t| t.contribution).sum(),
                g.integrand(&p)?.integrate()?,
            );
            if *chi_z && p.is_integers_class() {
                report.assert_eq("chi_gamma(Z) = chi_z", value, g.chi_z()?);
            } else if *chi_z {
                report.warn("chi_z is only compared when Γ is ℤ");
            }
            custom_warnings(
                &mut report,
                g.strata().filter(|(_, m)| m.is_user_supplied()).map(|(c, m)| (c.id.clone(), m.label())),
            );
            Ok(report)
        }
        Command::Translation { complex, gamma, method } => {
            let x = loader.complex(complex)?;
            let p = loader.presentation(gamma)?;
            let run_strata = matches!(method, Method::Strata | Method::All);
            let run_inertia = matches!(method, Method::Inertia | Method::All);
            let run_noniter = matches!(method, Method::Noniter | Method::All);
            let mut result = serde_json::Map::new();
            let strata = run_strata.then(|| chi_gamma_strata(&p, &x)).transpose()?;
            let inertia = run_inertia.then(|| lambda_chi(&p, &x)).transpose()?;
            let noniter = run_noniter.then(|| twisted_sectors(&p, &x)).transpose()?;
            let mut report = Report::new("translation", Value::Null);
            if let Some(v) = strata {
                result.insert("strata".into(), v.into());
            }
            if let Some(v) = inertia {
                result.insert("inertia".into(), v.into());
            }
            if let Some(sectors) = &noniter {
                let v: i64 = sectors.iter().map(|s| s.chi).sum();
                result.insert("noniter".into(), v.into());
                report.breakdown = sectors.iter().map(|s| json!({ "sector": s.rep.images(), "chi": s.chi })).collect();
            }
            let values: Vec<(&str, i64)> =
                result.iter().map(|(k, v)| (k.as_str(), v.as_i64().expect("integer"))).collect();
            for pair in values.windows(2) {
                report.assert_eq(format!("{} = {}", pair[0].0, pair[1].0), pair[0].1, pair[1].1);
            }
            report.result = Value::Object(result);
            Ok(report)
        }
        Command::OrderEll { complex, ell } => {
            let x = loader.complex(complex)?;
            let (value, nodes) = chi_order_ell_tree(&x, *ell, cli.cap)?;
            let mut report = Report::new("order-ell", value);
            report.breakdown = nodes
                .iter()
                .map(|n| json!({ "path": n.path, "group_order": n.group_order, "cells": n.cells, "value": n.value }))
                .collect();
            report.assert_eq(
                format!("chi_order_ell({ell}) = chi_gamma_noniter(Z^{ell})"),
                value,
                chi_gamma_noniter(&Presentation::free_abelian(*ell), &x)?,
            );
            Ok(report)
        }
        Command::Inertia { complex, gamma, emit } => {
            let x = loader.complex(complex)?;
            let p = loader.presentation(gamma)?;
            let inertia = inertia_complex(&p, &x)?;
            let orbits = inertia.complex.orbits();
            let lambda = inertia.complex.orbit_space_chi();
            let cells = inertia.complex.space().cells();
            let mut report = Report::new(
                "inertia",
                json!({ "cells": cells.len(), "orbits": orbits.reps.len(), "lambda_chi": lambda }),
            );
            report.breakdown = orbits
                .reps
                .iter()
                .map(|&r| {
                    let (t, base) = &inertia.pairs[r];
                    json!({
                        "cell": cells[r].id, "dim": cells[r].dim,
                        "tuple": t.images(), "base": x.space().cells()[*base].id,
                    })
                })
                .collect();
            let anchor = anchor_map(&p, &x)?;
            let one = ConstructibleFunction::one(anchor.source().clone());
            report.assert_eq(
                "integral over base of anchor pushforward = lambda_chi",
                anchor.pushforward(&one)?.integrate()?,
                lambda,
            );
            report.assert_eq("lambda_chi = chi_gamma_strata", lambda, chi_gamma_strata(&p, &x)?);
            if p.is_integers_class() {
                report.assert_eq("lambda_chi = chi_string_orb", lambda, chi_string_orb(&x)?);
            }
            if let Some(path) = emit {
                let doc =
                    serde_json::to_string_pretty(&ComplexDoc::from_complex(&inertia.complex)).expect("serializes");
                std::fs::write(path, doc + "\n").map_err(|source| CliError::Io { path: path.clone(), source })?;
            }
            Ok(report)
        }
        Command::Atlas { atlas, gamma } => {
            let (pieces, disjoint) = loader.atlas(atlas)?;
            let p = loader.presentation(gamma)?;
            let total = chi_gamma_atlas(&pieces, &p)?;
            let mut report = Report::new("atlas", total);
            report.breakdown = pieces
                .iter()
                .enumerate()
                .map(|(i, x)| Ok(json!({ "piece": i, "group_order": x.group().order(), "cells": x.space().len(), "chi_gamma": chi_gamma_strata(&p, x)? })))
                .collect::<Result<_>>()?;
            report.warn(if disjoint {
                "piece disjointness is asserted by the input, not verified"
            } else {
                "pieces are not asserted disjoint; the sum is χ_Γ of their disjoint union"
            });
            Ok(report)
        }
        Command::Extension { fiber, complex, ell, actual } => {
            let fiber = loader.isotropy(fiber)?;
            let x = loader.complex(complex)?;
            let prediction = abelian_extension_chi(&fiber, &x, *ell)?;
            let mut result = json!({
                "predicted": prediction.predicted,
                "factor_fiber": prediction.factor_b,
                "factor_base": prediction.factor_h,
            });
            let mut report = Report::new("extension", Value::Null);
            if let Some(actual) = actual {
                let model = loader.isotropy(actual)?;
                let value = model.chi_hom_quotient(&Presentation::free_abelian(*ell))?;
                result["actual"] = value.into();
                result["formula_holds"] = (value == prediction.predicted).into();
                if value != prediction.predicted {
                    report.warn(format!(
                        "{} is not an abelian extension: predicted {} but actual {}",
                        model.label(),
                        prediction.predicted,
                        value
                    ));
                }
            }
            report.result = result;
            Ok(report)
        }
        Command::Verify { seed, cases, max_group, max_cells, dump, inject_fault } => {
            let config = verify::Config {
                seed: *seed,
                cases: *cases,
                max_group: *max_group,
                max_cells: *max_cells,
                cap: cli.cap,
                inject_fault: *inject_fault,
                dump: dump.clone(),
            };
            let summary = verify::run(&config);
            if let Some(f) = &summary.failure {
                let doc = verify::counterexample_json(&config, f.case, f.check, &f.instance, &f.outcome);
                let text = serde_json::to_string_pretty(&doc).expect("serializes") + "\n";
                std::fs::write(&config.dump, text)
                    .map_err(|source| CliError::Io { path: config.dump.clone(), source })?;
            }
            Ok(summary.report(&config))
        }
    }
}

fn custom_warnings(report: &mut Report, entries: impl Iterator<Item = (String, String)>) {
    for (cell, label) in entries {
        report.warn(format!("stratum {cell}: {label} is a user-supplied catalog entry"));
    }
}

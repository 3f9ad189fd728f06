//! Batch command-line frontend. Every command reads JSON files and writes a
//! single JSON document (or DOT text for `export-dot`).
//!
//! Exit status: 0 on success, 1 on usage or input errors, 2 when the inputs
//! are valid but the requested operation fails or an audit finds violations.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::audit::{self, FiniteMetric, FinitePoset, MetricWire, PosetWire};
use crate::dot;
use crate::error::Error;
use crate::group::GroupSpec;
use crate::model::TreeModel;
use crate::orders::{self, OrderHandle};
use crate::rational;
use crate::raytree::{RayTree, RayTreeTopology, TopologyWire};
use crate::report::violations_to_json;
use crate::symmetry::{self, Similarity, SimilarityWire};
use crate::universal::{UPoint, UPointWire, UniversalTree};

#[derive(Debug, Parser)]
#[command(
    name = "rtree",
    about = "Exact computations on R-trees and their orders"
)]
pub struct Cli {
    /// Tree model the point files refer to.
    #[arg(long, value_enum, default_value_t = ModelKind::Upoint, global = true)]
    model: ModelKind,

    /// Target group of the universal tree: z2, z5, zK or int.
    #[arg(long, default_value = "z2", global = true)]
    group: String,

    /// Ray-tree topology file (required with --model raytree).
    #[arg(long, global = true)]
    tree: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Upoint,
    Raytree,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distance between two points.
    Dist { a: PathBuf, b: PathBuf },
    /// Median of three points.
    Median { a: PathBuf, b: PathBuf, c: PathBuf },
    /// Supremum in the natural order of the universal tree.
    Join { a: PathBuf, b: PathBuf },
    /// Whether `x τ y` holds.
    OrderCompare {
        order: PathBuf,
        x: PathBuf,
        y: PathBuf,
    },
    /// Supremum of a set of points in an order.
    OrderSup {
        order: PathBuf,
        #[arg(required = true)]
        points: Vec<PathBuf>,
    },
    /// Hausdorff distance between two orders.
    HdOrders {
        /// Treat the two inputs as root points instead of order files.
        #[arg(long)]
        rooted: bool,
        a: PathBuf,
        b: PathBuf,
        /// Ray-tree topology; implies --model raytree.
        tree_file: Option<PathBuf>,
    },
    /// The point or end an order is focused on.
    Phi { order: PathBuf },
    /// Busemann function of an end at a point.
    Busemann {
        #[arg(long)]
        end: String,
        y: PathBuf,
    },
    /// Projection of x onto the horoball of an end through y.
    Project {
        #[arg(long)]
        end: String,
        y: PathBuf,
        x: PathBuf,
    },
    /// Four-point condition on a distance matrix.
    CheckTreeMetric { matrix: PathBuf },
    /// Realize a tree metric as a ray tree.
    Realize { matrix: PathBuf },
    /// Audit a rooted order on a sample of points.
    AuditOrder { order: PathBuf, sample: PathBuf },
    /// Metric-semilattice, semilinearity and four-point checks on tables.
    AuditSemilattice { matrix: PathBuf, poset: PathBuf },
    /// Apply a similarity of the universal tree.
    SimApply { similarity: PathBuf, point: PathBuf },
    /// A similarity sending one point of the universal tree to another.
    SimMap { p: PathBuf, q: PathBuf },
    /// Nearest point in a fiber, or the fiber isometry with --map.
    Fiber {
        point: PathBuf,
        #[arg(long)]
        height: String,
        #[arg(long)]
        map: bool,
    },
    /// Finite convergence check of rooted orders to a target order.
    Convergence {
        roots: PathBuf,
        target: PathBuf,
        probes: PathBuf,
    },
    /// DOT drawing of the subtree spanned by a set of points.
    ExportDot { points: PathBuf },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Domain(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(json!({"error": e.to_string()}))
    }
}

enum Output {
    Json(Value),
    Text(String),
}

type Run = Result<Output, Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let raw = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_value(read_json(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_point<M: TreeModel>(model: &M, path: &Path) -> Result<M::Point, Failure> {
    model
        .point_from_json(&read_json(path)?)
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_points<M: TreeModel>(model: &M, path: &Path) -> Result<Vec<M::Point>, Failure> {
    match read_json(path)? {
        Value::Array(items) => items
            .iter()
            .map(|v| model.point_from_json(v))
            .collect::<Result<_, _>>()
            .map_err(|e| usage(format!("{}: {e}", path.display()))),
        _ => Err(usage(format!(
            "{}: expected a JSON array of points",
            path.display()
        ))),
    }
}

fn load_order<'m, M: TreeModel>(model: &'m M, path: &Path) -> Result<OrderHandle<'m, M>, Failure> {
    OrderHandle::from_json(model, &read_json(path)?)
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_end<M: TreeModel>(model: &M, raw: &str) -> Result<M::End, Failure> {
    let v = raw
        .parse::<u64>()
        .map(Value::from)
        .unwrap_or_else(|_| Value::String(raw.to_string()));
    model.end_from_json(&v).map_err(usage)
}

fn load_tree(path: &Path) -> Result<RayTree, Failure> {
    let wire: TopologyWire = load(path)?;
    let topo = RayTreeTopology::from_wire(&wire).map_err(usage)?;
    RayTree::new(topo).map_err(|d| usage(format!("{}: {d}", path.display())))
}

fn load_metric(path: &Path) -> Result<FiniteMetric, Failure> {
    let wire: MetricWire = load(path)?;
    FiniteMetric::from_wire(&wire).map_err(usage)
}

fn four_point_doc(w: &audit::FourPointWitness) -> Value {
    json!({
        "error": "four-point violation",
        "witness": w.quad,
        "lhs": rational::format(&w.lhs),
        "rhs": rational::format(&w.rhs),
    })
}

/// Commands that work the same way on either model.
fn run_generic<M: TreeModel>(model: &M, cmd: &Command) -> Run {
    let out = match cmd {
        Command::Dist { a, b } => {
            let (a, b) = (load_point(model, a)?, load_point(model, b)?);
            json!({"dist": rational::format(&model.dist(&a, &b))})
        }
        Command::Median { a, b, c } => {
            let (a, b, c) = (
                load_point(model, a)?,
                load_point(model, b)?,
                load_point(model, c)?,
            );
            json!({"median": model.point_to_json(&model.median(&a, &b, &c))})
        }
        Command::OrderCompare { order, x, y } => {
            let tau = load_order(model, order)?;
            let (x, y) = (load_point(model, x)?, load_point(model, y)?);
            json!({"result": tau.compare(&x, &y)?})
        }
        Command::OrderSup { order, points } => {
            let tau = load_order(model, order)?;
            let pts = points
                .iter()
                .map(|p| load_point(model, p))
                .collect::<Result<Vec<_>, _>>()?;
            json!({"sup": model.point_to_json(&tau.sup(&pts)?)})
        }
        Command::HdOrders { rooted, a, b, .. } => {
            let (ta, tb) = if *rooted {
                (
                    OrderHandle::rooted(model, load_point(model, a)?)?,
                    OrderHandle::rooted(model, load_point(model, b)?)?,
                )
            } else {
                (load_order(model, a)?, load_order(model, b)?)
            };
            json!({"hd": ta.hausdorff_distance(&tb)?.to_json()})
        }
        Command::Phi { order } => {
            let tau = load_order(model, order)?;
            json!({"phi": orders::point_or_end_to_json(model, &tau.phi())})
        }
        Command::Busemann { end, y } => {
            let e = parse_end(model, end)?;
            let y = load_point(model, y)?;
            json!({"busemann": rational::format(&model.busemann(&e, &y))})
        }
        Command::Project { end, y, x } => {
            let e = parse_end(model, end)?;
            let (y, x) = (load_point(model, y)?, load_point(model, x)?);
            json!({"projection": model.point_to_json(&model.horoball_projection(&e, &y, &x))})
        }
        Command::AuditOrder { order, sample } => {
            let tau = load_order(model, order)?;
            let pts = load_points(model, sample)?;
            let violations = orders::audit_rooted_order(&tau, &pts)?;
            let doc = json!({
                "pass": violations.is_empty(),
                "violations": violations_to_json(&violations, |p| model.point_to_json(p)),
            });
            if violations.is_empty() {
                doc
            } else {
                return Err(Failure::Domain(doc));
            }
        }
        Command::Convergence {
            roots,
            target,
            probes,
        } => {
            let roots = load_points(model, roots)?;
            let target = load_order(model, target)?;
            let pairs = match read_json(probes)? {
                Value::Array(items) => items
                    .iter()
                    .map(|v| match v {
                        Value::Array(xy) if xy.len() == 2 => Ok((
                            model.point_from_json(&xy[0])?,
                            model.point_from_json(&xy[1])?,
                        )),
                        _ => Err(Error::Parse("each probe must be a pair [x, y]".into())),
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(usage)?,
                _ => return Err(usage("probes must be a JSON array")),
            };
            let report = orders::check_convergence(model, &roots, &target, &pairs)?;
            json!({"converged": report.converged, "entry": report.entry})
        }
        Command::ExportDot { points } => {
            let pts = load_points(model, points)?;
            return Ok(Output::Text(dot::export_dot(model, &pts)?));
        }
        _ => unreachable!("model-independent command routed to run_generic"),
    };
    Ok(Output::Json(out))
}

fn run_universal(model: &UniversalTree, cmd: &Command) -> Run {
    let group = model.group();
    let out = match cmd {
        Command::Join { a, b } => {
            let (a, b) = (load_point(model, a)?, load_point(model, b)?);
            json!({"join": model.point_to_json(&a.join(&b))})
        }
        Command::SimApply { similarity, point } => {
            let wire: SimilarityWire = load(similarity)?;
            let s = Similarity::from_wire(group, &wire).map_err(usage)?;
            let p = load_point(model, point)?;
            json!({"image": model.point_to_json(&s.apply(&p)?)})
        }
        Command::SimMap { p, q } => {
            let (p, q): (UPoint, UPoint) = (load_point(model, p)?, load_point(model, q)?);
            let s = symmetry::map_point_to_point(&p, &q)?;
            json!({"similarity": serde_json::to_value(s.to_wire()).expect("serializable")})
        }
        Command::Fiber { point, height, map } => {
            let p: UPoint = load_point(model, point)?;
            let b = rational::parse(height).map_err(usage)?;
            if *map {
                let image = symmetry::fiber_map(&p.height().clone(), &b, &p)?;
                json!({"image": model.point_to_json(&image)})
            } else {
                let n = symmetry::fiber_nearest(&p, &b)?;
                json!({
                    "nearest": model.point_to_json(&n.point),
                    "distance": rational::format(&n.distance),
                    "unique": n.unique,
                })
            }
        }
        _ => return run_generic(model, cmd),
    };
    Ok(Output::Json(out))
}

fn run_tables(cmd: &Command) -> Run {
    let out = match cmd {
        Command::CheckTreeMetric { matrix } => {
            let m = load_metric(matrix)?;
            match audit::check_four_point(&m) {
                Ok(()) => json!({"four_point": "ok"}),
                Err(w) => return Err(Failure::Domain(four_point_doc(&w))),
            }
        }
        Command::Realize { matrix } => {
            let m = load_metric(matrix)?;
            if let Err(w) = audit::check_four_point(&m) {
                return Err(Failure::Domain(four_point_doc(&w)));
            }
            let r = audit::realize_tree(&m)?;
            json!({
                "tree": serde_json::to_value(r.tree.topology().to_wire()).expect("serializable"),
                "locations": r.locations.iter().map(|l| r.tree.point_to_json(l)).collect::<Vec<_>>(),
            })
        }
        Command::AuditSemilattice { matrix, poset } => {
            let m = load_metric(matrix)?;
            let pw: PosetWire = load(poset)?;
            let p = FinitePoset::from_wire(&pw).map_err(usage)?;
            let semilattice = audit::check_metric_semilattice(&m, &p)?;
            let semilinear = audit::check_upper_semilinear(&p);
            let four = audit::check_four_point(&m);
            let pass = semilattice.is_empty() && semilinear.is_ok() && four.is_ok();
            let doc = json!({
                "pass": pass,
                "metric_semilattice": violations_to_json(&semilattice, |i| Value::from(*i)),
                "upper_semilinear": match semilinear {
                    Ok(()) => Value::String("ok".into()),
                    Err(w) => json!({"witness": w}),
                },
                "four_point": match &four {
                    Ok(()) => Value::String("ok".into()),
                    Err(w) => four_point_doc(w),
                },
            });
            if pass {
                doc
            } else {
                return Err(Failure::Domain(doc));
            }
        }
        _ => unreachable!("table command expected"),
    };
    Ok(Output::Json(out))
}

fn dispatch(cli: &Cli) -> Run {
    if matches!(
        cli.command,
        Command::CheckTreeMetric { .. }
            | Command::Realize { .. }
            | Command::AuditSemilattice { .. }
    ) {
        return run_tables(&cli.command);
    }
    let tree_path = match &cli.command {
        Command::HdOrders {
            tree_file: Some(t), ..
        } => Some(t.clone()),
        _ => cli.tree.clone(),
    };
    let raytree = cli.model == ModelKind::Raytree || tree_path.is_some();
    if raytree {
        if matches!(
            cli.command,
            Command::Join { .. }
                | Command::SimApply { .. }
                | Command::SimMap { .. }
                | Command::Fiber { .. }
        ) {
            return Err(usage("this command is defined for the universal tree only"));
        }
        let path = tree_path.ok_or_else(|| usage("--tree is required with --model raytree"))?;
        let tree = load_tree(&path)?;
        run_generic(&tree, &cli.command)
    } else {
        let group = GroupSpec::parse_flag(&cli.group).map_err(usage)?;
        run_universal(&UniversalTree::new(group), &cli.command)
    }
}

/// Runs one command line (including the program name) to completion.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(Output::Json(v)) => Outcome {
            code: 0,
            stdout: format!("{v}\n"),
            stderr: String::new(),
        },
        Ok(Output::Text(t)) => Outcome {
            code: 0,
            stdout: t,
            stderr: String::new(),
        },
        Err(Failure::Domain(v)) => Outcome {
            code: 2,
            stdout: format!("{v}\n"),
            stderr: String::new(),
        },
        Err(Failure::Usage(msg)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

/// Parses a universal-tree point from its JSON text.
pub fn parse_upoint(group: GroupSpec, text: &str) -> Result<UPoint, Error> {
    let w: UPointWire = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    UPoint::from_wire(group, &w)
}

//! Command line front end for the pairing certifier.
//!
//! Curves come from a JSON file (see `schema`).  Every subcommand accepts
//! `--label` to pick a single curve; without it the whole file is processed
//! in parallel, with output buffered and emitted in input order.  Exit codes
//! form a stable contract: 0 when every processed curve certifies, 2 when
//! some curve is a genuine counterexample to the pairing condition, and 1
//! for I/O, schema, usage, or precision problems.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperfibre::certify::{certify_with, FailReason, StarCertificate, Verdict};
use hyperfibre::certify::pairing_report;
use hyperfibre::cluster::{odd_p_picture, picture_from_certificate, shifted_picture, ClusterPicture};
use hyperfibre::factor::DEFAULT_FACTOR_SEED;
use hyperfibre::fibre::{nodes, stable_model, Node};
use hyperfibre::fq::FqElem;
use hyperfibre::graph::{cycle_rank, minimal_regular_graph, orbit_report, stable_graph, DualGraph};
use hyperfibre::poly::Poly;
use hyperfibre::two_torsion::reduction_kernel;
use hyperfibre::unram::UnramElem;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;

mod schema;
use schema::{int_to_json, PreparedCurve};

#[derive(Parser)]
#[command(
    name = "hyperfibre",
    version,
    about = "2-adic pairing certificates, stable models, dual graphs, and cluster pictures for y^2 = c f(x)"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the pairing condition for curves in a file.
    Check(CommonArgs),
    /// Full report: certificate, stable model, nodes, graphs, pictures, two-torsion.
    Analyze(CommonArgs),
    /// Cluster picture of f at a prime.
    Cluster {
        #[command(flatten)]
        common: CommonArgs,
        /// Prime of interest; 2 uses the certificate, odd primes need a stored factored form.
        #[arg(long)]
        prime: u64,
        /// Lower every proper depth by 2, dissolving clusters that reach their parent.
        #[arg(long)]
        shifted: bool,
    },
    /// Dual graph of the special fibre of the stable or minimal regular model.
    Graph {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = ModelKind::Stable)]
        model: ModelKind,
        #[arg(long, value_enum, default_value_t = FormatKind::Dot)]
        format: FormatKind,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Input curve file (JSON).
    file: PathBuf,
    /// Curve label; when omitted every curve in the file is processed.
    #[arg(long)]
    label: Option<String>,
    /// Override the starting 2-adic working precision.
    #[arg(long)]
    precision: Option<u32>,
    /// Seed for the factorisation randomness.
    #[arg(long)]
    seed: Option<u64>,
    /// Emit machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Stable,
    Minimal,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatKind {
    Dot,
    Json,
}

enum Operation {
    Check,
    Analyze,
    Cluster { prime: u64, shifted: bool },
    Graph { model: ModelKind, format: FormatKind },
}

/// Exit status of one curve: 0 certified, 2 pairing condition fails, 1 error.
struct CurveOutcome {
    text: String,
    json: Value,
    code: i32,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let (common, op) = match cli.cmd {
        Command::Check(c) => (c, Operation::Check),
        Command::Analyze(c) => (c, Operation::Analyze),
        Command::Cluster { common, prime, shifted } => (common, Operation::Cluster { prime, shifted }),
        Command::Graph { common, model, format } => (common, Operation::Graph { model, format }),
    };
    let curves = match schema::load(&common.file) {
        Ok(curves) => curves,
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    dispatch(&curves, &common, &op)
}

fn dispatch(curves: &[PreparedCurve], common: &CommonArgs, op: &Operation) -> i32 {
    let selected: Vec<&PreparedCurve> = match &common.label {
        Some(label) => match curves.iter().find(|c| c.entry.label == *label) {
            Some(c) => vec![c],
            None => {
                eprintln!("no curve labelled {label:?} in {}", common.file.display());
                return 1;
            }
        },
        None => curves.iter().collect(),
    };
    let outcomes: Vec<CurveOutcome> = selected
        .par_iter()
        .map(|curve| run_one(curve, common, op))
        .collect();
    if common.json {
        let doc = if common.label.is_some() {
            outcomes[0].json.clone()
        } else {
            Value::Array(outcomes.iter().map(|o| o.json.clone()).collect())
        };
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable report"));
    } else {
        for (i, outcome) in outcomes.iter().enumerate() {
            if i > 0 {
                println!();
            }
            print!("{}", outcome.text);
        }
    }
    if outcomes.iter().any(|o| o.code == 1) {
        1
    } else if outcomes.iter().any(|o| o.code == 2) {
        2
    } else {
        0
    }
}

fn run_one(curve: &PreparedCurve, common: &CommonArgs, op: &Operation) -> CurveOutcome {
    match op {
        Operation::Check => run_check(curve, common),
        Operation::Analyze => run_analyze(curve, common),
        Operation::Cluster { prime, shifted } => run_cluster(curve, common, *prime, *shifted),
        Operation::Graph { model, format } => run_graph(curve, common, *model, *format),
    }
}

fn seed_of(common: &CommonArgs) -> u64 {
    common.seed.unwrap_or(DEFAULT_FACTOR_SEED)
}

fn certify_curve(curve: &PreparedCurve, common: &CommonArgs) -> Result<StarCertificate, FailReason> {
    certify_with(&curve.input, common.precision, seed_of(common))
}

fn run_check(curve: &PreparedCurve, common: &CommonArgs) -> CurveOutcome {
    let label = &curve.entry.label;
    match certify_curve(curve, common) {
        Ok(cert) => CurveOutcome {
            text: format!("== {label} ==\n{}", pairing_report(&cert)),
            json: certificate_json(label, &cert),
            code: 0,
        },
        Err(reason) => fail_outcome(label, &reason),
    }
}

fn run_analyze(curve: &PreparedCurve, common: &CommonArgs) -> CurveOutcome {
    let label = &curve.entry.label;
    let cert = match certify_curve(curve, common) {
        Ok(cert) => cert,
        Err(reason) => return fail_outcome(label, &reason),
    };
    let model = stable_model(&cert);
    let node_list = nodes(&cert);
    let st = stable_graph(&cert, &model);
    let mr = minimal_regular_graph(&st);
    let pic = picture_from_certificate(&cert);
    let shifted = shifted_picture(&pic);
    let kernel = reduction_kernel(&cert).ok();
    let st_orbits = orbit_report(&st);
    let genus = cert.genus();

    let mut text = format!("== {label} ==\n{}", pairing_report(&cert));
    if cert.is_star() {
        text.push_str("good ordinary reduction: the special fibre is smooth\n");
    }
    let d = cert.curve.base_degree();
    let _ = writeln!(
        text,
        "stable model over F_{{2^{d}}}: Qbar = {}, Pbar = {}",
        poly_display(&model.qbar),
        poly_display(&model.pbar),
    );
    let _ = writeln!(text, "nodes ({}):", node_list.len());
    for node in &node_list {
        let orbit = node_edge_orbit(node, &st, &st_orbits);
        let _ = writeln!(
            text,
            "  pair {}: r = {}, thickness {}, residue degree {}, {}, depth {}, edge orbit {}",
            node.pair_index,
            node.r,
            node.thickness,
            node.residue_degree,
            if node.split { "split" } else { "non-split" },
            node.depth,
            orbit,
        );
    }
    let _ = writeln!(
        text,
        "stable graph: {} vertices, {} edges, cycle rank {}; vertex orbits {:?}, edge orbits {:?}",
        st.vertices.len(),
        st.edges.len(),
        cycle_rank(&st),
        st_orbits.vertex_orbits,
        st_orbits.edge_orbits,
    );
    let mr_orbits = orbit_report(&mr);
    let _ = writeln!(
        text,
        "minimal regular graph: {} vertices, {} edges, cycle rank {}; vertex orbits {:?}, edge orbits {:?}",
        mr.vertices.len(),
        mr.edges.len(),
        cycle_rank(&mr),
        mr_orbits.vertex_orbits,
        mr_orbits.edge_orbits,
    );
    let _ = writeln!(text, "cluster picture at p = 2:\n{}", indent(&pic.render()));
    let _ = writeln!(text, "shifted picture:\n{}", indent(&shifted.render()));
    match &kernel {
        Some(k) => {
            let basis = k
                .basis()
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            let _ = writeln!(
                text,
                "two-torsion: full group dimension {}, kernel of reduction dimension {}, basis {basis}",
                2 * genus,
                k.dim(),
            );
        }
        None => {
            let _ = writeln!(text, "two-torsion kernel of reduction: needs verdict Star, skipped");
        }
    }

    let doc = json!({
        "label": label,
        "certificate": certificate_json(label, &cert),
        "good_ordinary": cert.is_star(),
        "stable_model": {
            "residue_degree": d,
            "qbar": poly_coords(&model.qbar),
            "pbar": poly_coords(&model.pbar),
        },
        "nodes": node_list
            .iter()
            .map(|n| node_json(n, &st, &st_orbits))
            .collect::<Vec<_>>(),
        "graphs": {
            "stable": graph_json(&st),
            "minimal_regular": graph_json(&mr),
        },
        "cluster_picture": pic.canonical_json(),
        "shifted_picture": shifted.canonical_json(),
        "two_torsion": kernel.map(|k| {
            json!({
                "full_dimension": 2 * genus,
                "kernel_dimension": k.dim(),
                "kernel_basis": k
                    .basis()
                    .iter()
                    .map(|e| mask_indices(e.mask()))
                    .collect::<Vec<_>>(),
            })
        }),
    });
    CurveOutcome { text, json: doc, code: 0 }
}

fn run_cluster(curve: &PreparedCurve, common: &CommonArgs, prime: u64, shifted: bool) -> CurveOutcome {
    let label = &curve.entry.label;
    if prime != 2 && !schema::is_small_prime(prime) {
        return error_outcome(label, &format!("{prime} is not a prime"));
    }
    let picture: ClusterPicture = if prime == 2 {
        match certify_curve(curve, common) {
            Ok(cert) => picture_from_certificate(&cert),
            Err(reason) => return fail_outcome(label, &reason),
        }
    } else {
        let factors = match curve.factors_for(prime) {
            Some(f) => f,
            None => {
                return error_outcome(
                    label,
                    &format!("no factored form stored for p = {prime}; add it under odd_primes"),
                )
            }
        };
        match odd_p_picture(prime, factors, common.precision) {
            Ok(p) => p,
            Err(e) => return error_outcome(label, &e.to_string()),
        }
    };
    let picture = if shifted { shifted_picture(&picture) } else { picture };
    let tag = if shifted { " (shifted)" } else { "" };
    let text = format!(
        "== {label} ==\ncluster picture at p = {prime}{tag}:\n{}",
        indent(&picture.render()),
    );
    let doc = json!({
        "label": label,
        "p": prime,
        "shifted": shifted,
        "picture": picture.canonical_json(),
    });
    CurveOutcome { text, json: doc, code: 0 }
}

fn run_graph(curve: &PreparedCurve, common: &CommonArgs, model: ModelKind, format: FormatKind) -> CurveOutcome {
    let label = &curve.entry.label;
    let cert = match certify_curve(curve, common) {
        Ok(cert) => cert,
        Err(reason) => return fail_outcome(label, &reason),
    };
    let sm = stable_model(&cert);
    let st = stable_graph(&cert, &sm);
    let (graph, name) = match model {
        ModelKind::Stable => (st, "stable"),
        ModelKind::Minimal => (minimal_regular_graph(&st), "minimal_regular"),
    };
    let doc = json!({
        "label": label,
        "model": name,
        "graph": graph_json(&graph),
    });
    let text = match format {
        FormatKind::Dot => format!("// curve: {label}\n{}", graph.to_dot(name)),
        FormatKind::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&doc).expect("serializable graph")
        ),
    };
    CurveOutcome { text, json: doc, code: 0 }
}

fn fail_outcome(label: &str, reason: &FailReason) -> CurveOutcome {
    let (reason_code, pair) = reason_tag(reason);
    if matches!(reason, FailReason::PrecisionExhausted) {
        let mut out = error_outcome(label, &reason.to_string());
        out.json["reason"] = Value::String(reason_code.to_string());
        return out;
    }
    CurveOutcome {
        text: format!("== {label} ==\nequation not of form (★★): {reason}\n"),
        json: json!({
            "label": label,
            "verdict": "fail",
            "reason": reason_code,
            "pair": pair,
            "message": reason.to_string(),
        }),
        code: 2,
    }
}

fn error_outcome(label: &str, message: &str) -> CurveOutcome {
    CurveOutcome {
        text: format!("== {label} ==\nerror: {message}\n"),
        json: json!({"label": label, "verdict": "error", "message": message}),
        code: 1,
    }
}

fn reason_tag(reason: &FailReason) -> (&'static str, Option<usize>) {
    match reason {
        FailReason::CNotOneMod4 => ("c_not_one_mod_4", None),
        FailReason::FBarNotASquare => ("f_bar_not_a_square", None),
        FailReason::QBarNotSeparable => ("q_bar_not_separable", None),
        FailReason::DiscCondition(i) => ("disc_condition", Some(*i)),
        FailReason::PrecisionExhausted => ("precision_exhausted", None),
    }
}

fn verdict_code(v: Verdict) -> &'static str {
    match v {
        Verdict::Star => "star",
        Verdict::StarStar => "star_star",
    }
}

/// Coordinates of a 2-adic element as decimal strings; residues are bounded
/// by 2^precision, which overflows doubles at every useful precision.
fn unram_json(x: &UnramElem) -> Value {
    Value::Array(
        x.coeffs()
            .iter()
            .map(|c| Value::String(c.to_string()))
            .collect(),
    )
}

/// Coefficient list with each residue field element in its display form.
fn poly_display(f: &Poly<FqElem>) -> String {
    let parts: Vec<String> = f.coeffs().iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// Coefficient list with each residue field element as its coordinate
/// vector, exact at any field degree.
fn poly_coords(f: &Poly<FqElem>) -> Value {
    Value::Array(
        f.coeffs()
            .iter()
            .map(|c| serde_json::to_value(c.coeffs()).expect("bit vectors serialize"))
            .collect(),
    )
}

fn mask_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

fn certificate_json(label: &str, cert: &StarCertificate) -> Value {
    json!({
        "label": label,
        "verdict": verdict_code(cert.verdict),
        "genus": cert.genus(),
        "c": int_to_json(cert.curve.c()),
        "a": int_to_json(&cert.a),
        "base_residue_degree": cert.curve.base_degree(),
        "relative_degree": cert.common_degree,
        "precision": cert.precision,
        "seed": cert.seed.to_string(),
        "frobenius_perm": cert.frobenius_perm,
        "pairs": cert
            .pairs
            .iter()
            .map(|p| {
                json!({
                    "index": p.index,
                    "gamma": unram_json(&p.gamma),
                    "eta": unram_json(&p.eta),
                    "eta_valuation": p.eta_valuation,
                    "depth": p.depth,
                    "residue_degree": p.residue_degree,
                    "r": p.r.coeffs(),
                })
            })
            .collect::<Vec<_>>(),
    })
}

fn node_edge_orbit(node: &Node, st: &DualGraph, orbits: &hyperfibre::graph::OrbitReport) -> usize {
    let edge = st
        .edges
        .iter()
        .position(|e| e.pair_index == Some(node.pair_index))
        .expect("every node has a stable graph edge");
    orbits
        .edge_orbits
        .iter()
        .position(|orbit| orbit.contains(&edge))
        .expect("every edge lies in an orbit")
}

fn node_json(node: &Node, st: &DualGraph, orbits: &hyperfibre::graph::OrbitReport) -> Value {
    json!({
        "pair_index": node.pair_index,
        "r": node.r.coeffs(),
        "thickness": node.thickness,
        "residue_degree": node.residue_degree,
        "split": node.split,
        "depth": node.depth,
        "edge_orbit": node_edge_orbit(node, st, orbits),
    })
}

fn graph_json(g: &DualGraph) -> Value {
    let orbits = orbit_report(g);
    json!({
        "vertices": g.vertices,
        "edges": g.edges,
        "frobenius": g.frobenius,
        "cycle_rank": cycle_rank(g),
        "total_genus": g.total_genus(),
        "vertex_orbits": orbits.vertex_orbits,
        "edge_orbits": orbits.edge_orbits,
    })
}

fn indent(s: &str) -> String {
    s.lines()
        .map(|l| format!("  {l}"))
        .collect::<Vec<_>>()
        .join("\n")
}

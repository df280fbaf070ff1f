//! Deterministic command-line front end for the graph-Laplacian toolkit.
//!
//! Every emitter formats floats with 17 significant digits, sorts rows and
//! object keys, and writes identical bytes for identical inputs, so output
//! files can be diffed across runs and machines.
//!
//! Exit codes: `0` success, `1` usage error (bad flags, malformed inputs),
//! `2` failure established while computing (axiom violations, solver
//! non-convergence, refused domains).

use clap::{Args, Parser, Subcommand, ValueEnum};
use lapnet::graph::{
    materialize, read_raw_graph, validate, validate_raw, GraphKind, GraphSystem, Vertex, Window,
    WindowedGraph,
};
use lapnet::heisenberg::{deficiency_probe_banded, HalfLineBandedOperator};
use lapnet::operator::{assemble_matrix, dump_matrix_csv, BoundaryMode, VertexField};
use lapnet::potential::{
    resistance_distance, resistance_table, solve_dipole, SolverKind,
};
use lapnet::semigroup::{heat_apply, truncation_error_check};
use lapnet::spectral::{
    defect_probe, hs_membership_line, truncated_spectrum, DefectConfig, DefectReport, Spectrum,
    DENSE_EIGEN_CAP,
};
use lapnet::util::float17;
use lapnet::LapnetError;
use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const BUILDER_GRAMMAR: &str = "\
Graph sources (--graph) are either a path to a lapnet-graph-v1 JSON file or a
builder spec:
  line                     constant-conductance chain over all integers
  cyclic:<n>               n-cycle, unit conductances (n >= 3)
  chain:constant           half-line chain, c(n, n+1) = 1
  chain:linear             half-line chain, c(n, n+1) = n + 1
  chain:square             half-line chain, c(n, n+1) = (n + 1)^2
  chain:geometric:<ratio>  half-line chain, c(n, n+1) = ratio^(n + 1)
  lattice:<d>x<n>          periodic d-dimensional box, n vertices per axis

Chain graphs are infinite and need --window lo:hi; finite graphs default to
the whole vertex set (--window all).

Exit codes: 0 success; 1 usage error; 2 computation failure.";

#[derive(Parser)]
#[command(
    name = "lapnet",
    version,
    about = "Weighted graph Laplacians: potentials, resistance, spectra, heat flow, defect probes",
    after_long_help = BUILDER_GRAMMAR,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GraphOpt {
    /// Graph file path or builder spec (see --help for the grammar)
    #[arg(long)]
    graph: String,
    /// Vertex window: `lo:hi` on chain graphs, `all` for finite graphs
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
}

#[derive(Args)]
struct OutOpt {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SolverArg {
    Cg,
    Dft,
    #[value(name = "closed-form")]
    ClosedForm,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Cg => SolverKind::Cg,
            SolverArg::Dft => SolverKind::Dft,
            SolverArg::ClosedForm => SolverKind::ClosedForm,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ModeArg {
    Induced,
    Compressed,
}

impl From<ModeArg> for BoundaryMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Induced => BoundaryMode::Induced,
            ModeArg::Compressed => BoundaryMode::Compressed,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a graph source against the format axioms and list violations
    Validate {
        /// Graph file path or builder spec
        #[arg(long)]
        graph: String,
    },
    /// Dump the windowed Laplacian matrix as coordinate-triple CSV
    Laplacian {
        #[command(flatten)]
        graph: GraphOpt,
        /// Boundary convention for the diagonal
        #[arg(long, value_enum, default_value_t = ModeArg::Induced)]
        mode: ModeArg,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Solve the two-pole potential problem on a window
    Potential {
        #[command(flatten)]
        graph: GraphOpt,
        /// Source pole (vertex id, comma-separated coordinates on lattices)
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Sink pole
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, value_enum, default_value_t = SolverArg::Cg)]
        solver: SolverArg,
        /// json: potential record; csv: `vertex,value` field snapshot
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Effective-resistance distances: one pair, or the full table
    Resistance {
        #[command(flatten)]
        graph: GraphOpt,
        /// First vertex; omit both poles for the all-pairs table
        #[arg(long, requires = "beta", allow_hyphen_values = true)]
        alpha: Option<String>,
        /// Second vertex
        #[arg(long, requires = "alpha", allow_hyphen_values = true)]
        beta: Option<String>,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Eigenvalues of the windowed Laplacian as `index,eigenvalue` CSV
    Spectrum {
        #[command(flatten)]
        graph: GraphOpt,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Heat flow from a point source; json: truncation-error certificate
    /// against a 10x reference window, csv: evolved field snapshot
    Heat {
        #[command(flatten)]
        graph: GraphOpt,
        /// Evolution time (>= 0)
        #[arg(long)]
        t: f64,
        /// Source vertex for the initial point mass
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Fractional-order membership of the integer-line dipole with poles
    /// `--alpha`/`--beta`: declares member or non-member at order `--s`
    Hs {
        /// Fractional order `s`
        #[arg(long)]
        s: f64,
        /// First pole on the integer line
        #[arg(long, allow_hyphen_values = true)]
        alpha: i64,
        /// Second pole on the integer line
        #[arg(long, allow_hyphen_values = true)]
        beta: i64,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Probe deficiency indices of a banded half-line operator at the
    /// canonical shifts (+i, -i, and -1 for chain Laplacians)
    Defect {
        /// qpq | hamiltonian | chain:<rule> (builder chain specs)
        #[arg(long)]
        model: String,
        /// Window size for the probe; a 2x window cross-checks the count
        #[arg(long, default_value_t = 256)]
        nmax: usize,
        #[command(flatten)]
        out: OutOpt,
    },
}

/// Errors carry their exit code: usage problems exit 1, computation
/// failures exit 2.
enum CliError {
    Usage(String),
    Fail(String),
}

type CliResult<T> = Result<T, CliError>;

impl From<LapnetError> for CliError {
    fn from(e: LapnetError) -> Self {
        match e {
            LapnetError::Graph(_)
            | LapnetError::GraphFile(_)
            | LapnetError::Window(_)
            | LapnetError::UnknownVertex(_)
            | LapnetError::Domain(_) => CliError::Usage(e.to_string()),
            other => CliError::Fail(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Fail(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// `LAPNET_THREADS` caps solver parallelism by sizing the global worker pool.
fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("LAPNET_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .map_err(|_| format!("LAPNET_THREADS={raw:?} is not a positive integer"))?;
    if n == 0 {
        return Err("LAPNET_THREADS must be >= 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("could not size the worker pool: {e}"))
}

fn run(cmd: Cmd) -> CliResult<()> {
    match cmd {
        Cmd::Validate { graph } => run_validate(&graph),
        Cmd::Laplacian { graph, mode, out } => run_laplacian(&graph, mode.into(), &out),
        Cmd::Potential {
            graph,
            alpha,
            beta,
            solver,
            format,
            out,
        } => run_potential(&graph, &alpha, &beta, solver.into(), format, &out),
        Cmd::Resistance {
            graph,
            alpha,
            beta,
            out,
        } => run_resistance(&graph, alpha.as_deref(), beta.as_deref(), &out),
        Cmd::Spectrum { graph, out } => run_spectrum(&graph, &out),
        Cmd::Heat {
            graph,
            t,
            alpha,
            format,
            out,
        } => run_heat(&graph, t, &alpha, format, &out),
        Cmd::Hs { s, alpha, beta, out } => run_hs(s, alpha, beta, &out),
        Cmd::Defect { model, nmax, out } => run_defect(&model, nmax, &out),
    }
}

// ---------------------------------------------------------------------------
// Input plumbing
// ---------------------------------------------------------------------------

fn looks_like_path(s: &str) -> bool {
    s.ends_with(".json") || s.contains('/') || Path::new(s).exists()
}

fn load_graph(source: &str) -> CliResult<GraphSystem> {
    if looks_like_path(source) {
        let path = Path::new(source);
        let raw = read_raw_graph(path).map_err(|e| CliError::Usage(e.to_string()))?;
        let report = validate_raw(&raw);
        if !report.is_valid() {
            let listed: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            return Err(CliError::Fail(format!(
                "{source}: {} violation(s): {}",
                report.violations.len(),
                listed.join("; ")
            )));
        }
        Ok(lapnet::graph::load_graph_file(path)?)
    } else {
        Ok(GraphSystem::from_spec(source)?)
    }
}

fn resolve_window(g: &GraphSystem, window: Option<&str>) -> CliResult<Window> {
    match window {
        Some("all") => Ok(Window::All),
        Some(s) => Ok(Window::parse_range(s)?),
        None => match g.kind() {
            GraphKind::Chain { .. } => Err(CliError::Usage(
                "chain graphs are infinite; pass --window lo:hi".into(),
            )),
            _ => Ok(Window::All),
        },
    }
}

fn load_windowed(opt: &GraphOpt) -> CliResult<(GraphSystem, Window, WindowedGraph)> {
    let g = load_graph(&opt.graph)?;
    let win = resolve_window(&g, opt.window.as_deref())?;
    let w = materialize(&g, &win)?;
    Ok((g, win, w))
}

fn parse_vertex(s: &str) -> CliResult<Vertex> {
    let coords: Result<Vec<i64>, _> = s.split(',').map(|p| p.trim().parse::<i64>()).collect();
    match coords {
        Ok(c) if !c.is_empty() => Ok(Vertex(c)),
        _ => Err(CliError::Usage(format!(
            "vertex {s:?} should be an integer or comma-separated integers"
        ))),
    }
}

fn write_output(out: &OutOpt, text: &str) -> CliResult<()> {
    match &out.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Fail(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Scalar vertices print as bare integers, lattice vertices as quoted
/// coordinate lists, so JSON stays machine-readable in both cases.
fn vertex_json(v: &Vertex) -> String {
    if v.0.len() == 1 {
        format!("{}", v.0[0])
    } else {
        format!("\"{v}\"")
    }
}

fn float_array(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| float17(x)).collect();
    format!("[{}]", items.join(", "))
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_validate(source: &str) -> CliResult<()> {
    let report = if looks_like_path(source) {
        let raw = read_raw_graph(Path::new(source)).map_err(|e| CliError::Usage(e.to_string()))?;
        validate_raw(&raw)
    } else {
        let g = GraphSystem::from_spec(source)?;
        validate(&g)
    };
    if report.is_valid() {
        println!("ok: {source} satisfies the graph axioms");
        Ok(())
    } else {
        for v in &report.violations {
            println!("violation: {v}");
        }
        Err(CliError::Fail(format!(
            "{source}: {} violation(s)",
            report.violations.len()
        )))
    }
}

fn run_laplacian(opt: &GraphOpt, mode: BoundaryMode, out: &OutOpt) -> CliResult<()> {
    let (_, win, w) = load_windowed(opt)?;
    let m = assemble_matrix(&w, mode)?;
    let mut buf = Vec::new();
    dump_matrix_csv(&m, &opt.graph, &window_desc(&win), mode, &mut buf)?;
    write_output(out, &String::from_utf8(buf).expect("csv is utf-8"))
}

fn window_desc(win: &Window) -> String {
    match win {
        Window::All => "all".into(),
        Window::Range { lo, hi } => format!("{lo}:{hi}"),
        Window::Vertices(list) => format!("{}-vertices", list.len()),
    }
}

fn run_potential(
    opt: &GraphOpt,
    alpha: &str,
    beta: &str,
    solver: SolverKind,
    format: FormatArg,
    out: &OutOpt,
) -> CliResult<()> {
    let (_, _, w) = load_windowed(opt)?;
    let alpha = parse_vertex(alpha)?;
    let beta = parse_vertex(beta)?;
    let sol = solve_dipole(&w, &alpha, &beta, solver)?;
    let text = match format {
        FormatArg::Json => {
            let mut values = String::new();
            for (i, v) in w.vertices().iter().enumerate() {
                let sep = if i + 1 < w.len() { "," } else { "" };
                let _ = writeln!(
                    values,
                    "    [{}, {}]{sep}",
                    vertex_json(v),
                    float17(sol.field.get(i).re)
                );
            }
            format!(
                "{{\n  \"alpha\": {},\n  \"beta\": {},\n  \"energy\": {},\n  \"residual\": {},\n  \"values\": [\n{}  ]\n}}\n",
                vertex_json(&alpha),
                vertex_json(&beta),
                float17(sol.energy),
                float17(sol.residual_norm),
                values
            )
        }
        FormatArg::Csv => field_csv(&w, |i| sol.field.get(i).re),
    };
    write_output(out, &text)
}

fn field_csv(w: &WindowedGraph, value: impl Fn(usize) -> f64) -> String {
    let mut text = String::from("vertex,value\n");
    for (i, v) in w.vertices().iter().enumerate() {
        let _ = writeln!(text, "{v},{}", float17(value(i)));
    }
    text
}

fn run_resistance(
    opt: &GraphOpt,
    alpha: Option<&str>,
    beta: Option<&str>,
    out: &OutOpt,
) -> CliResult<()> {
    let (_, _, w) = load_windowed(opt)?;
    let mut text = String::from("x,y,dist\n");
    match (alpha, beta) {
        (Some(a), Some(b)) => {
            let (x, y) = (parse_vertex(a)?, parse_vertex(b)?);
            let d = resistance_distance(&w, &x, &y)?;
            let _ = writeln!(text, "{x},{y},{}", float17(d));
        }
        (None, None) => {
            for (i, j, d) in resistance_table(&w)? {
                let _ = writeln!(text, "{},{},{}", w.vertex(i), w.vertex(j), float17(d));
            }
        }
        _ => {
            return Err(CliError::Usage(
                "pass both --alpha and --beta, or neither for the all-pairs table".into(),
            ))
        }
    }
    write_output(out, &text)
}

fn run_spectrum(opt: &GraphOpt, out: &OutOpt) -> CliResult<()> {
    let (_, _, w) = load_windowed(opt)?;
    let m = assemble_matrix(&w, BoundaryMode::Induced)?;
    let dec = match truncated_spectrum(&m, DENSE_EIGEN_CAP)? {
        Spectrum::Full(dec) => dec,
        Spectrum::Bounds { .. } => {
            return Err(CliError::Fail(format!(
                "window has {} vertices, beyond the dense eigensolver cap {DENSE_EIGEN_CAP}",
                w.len()
            )))
        }
    };
    let mut text = String::from("index,eigenvalue\n");
    for (i, x) in dec.values.iter().enumerate() {
        let _ = writeln!(text, "{i},{}", float17(*x));
    }
    write_output(out, &text)
}

fn run_heat(opt: &GraphOpt, t: f64, alpha: &str, format: FormatArg, out: &OutOpt) -> CliResult<()> {
    let (g, win, w) = load_windowed(opt)?;
    let alpha = parse_vertex(alpha)?;
    let ia = w
        .index_of(&alpha)
        .ok_or_else(|| CliError::Usage(format!("vertex {alpha} is not in the window")))?;
    let source = VertexField::dirac(w.len(), ia);
    let text = match format {
        FormatArg::Json => {
            // Chains compare against a 10x window; finite graphs have no
            // exterior, so the reference is the window itself and the bound
            // is trivially zero.
            let reference = match &win {
                Window::Range { lo, hi } => Window::Range {
                    lo: lo * 10,
                    hi: hi * 10,
                },
                other => other.clone(),
            };
            let check = truncation_error_check(&g, &win, &reference, t, &source)?;
            format!(
                "{{\n  \"bound\": {},\n  \"lambda_pf\": {},\n  \"lhs\": {},\n  \"pass\": {},\n  \"t\": {}\n}}\n",
                float17(check.bound),
                float17(check.lambda_pf),
                float17(check.lhs),
                check.pass,
                float17(check.t)
            )
        }
        FormatArg::Csv => {
            let m = assemble_matrix(&w, BoundaryMode::Induced)?;
            let evolved = heat_apply(&m, t, &source)?;
            field_csv(&w, |i| evolved.get(i).re)
        }
    };
    write_output(out, &text)
}

fn run_hs(s: f64, alpha: i64, beta: i64, out: &OutOpt) -> CliResult<()> {
    let k = (alpha - beta).abs();
    if k == 0 {
        return Err(CliError::Usage("the two poles must be distinct".into()));
    }
    let m = hs_membership_line(k, s)?;
    let norm_sq = match m.norm_sq {
        Some(x) => float17(x),
        None => "null".into(),
    };
    let text = format!(
        "{{\n  \"boundary_case\": {},\n  \"integral_sequence\": {},\n  \"k\": {},\n  \"norm_sq\": {},\n  \"s\": {},\n  \"verdict\": \"{}\"\n}}\n",
        m.boundary_case,
        float_array(&m.integrals),
        m.k,
        norm_sq,
        float17(m.s),
        m.verdict.as_str()
    );
    write_output(out, &text)
}

fn run_defect(model: &str, nmax: usize, out: &OutOpt) -> CliResult<()> {
    let op = match model {
        "qpq" => HalfLineBandedOperator::qpq(),
        "hamiltonian" => HalfLineBandedOperator::hamiltonian(),
        spec if spec.starts_with("chain:") => {
            HalfLineBandedOperator::from_chain(&GraphSystem::from_spec(spec)?)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "model {other:?} is not qpq, hamiltonian, or chain:<rule>"
            )))
        }
    };
    let cfg = DefectConfig::default();
    let pair = deficiency_probe_banded(&op, nmax, &cfg)?;
    let indices = match pair.indices() {
        Some((p, m)) => format!("[{p}, {m}]"),
        None => "null".into(),
    };
    let minus_one = if op.kind == lapnet::heisenberg::OperatorKind::ChainLaplacian {
        let report = defect_probe(&op, Complex64::new(-1.0, 0.0), nmax, &cfg)?;
        format!("  \"minus_one\": {},\n", report_json(&report, 1))
    } else {
        String::new()
    };
    let text = format!(
        "{{\n  \"indices\": {indices},\n  \"minus_i\": {},\n{minus_one}  \"plus_i\": {}\n}}\n",
        report_json(&pair.minus, 1),
        report_json(&pair.plus, 1)
    );
    write_output(out, &text)
}

/// Hand-rolled JSON for a probe report: keys sorted, floats via the
/// 17-significant-digit emitter, `indent` in units of two spaces.
fn report_json(r: &DefectReport, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    let inner = "  ".repeat(indent + 1);
    let count = match r.estimated_count {
        Some(c) => c.to_string(),
        None => "null".into(),
    };
    let mut windows = String::new();
    for (i, w) in r.windows.iter().enumerate() {
        let sep = if i + 1 < r.windows.len() { "," } else { "" };
        let growth = match w.shooting_growth {
            Some(g) => float17(g),
            None => "null".into(),
        };
        let _ = write!(
            windows,
            "{inner}  {{\"count\": {}, \"relative_residuals\": {}, \"shooting_growth\": {growth}, \"sigma_max\": {}, \"tail_masses\": {}, \"window\": {}}}{sep}\n",
            w.count,
            float_array(&w.relative_residuals),
            float17(w.sigma_max),
            float_array(&w.tail_masses),
            w.window
        );
    }
    format!(
        "{{\n{inner}\"config\": {{\"tail_fraction\": {}, \"tail_mass_threshold\": {}}},\n{inner}\"estimated_count\": {count},\n{inner}\"n_max\": {},\n{inner}\"operator\": \"{}\",\n{inner}\"shift\": [{}, {}],\n{inner}\"windows\": [\n{windows}{inner}]\n{pad}}}",
        float17(r.config.tail_fraction),
        float17(r.config.tail_mass_threshold),
        r.n_max,
        r.operator,
        float17(r.shift.re),
        float17(r.shift.im),
    )
}

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use polynet::construct::{Choices, Construction};
use polynet::io::{read_json, PolymatroidInput};
use polynet::search::RateTable;
use polynet::{
    best_average_rate, build_network, check_dpn, extract_solution, max_symmetric_rate,
    polymatroid_from_solution, rates, search_linear, verify_solution, DiscretePolymatroid, Field,
    FncSolution, IntVector, Matroid, Network, Policy, PolymatroidMap, SearchOptions, Subset,
    Verdict,
};

const OK: u8 = 0;
const FAILS: u8 = 1;
const INPUT: u8 = 2;
const EXHAUSTED: u8 = 3;
const BUDGET: u8 = 4;

#[derive(Parser)]
#[command(
    name = "polynet",
    version,
    about = "Discrete polymatroids and linear fractional network codes"
)]
struct Cli {
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank functions, bases and excluded vectors.
    #[command(subcommand)]
    Dpm(Dpm),
    #[command(subcommand)]
    Matroid(MatroidCmd),
    /// Build, check and draw networks.
    #[command(subcommand)]
    Net(Net),
    /// Fractional network code solutions.
    #[command(subcommand)]
    Fnc(Fnc),
}

#[derive(Args)]
struct RepArg {
    /// Rank table {"r","rank"} or representation {"q","ambient","generators"}.
    #[arg(long)]
    rep: PathBuf,
}

#[derive(Subcommand)]
enum Dpm {
    /// Rank of one subset, or the whole table.
    Rank {
        #[command(flatten)]
        rep: RepArg,
        /// Comma-separated 1-based elements; "" is the empty set.
        #[arg(long)]
        subset: Option<String>,
    },
    Bases {
        #[command(flatten)]
        rep: RepArg,
    },
    /// Minimal excluded vectors C_i.
    Csets {
        #[command(flatten)]
        rep: RepArg,
        /// 1-based element; all elements when omitted.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Check the rank axioms.
    Axioms {
        #[command(flatten)]
        rep: RepArg,
    },
}

#[derive(Subcommand)]
enum MatroidCmd {
    /// Check the independence axioms, and optionally that a network is matroidal.
    Check {
        #[arg(long)]
        matroid: PathBuf,
        #[arg(long, requires = "map")]
        net: Option<PathBuf>,
        #[arg(long, requires = "net")]
        map: Option<PathBuf>,
    },
    /// Print the polymatroid of a matroid, or the matroid of a representation.
    Convert {
        #[arg(long, conflicts_with = "rep", required_unless_present = "rep")]
        matroid: Option<PathBuf>,
        #[arg(long)]
        rep: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Exhaustive,
    Select,
}

#[derive(Subcommand)]
enum Net {
    /// Build a network from a polymatroid and a basis vector.
    Construct {
        #[command(flatten)]
        rep: RepArg,
        /// Basis vector, e.g. "1,1,1,0".
        #[arg(long)]
        basis: String,
        #[arg(long, value_enum, default_value = "exhaustive")]
        policy: PolicyArg,
        /// Demand choices {"choices":[{"i","u"}]} for the select policy.
        #[arg(long, required_if_eq("policy", "select"))]
        choices: Option<PathBuf>,
        /// Write the network here; the construction log goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Check the network, and optionally that it is discrete polymatroidal.
    Validate {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, requires = "map")]
        rep: Option<PathBuf>,
        #[arg(long, requires = "rep")]
        map: Option<PathBuf>,
        /// Message dimensions; rho_max for every message when omitted.
        #[arg(long, requires = "rep", requires = "edge_dim")]
        dims: Option<String>,
        #[arg(long, requires = "dims")]
        edge_dim: Option<usize>,
    },
    /// Graphviz rendering.
    Dot {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SearchArgs {
    /// Candidate assignments to examine before giving up.
    #[arg(long, default_value_t = polynet::search::DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Enumerate every local matrix instead of maximal subspaces.
    #[arg(long)]
    full: bool,
}

impl SearchArgs {
    fn options(&self) -> Result<SearchOptions> {
        if self.jobs == 0 {
            bail!(input("--jobs must be at least 1"));
        }
        Ok(SearchOptions {
            budget: self.budget,
            jobs: self.jobs,
            reduce: !self.full,
        })
    }
}

#[derive(Subcommand)]
enum Fnc {
    /// Solution induced by a representation through an edge map.
    Extract {
        #[command(flatten)]
        rep: RepArg,
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check conditions N1-N3 of a solution.
    Verify {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        sol: PathBuf,
    },
    Rates {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        sol: PathBuf,
    },
    /// Exhaustive search for a linear solution with fixed dimensions.
    Search {
        #[arg(long)]
        net: PathBuf,
        /// Message dimensions, e.g. "1,1,1".
        #[arg(long)]
        dims: String,
        #[arg(long)]
        edge_dim: usize,
        #[arg(long)]
        q: u32,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounded grid of rates with a linear solution.
    Capacity {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        q: u32,
        /// Largest symmetric message dimension.
        #[arg(long, default_value_t = 2)]
        k_max: usize,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// Search unequal dimensions up to --k-max by average rate instead.
        #[arg(long)]
        average: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Representation and edge map of the polymatroid a solution induces.
    Frompoly {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        sol: PathBuf,
        #[arg(long)]
        out_rep: Option<PathBuf>,
        #[arg(long)]
        out_map: Option<PathBuf>,
    },
}

/// An error attributable to the caller's input.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input(msg: impl Into<String>) -> InputError {
    InputError(msg.into())
}

struct Out {
    pretty: bool,
}

impl Out {
    fn json<T: Serialize + ?Sized>(&self, v: &T) {
        if self.pretty {
            println!("{}", polynet::io::to_json_pretty(v));
        } else {
            println!("{}", polynet::io::to_json(v));
        }
    }
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(read_json(path)?)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, v: &T) -> Result<()> {
    write_file(path, &format!("{}\n", polynet::io::to_json_pretty(v)))
}

fn field(q: u32) -> Result<Field> {
    Field::new(q).map_err(|e| input(e.to_string()).into())
}

fn numbers(text: &str, what: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| input(format!("{what}: {s:?} is not a number")).into())
        })
        .collect()
}

fn subset(text: &str, r: usize) -> Result<Subset> {
    let elems = numbers(text, "subset")?;
    if let Some(&bad) = elems.iter().find(|&&e| e == 0 || e > r) {
        bail!(input(format!("subset element {bad} outside 1..={r}")));
    }
    Ok(Subset::from_elements(elems.into_iter().map(|e| e - 1)))
}

fn one_based(x: Subset) -> Vec<usize> {
    x.elements().map(|i| i + 1).collect()
}

fn set_text(x: Subset) -> String {
    let items: Vec<String> = one_based(x).iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn polymatroid(arg: &RepArg) -> Result<(PolymatroidInput, DiscretePolymatroid)> {
    let p: PolymatroidInput = load(&arg.rep)?;
    let d = p.polymatroid()?;
    Ok((p, d))
}

fn vectors_text(vs: &[IntVector]) -> String {
    vs.iter().map(|v| format!("{v}\n")).collect()
}

fn dpm(cmd: Dpm, out: &Out) -> Result<u8> {
    match cmd {
        Dpm::Rank { rep, subset: s } => {
            let (_, d) = polymatroid(&rep)?;
            match s {
                Some(s) => println!("{}", d.rank(subset(&s, d.ground_set_size())?)),
                None if out.pretty => {
                    let mut text = String::new();
                    for x in Subset::all(d.ground_set_size()) {
                        writeln!(text, "{:<24} {}", set_text(x), d.rank(x))?;
                    }
                    print!("{text}");
                }
                None => out.json(&d),
            }
        }
        Dpm::Bases { rep } => {
            let (_, d) = polymatroid(&rep)?;
            let bases = d.bases()?;
            if out.pretty {
                println!("rank {}", d.rank_of());
                print!("{}", vectors_text(&bases));
            } else {
                out.json(&json!({ "rank": d.rank_of(), "bases": bases }));
            }
        }
        Dpm::Csets { rep, index } => {
            let (_, d) = polymatroid(&rep)?;
            let r = d.ground_set_size();
            let indices: Vec<usize> = match index {
                Some(i) if i == 0 || i > r => bail!(input(format!("--index {i} outside 1..={r}"))),
                Some(i) => vec![i - 1],
                None => (0..r).collect(),
            };
            for i in indices {
                let c = d.c_set(i)?;
                if out.pretty {
                    println!("C_{}:", i + 1);
                    print!("{}", vectors_text(&c));
                } else {
                    println!("{}", json!({ "i": i + 1, "c": c }));
                }
            }
        }
        Dpm::Axioms { rep } => {
            let (_, d) = polymatroid(&rep)?;
            let violations = d.validate_axioms();
            if out.pretty {
                for v in &violations {
                    println!("{v}");
                }
                println!(
                    "{}",
                    if violations.is_empty() {
                        "holds"
                    } else {
                        "fails"
                    }
                );
            } else {
                out.json(&json!({ "holds": violations.is_empty(), "violations": violations }));
            }
            return Ok(if violations.is_empty() { OK } else { FAILS });
        }
    }
    Ok(OK)
}

fn matroid(cmd: MatroidCmd, out: &Out) -> Result<u8> {
    match cmd {
        MatroidCmd::Check { matroid, net, map } => {
            let m: Matroid = load(&matroid)?;
            let violations = m.validate();
            let mut report = json!({ "holds": violations.is_empty(), "violations": violations });
            let mut ok = violations.is_empty();
            if let (Some(net), Some(map), true) = (net, map, ok) {
                let net: Network = load(&net)?;
                let f: PolymatroidMap = load(&map)?;
                let matroidal = polynet::bridge::is_matroidal(&net, &m, &f)?;
                report["matroidal"] = json!(matroidal);
                ok &= matroidal;
            }
            out.json(&report);
            Ok(if ok { OK } else { FAILS })
        }
        MatroidCmd::Convert { matroid, rep } => {
            if let Some(path) = matroid {
                let m: Matroid = load(&path)?;
                out.json(&m.to_polymatroid()?);
            } else if let Some(path) = rep {
                let p: PolymatroidInput = load(&path)?;
                let Some(rep) = p.representation() else {
                    bail!(input("--rep must be a representation, not a rank table"));
                };
                out.json(&Matroid::from_representation(rep)?);
            }
            Ok(OK)
        }
    }
}

fn parse_basis(text: &str, r: usize) -> Result<IntVector> {
    let parts: Vec<u32> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| input(format!("basis: {s:?} is not a number")))
        })
        .collect::<std::result::Result<_, _>>()?;
    if parts.len() != r {
        bail!(input(format!(
            "basis has {} components, the ground set has {r}",
            parts.len()
        )));
    }
    Ok(IntVector::new(parts))
}

fn net(cmd: Net, out: &Out) -> Result<u8> {
    match cmd {
        Net::Construct {
            rep,
            basis,
            policy,
            choices,
            out: out_path,
            dot,
            map,
        } => {
            let (_, d) = polymatroid(&rep)?;
            let b = parse_basis(&basis, d.ground_set_size())?;
            let policy = match (policy, choices) {
                (PolicyArg::Select, Some(path)) => Policy::Select(load::<Choices>(&path)?.choices),
                _ => Policy::Exhaustive,
            };
            let c: Construction = build_network(&d, &b, &policy)?;
            if let Some(path) = &dot {
                write_file(path, &c.network.to_dot())?;
            }
            if let Some(path) = &map {
                write_json(path, &c.map)?;
            }
            match &out_path {
                Some(path) => {
                    write_json(path, &c.network)?;
                    out.json(&json!({ "sources": one_based(c.sources), "covered": one_based(c.covered), "log": c.log }));
                }
                None => out.json(&c),
            }
            Ok(OK)
        }
        Net::Validate {
            net,
            rep,
            map,
            dims,
            edge_dim,
        } => {
            let network: Network = load(&net)?;
            let violations = network.validate();
            let mut report = json!({ "valid": violations.is_empty(), "violations": violations });
            let mut ok = violations.is_empty();
            if ok {
                report["order"] = json!(network.ancestral_order()?);
            }
            if let (Some(rep), Some(map), true) = (rep, map, ok) {
                let (_, d) = polymatroid(&RepArg { rep })?;
                let f: PolymatroidMap = load(&map)?;
                let (k, n) = match (dims, edge_dim) {
                    (Some(dims), Some(n)) => (numbers(&dims, "dims")?, n),
                    _ => {
                        let rho = d.rho_max() as usize;
                        (vec![rho; network.message_count()], rho)
                    }
                };
                let dpn = check_dpn(&network, &d, &f, &k, n)?;
                ok &= dpn.is_empty();
                report["polymatroidal"] =
                    json!({ "k": k, "n": n, "holds": dpn.is_empty(), "violations": dpn });
            }
            out.json(&report);
            Ok(if ok { OK } else { FAILS })
        }
        Net::Dot { net, out: path } => {
            let network: Network = load(&net)?;
            network.ensure_valid()?;
            match path {
                Some(path) => write_file(&path, &network.to_dot())?,
                None => print!("{}", network.to_dot()),
            }
            Ok(OK)
        }
    }
}

fn rate_table_text(t: &RateTable) -> String {
    let mut text = String::new();
    for c in &t.cells {
        let k: Vec<String> = c.k.iter().map(ToString::to_string).collect();
        let _ = writeln!(
            text,
            "k=({}) n={:<3} rate={:<6} {:<15} {}",
            k.join(","),
            c.n,
            c.rate.to_string(),
            c.verdict.label(),
            c.candidates_examined
        );
    }
    let _ = writeln!(
        text,
        "best {}",
        t.best.map_or("none".to_string(), |b| b.to_string())
    );
    text
}

fn fnc(cmd: Fnc, out: &Out) -> Result<u8> {
    match cmd {
        Fnc::Extract {
            rep,
            net,
            map,
            out: path,
        } => {
            let p: PolymatroidInput = load(&rep.rep)?;
            let Some(rep) = p.representation() else {
                bail!(input("--rep must be a representation, not a rank table"));
            };
            let network: Network = load(&net)?;
            let f: PolymatroidMap = load(&map)?;
            let sol = extract_solution(&network, rep, &f)?;
            match path {
                Some(path) => write_json(&path, &sol)?,
                None => out.json(&sol),
            }
            Ok(OK)
        }
        Fnc::Verify { net, sol } => {
            let network: Network = load(&net)?;
            let s: FncSolution = load(&sol)?;
            let check = verify_solution(&network, &s)?;
            if out.pretty {
                for f in &check.failures {
                    println!("{f}");
                }
                println!(
                    "{}",
                    if check.is_verified() {
                        "verified"
                    } else {
                        "fails"
                    }
                );
            } else {
                out.json(&json!({ "verified": check.is_verified(), "failures": check.failures }));
            }
            Ok(if check.is_verified() { OK } else { FAILS })
        }
        Fnc::Rates { net, sol } => {
            let network: Network = load(&net)?;
            let s: FncSolution = load(&sol)?;
            out.json(&rates(&network, &s)?);
            Ok(OK)
        }
        Fnc::Search {
            net,
            dims,
            edge_dim,
            q,
            search,
            out: path,
        } => {
            let network: Network = load(&net)?;
            let k = numbers(&dims, "dims")?;
            let outcome = search_linear(&network, &k, edge_dim, field(q)?, &search.options()?)?;
            if let (Some(path), Some(sol)) = (&path, outcome.verdict.solution()) {
                write_json(path, sol)?;
            }
            out.json(&json!({
                "verdict": outcome.verdict,
                "candidates_examined": outcome.candidates_examined,
                "bounds": outcome.bounds,
                "solution": outcome.verdict.solution(),
            }));
            Ok(match outcome.verdict {
                Verdict::Found(_) => OK,
                Verdict::ExhaustedNone => EXHAUSTED,
                Verdict::BudgetExceeded => BUDGET,
            })
        }
        Fnc::Capacity {
            net,
            q,
            k_max,
            n_max,
            average,
            search,
        } => {
            let network: Network = load(&net)?;
            let opts = search.options()?;
            let table = if average {
                best_average_rate(&network, field(q)?, k_max, n_max, &opts)?
            } else {
                max_symmetric_rate(&network, field(q)?, k_max, n_max, &opts)?
            };
            if out.pretty {
                print!("{}", rate_table_text(&table));
            } else {
                out.json(&table);
            }
            let exceeded = table
                .cells
                .iter()
                .any(|c| c.verdict == Verdict::BudgetExceeded);
            Ok(match (table.best, exceeded) {
                (Some(_), _) => OK,
                (None, true) => BUDGET,
                (None, false) => EXHAUSTED,
            })
        }
        Fnc::Frompoly {
            net,
            sol,
            out_rep,
            out_map,
        } => {
            let network: Network = load(&net)?;
            let s: FncSolution = load(&sol)?;
            let (rep, f) = polymatroid_from_solution(&network, &s)?;
            let violations = check_dpn(&network, &rep, &f, &s.k, s.n)?;
            if let Some(path) = &out_rep {
                write_json(path, &rep)?;
            }
            if let Some(path) = &out_map {
                write_json(path, &f)?;
            }
            out.json(&json!({
                "representation": rep,
                "map": f,
                "polymatroidal": violations.is_empty(),
                "violations": violations,
            }));
            Ok(if violations.is_empty() { OK } else { FAILS })
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use polynet::Error as E;
    if err.downcast_ref::<InputError>().is_some() {
        return INPUT;
    }
    match err.downcast_ref::<E>() {
        Some(E::NotPolymatroidal(_) | E::Inconsistent(_) | E::WidthExceeded { .. }) => FAILS,
        Some(E::Budget { .. }) => BUDGET,
        _ => INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out { pretty: cli.pretty };
    let result = match cli.command {
        Command::Dpm(c) => dpm(c, &out),
        Command::Matroid(c) => matroid(c, &out),
        Command::Net(c) => net(c, &out),
        Command::Fnc(c) => fnc(c, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

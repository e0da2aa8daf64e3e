use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use hodgetree::analysis::{kscore_experiment, trajectory_signals};
use hodgetree::citation::citation_complex;
use hodgetree::dictionary::{ghwt, haar_basis, hglet, reorder_f2c, Dictionary, DictionaryKind, Ordering};
use hodgetree::hodge::{boundary, laplacian, signed_adjacency};
use hodgetree::io::{
    coefficients_csv, curves_csv, kscore_csv, read_complex, read_dictionary, read_records, read_signal,
    read_signal_set, read_tree, stratum_keys, to_json, write_complex, DictionaryFile, PursuitFile,
    SelectionFile, SignalFile, TreeFile,
};
use hodgetree::mesh::{delaunay_sample, interpolate_image, random_points, Grid, Synthetic};
use hodgetree::par;
use hodgetree::partition::build_tree;
use hodgetree::pipeline::{Method, Transforms};
use hodgetree::selection::{analyze, best_basis, greedy_select, omp, selection_terms, CostSpec, Pursuit};
use hodgetree::sparse::CsrMatrix;
use hodgetree::{SimplicialComplex, Variant};

#[derive(Parser)]
#[command(name = "hodgetree", version, about = "Multiscale transforms on simplicial complexes")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker thread cap; results do not depend on it.
    #[arg(long, global = true, env = "HODGETREE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect a complex.
    #[command(subcommand)]
    Complex(ComplexCommand),
    /// Print a Laplacian, its signed adjacency or a boundary matrix.
    Laplacian(LaplacianArgs),
    /// Build the bipartition tree of a stratum.
    Partition(PartitionArgs),
    /// Build a Haar, HGLET or GHWT dictionary on a tree.
    Dict(DictArgs),
    /// Best-basis search over a dictionary.
    Bestbasis(BestBasisArgs),
    /// Orthogonal matching pursuit.
    Omp(OmpArgs),
    /// Greedy (matching pursuit) selection.
    Greedy(GreedyArgs),
    /// Relative approximation error curves.
    Approx(ApproxArgs),
    /// Clustering score of OMP features.
    Kscore(KscoreArgs),
}

#[derive(Subcommand)]
enum ComplexCommand {
    Build(BuildArgs),
    Info {
        input: PathBuf,
    },
}

#[derive(Args)]
struct BuildArgs {
    /// JSON complex file.
    #[arg(long, group = "source")]
    from_simplices: Option<PathBuf>,
    /// `u v [w]` edge list.
    #[arg(long, group = "source")]
    from_edges: Option<PathBuf>,
    /// Delaunay triangulation of this many random points.
    #[arg(long, group = "source")]
    delaunay: Option<usize>,
    /// Co-authorship records.
    #[arg(long, group = "source")]
    citations: Option<PathBuf>,
    /// Image sampled at the Delaunay vertices.
    #[arg(long, requires = "delaunay", conflicts_with = "image")]
    synthetic: Option<Synthetic>,
    /// PGM image sampled at the Delaunay vertices.
    #[arg(long, requires = "delaunay")]
    image: Option<PathBuf>,
    /// Writes `signal_<k>.json` for every stratum.
    #[arg(long)]
    signal_dir: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Adjacency,
    Laplacian,
    Boundary,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixFormat {
    Pretty,
    Coo,
    Csv,
}

#[derive(Args)]
struct LaplacianArgs {
    input: PathBuf,
    #[arg(long)]
    kappa: usize,
    #[arg(long, default_value = "comb")]
    variant: Variant,
    #[arg(long, value_enum, default_value = "adjacency")]
    matrix: MatrixKind,
    #[arg(long, value_enum, default_value = "pretty")]
    format: MatrixFormat,
}

#[derive(Args)]
struct PartitionArgs {
    input: PathBuf,
    #[arg(long)]
    kappa: usize,
    /// `sym` or `rw`; both produce the same sign pattern and hence the same tree.
    #[arg(long, default_value = "sym")]
    variant: Variant,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DictArgs {
    input: PathBuf,
    tree: PathBuf,
    #[arg(long)]
    kind: DictionaryKind,
    #[arg(long)]
    kappa: usize,
    /// HGLET Laplacian: `sym` or `comb`.
    #[arg(long, default_value = "sym")]
    variant: Variant,
    #[arg(long, default_value = "c2f")]
    order: Ordering,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SignalArgs {
    dictionary: PathBuf,
    signal: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write `atom,j,k,l,coefficient` rows here.
    #[arg(long)]
    coefficients: Option<PathBuf>,
}

#[derive(Args)]
struct BestBasisArgs {
    #[command(flatten)]
    io: SignalArgs,
    #[arg(long, default_value = "l1")]
    cost: CostSpec,
    #[arg(long, default_value = "c2f")]
    direction: Ordering,
}

#[derive(Args)]
struct OmpArgs {
    #[command(flatten)]
    io: SignalArgs,
    #[arg(long)]
    terms: usize,
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
}

#[derive(Args)]
struct GreedyArgs {
    #[command(flatten)]
    io: SignalArgs,
    #[arg(long)]
    terms: usize,
}

#[derive(Args)]
struct ApproxArgs {
    input: PathBuf,
    signal: PathBuf,
    #[arg(long)]
    kappa: usize,
    /// A method name or `all`.
    #[arg(long, default_value = "all")]
    method: String,
    #[arg(long, default_value = "l1")]
    cost: CostSpec,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct KscoreArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    kappa: usize,
    /// Signal set file.
    #[arg(long, conflicts_with = "trajectories")]
    signals: Option<PathBuf>,
    /// Generate this many random-walk edge flows instead.
    #[arg(long)]
    trajectories: Option<usize>,
    #[arg(long, default_value_t = 30)]
    steps: usize,
    #[arg(long, default_value_t = 4)]
    groups: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4, 5, 6, 7])]
    clusters: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [5, 10, 15, 20, 25])]
    features: Vec<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Failures caused by input data rather than usage.
#[derive(Debug)]
struct DataError(hodgetree::Error);

impl std::fmt::Display for DataError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for DataError {}

fn data<T>(r: hodgetree::Result<T>) -> Result<T> {
    r.map_err(|e| DataError(e).into())
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

fn stratum_name(kappa: usize, n: usize) -> String {
    match kappa {
        0 => plural(n, "vertex", "vertices"),
        1 => plural(n, "edge", "edges"),
        2 => plural(n, "triangle", "triangles"),
        3 => plural(n, "tetrahedron", "tetrahedra"),
        k => plural(n, &format!("{k}-simplex"), &format!("{k}-simplices")),
    }
}

fn pretty(m: &CsrMatrix) -> String {
    let dense = m.to_dense();
    let mut s = String::new();
    for r in 0..dense.nrows() {
        let row: Vec<String> = (0..dense.ncols()).map(|c| format!("{:>9.4}", dense[(r, c)] + 0.0)).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

fn write_signals(dir: &Path, c: &SimplicialComplex, signals: &[Vec<f64>]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (k, f) in signals.iter().enumerate() {
        let file = SignalFile::new(&stratum_keys(c, k), k, f);
        emit(Some(&dir.join(format!("signal_{k}.json"))), &data(to_json(&file))?)?;
    }
    Ok(())
}

fn complex_build(a: &BuildArgs, seed: u64) -> Result<()> {
    let (c, signals) = if let Some(p) = &a.from_simplices {
        (data(read_complex(p))?, None)
    } else if let Some(p) = &a.from_edges {
        (data(read_complex(p))?, None)
    } else if let Some(n) = a.delaunay {
        let points = random_points(n, seed);
        let c = data(delaunay_sample(&points))?;
        let grid = match (&a.image, a.synthetic) {
            (Some(p), _) => Some(data(Grid::read_pgm(p))?),
            (None, Some(kind)) => Some(Grid::synthetic(kind, 256, 256)),
            (None, None) => None,
        };
        let signals = grid.map(|g| data(interpolate_image(&c, &g, &points))).transpose()?;
        (c, signals)
    } else if let Some(p) = &a.citations {
        let (c, signals) = data(citation_complex(&data(read_records(p))?))?;
        (c, Some(signals))
    } else {
        bail!("one of --from-simplices, --from-edges, --delaunay or --citations is required");
    };
    info!("built complex with counts {:?}", c.counts());
    match &a.output {
        Some(p) => data(write_complex(p, &c))?,
        None => print!("{}", data(to_json(&hodgetree::io::ComplexFile::from_complex(&c)))?),
    }
    match (&a.signal_dir, signals) {
        (Some(dir), Some(s)) => write_signals(dir, &c, &s)?,
        (Some(_), None) => bail!("--signal-dir needs an image (--synthetic or --image) or --citations"),
        _ => {}
    }
    Ok(())
}

fn complex_info(input: &Path) -> Result<()> {
    let c = data(read_complex(input))?;
    let parts: Vec<String> = c.counts().iter().enumerate().map(|(k, &n)| stratum_name(k, n)).collect();
    println!("{}", parts.join(", "));
    Ok(())
}

fn laplacian_cmd(a: &LaplacianArgs) -> Result<()> {
    let c = data(read_complex(&a.input))?;
    let m = match a.matrix {
        MatrixKind::Boundary => data(boundary(&c, a.kappa))?.matrix,
        MatrixKind::Laplacian => data(laplacian(&c, a.kappa, a.variant))?.matrix,
        MatrixKind::Adjacency => signed_adjacency(&data(laplacian(&c, a.kappa, a.variant))?).matrix,
    };
    let text = match a.format {
        MatrixFormat::Pretty => pretty(&m),
        MatrixFormat::Coo => m.to_coordinate_text(),
        MatrixFormat::Csv => m.to_dense_csv(),
    };
    emit(None, &text)
}

fn partition_cmd(a: &PartitionArgs) -> Result<()> {
    if !matches!(a.variant, Variant::Sym | Variant::Rw) {
        bail!("--variant must be sym or rw");
    }
    let c = data(read_complex(&a.input))?;
    let tree = data(build_tree(&c, a.kappa))?;
    info!("tree depth {}, regions per level {:?}", tree.j_max(), tree.regions_per_level());
    let file = TreeFile::from_tree(&tree, &stratum_keys(&c, a.kappa));
    emit(a.output.as_deref(), &data(to_json(&file))?)
}

fn dict_cmd(a: &DictArgs) -> Result<()> {
    let c = data(read_complex(&a.input))?;
    let (tree, keys) = data(read_tree(&a.tree))?;
    if keys != stratum_keys(&c, a.kappa) {
        let msg = format!("tree {} was not built on the {}-simplices of {}", a.tree.display(), a.kappa, a.input.display());
        return data(Err(hodgetree::Error::Invalid(msg)));
    }
    let tree = Arc::new(tree);
    let d = match a.kind {
        DictionaryKind::Haar => data(haar_basis(tree))?,
        DictionaryKind::Hglet => data(hglet(tree, &c, a.variant))?,
        DictionaryKind::Ghwt => data(ghwt(tree))?,
    };
    let d = match a.order {
        Ordering::C2F => d,
        Ordering::F2C => data(reorder_f2c(&d))?,
    };
    emit(a.output.as_deref(), &data(to_json(&DictionaryFile::from_dictionary(&d, &keys)))?)
}

fn load_signal(io: &SignalArgs) -> Result<(Dictionary, Vec<f64>)> {
    let (d, keys) = data(read_dictionary(&io.dictionary))?;
    let f = data(read_signal(&io.signal, &keys, d.tree.kappa))?;
    Ok((d, f))
}

fn bestbasis_cmd(a: &BestBasisArgs) -> Result<()> {
    let (d, f) = load_signal(&a.io)?;
    let table = data(analyze(&d, &f))?;
    let sel = data(best_basis(&table, a.cost, a.direction))?;
    info!("best basis cost {}", sel.cost);
    if let Some(p) = &a.io.coefficients {
        let terms = selection_terms(&table, &sel);
        emit(Some(p), &coefficients_csv(&d, terms.iter().map(|t| (t.atom, t.coefficient))))?;
    }
    let file = SelectionFile::new(&table, &sel, &a.cost.to_string());
    emit(a.io.output.as_deref(), &data(to_json(&file))?)
}

fn pursuit_out(io: &SignalArgs, method: &str, d: &Dictionary, p: &Pursuit) -> Result<()> {
    if let Some(path) = &io.coefficients {
        emit(Some(path), &coefficients_csv(d, p.terms.iter().map(|t| (t.atom, t.coefficient))))?;
    }
    emit(io.output.as_deref(), &data(to_json(&PursuitFile::new(method, d, p)))?)
}

fn approx_cmd(a: &ApproxArgs) -> Result<()> {
    let c = data(read_complex(&a.input))?;
    let f = data(read_signal(&a.signal, &stratum_keys(&c, a.kappa), a.kappa))?;
    let methods: Vec<Method> = if a.method == "all" {
        Method::ALL.to_vec()
    } else {
        vec![a.method.parse::<Method>().map_err(anyhow::Error::new)?]
    };
    let t = data(Transforms::build(&c, a.kappa))?;
    let curves = methods.iter().map(|&m| data(t.curve(m, &f, a.cost))).collect::<Result<Vec<_>>>()?;
    emit(a.output.as_deref(), &curves_csv(&curves))
}

fn kscore_cmd(a: &KscoreArgs, seed: u64) -> Result<()> {
    let c = data(read_complex(&a.input))?;
    let signals = match (&a.signals, a.trajectories) {
        (Some(p), _) => data(read_signal_set(p, &stratum_keys(&c, a.kappa), a.kappa))?,
        (None, Some(count)) => {
            if a.kappa != 1 {
                bail!("--trajectories produces edge flows; use --kappa 1");
            }
            data(trajectory_signals(&c, count, a.steps, a.groups, seed))?
        }
        (None, None) => bail!("one of --signals or --trajectories is required"),
    };
    let t = data(Transforms::build(&c, a.kappa))?;
    let dicts = data(t.kscore_dictionaries())?;
    let methods: Vec<(&str, &Dictionary)> = dicts.iter().map(|(n, d)| (*n, d)).collect();
    let rows = data(kscore_experiment(&methods, &signals, &a.clusters, &a.features, seed))?;
    emit(a.output.as_deref(), &kscore_csv(&rows))
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    par::with_threads(cli.threads, move || match &cli.command {
        Command::Complex(ComplexCommand::Build(a)) => complex_build(a, seed),
        Command::Complex(ComplexCommand::Info { input }) => complex_info(input),
        Command::Laplacian(a) => laplacian_cmd(a),
        Command::Partition(a) => partition_cmd(a),
        Command::Dict(a) => dict_cmd(a),
        Command::Bestbasis(a) => bestbasis_cmd(a),
        Command::Omp(a) => {
            let (d, f) = load_signal(&a.io)?;
            let p = data(omp(&d, &f, a.terms, a.tol))?;
            pursuit_out(&a.io, "omp", &d, &p)
        }
        Command::Greedy(a) => {
            let (d, f) = load_signal(&a.io)?;
            let p = data(greedy_select(&d, &f, a.terms))?;
            pursuit_out(&a.io, "greedy", &d, &p)
        }
        Command::Approx(a) => approx_cmd(a),
        Command::Kscore(a) => kscore_cmd(a, seed),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let is_data = e.chain().any(|c| c.is::<DataError>());
            eprintln!("error: {e:#}");
            ExitCode::from(if is_data { 2 } else { 1 })
        }
    }
}

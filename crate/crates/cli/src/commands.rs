use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use hoeffding::{
    generate_clusters, load_csv, mem_report, model_bytes, process_bundle, run_prequential,
    write_csv, Bundle, MemGrid, PrequentialReport, Sample, Scalar, Tree,
};

use crate::{usage, Format, GenArgs, MemArgs, Mode, Precision, ProcessArgs, RunArgs};

const DEFAULT_CLUSTERS: usize = 5;
const DEFAULT_DIMS: usize = 3;

pub fn gen(args: &GenArgs) -> Result<()> {
    match args.precision {
        Precision::F32 => gen_as::<f32>(args),
        Precision::F64 => gen_as::<f64>(args),
    }
}

fn gen_as<F: Scalar>(args: &GenArgs) -> Result<()> {
    let spec = args
        .cluster
        .spec(args.seed, (DEFAULT_CLUSTERS, DEFAULT_DIMS));
    let samples = generate_clusters::<F>(&spec)?;
    write_csv(&args.out, &samples).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}

/// A snapshot fixes the scalar width through its format version.
fn snapshot_precision(path: &Path) -> Result<Precision> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(match bytes.get(4..6) {
        Some([2, 0]) => Precision::F64,
        _ => Precision::F32,
    })
}

pub fn run(args: &RunArgs) -> Result<()> {
    let precision = match &args.snapshot_in {
        Some(path) => snapshot_precision(path)?,
        None => args.precision,
    };
    match precision {
        Precision::F32 => run_as::<f32>(args),
        Precision::F64 => run_as::<f64>(args),
    }
}

fn load_tree<F: Scalar>(path: &Path) -> Result<Tree<F>> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Tree::deserialize(&bytes).with_context(|| format!("loading tree from {}", path.display()))
}

fn save_tree<F: Scalar>(tree: &Tree<F>, path: &Path) -> Result<()> {
    fs::write(path, tree.serialize()).with_context(|| format!("writing {}", path.display()))
}

fn run_as<F: Scalar>(args: &RunArgs) -> Result<()> {
    if args.window == 0 {
        return Err(usage("--window must be positive"));
    }
    let snapshot = args
        .snapshot_in
        .as_deref()
        .map(load_tree::<F>)
        .transpose()?;

    let (stream, dims, classes) = match &args.csv.csv {
        Some(path) => {
            let ds = load_csv::<F>(path, &args.csv.schema()?)
                .with_context(|| format!("reading {}", path.display()))?;
            let (dims, classes) = match &snapshot {
                Some(t) => (t.params().dims, t.params().classes),
                None => (ds.dims(), args.csv.classes.unwrap_or(ds.classes().max(2))),
            };
            (ds.samples, dims, classes)
        }
        None => {
            let fallback = snapshot
                .as_ref()
                .map_or((DEFAULT_CLUSTERS, DEFAULT_DIMS), |t| {
                    (t.params().classes, t.params().dims)
                });
            let spec = args.cluster.spec(args.seed, fallback);
            let stream = if spec.samples == 0 {
                Vec::new()
            } else {
                generate_clusters::<F>(&spec)?
            };
            (stream, spec.dims, spec.clusters)
        }
    };

    let mut tree = match snapshot {
        Some(t) => t,
        None => {
            Tree::new(args.hyper.params::<F>(dims, classes)).map_err(|e| usage(e.to_string()))?
        }
    };
    let report = if stream.is_empty() {
        PrequentialReport {
            total: 0,
            correct: 0,
            accuracy: 0.0,
            train_time: Duration::ZERO,
            infer_time: Duration::ZERO,
            final_node_count: tree.node_count(),
            model_bytes: model_bytes(tree.params()),
            windowed_accuracy: Vec::new(),
        }
    } else {
        run_prequential(&mut tree, &stream, args.window)?
    };

    if let Some(path) = &args.report {
        let json = serde_json::to_string_pretty(&report)?;
        fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.snapshot_out {
        save_tree(&tree, path)?;
    }

    let mut out = io::stdout().lock();
    if args.json {
        serde_json::to_writer_pretty(&mut out, &report)?;
        writeln!(out)?;
    } else {
        print_report(&mut out, &report, &tree)?;
    }
    Ok(())
}

fn print_report<F: Scalar>(
    out: &mut impl Write,
    r: &PrequentialReport,
    tree: &Tree<F>,
) -> io::Result<()> {
    writeln!(out, "samples       {}", r.total)?;
    writeln!(out, "correct       {}", r.correct)?;
    writeln!(out, "accuracy      {:.2}%", 100.0 * r.accuracy)?;
    if let Some(tail) = r.trailing_accuracy(r.total.min(10_000)) {
        writeln!(out, "last {:<8} {:.2}%", r.total.min(10_000), 100.0 * tail)?;
    }
    writeln!(
        out,
        "train time    {:.3} ms",
        r.train_time.as_secs_f64() * 1e3
    )?;
    writeln!(
        out,
        "infer time    {:.3} ms",
        r.infer_time.as_secs_f64() * 1e3
    )?;
    if r.total > 0 {
        writeln!(out, "throughput    {:.0} samples/s", r.train_throughput())?;
    }
    writeln!(
        out,
        "nodes         {} ({} leaves, depth {})",
        r.final_node_count,
        tree.leaf_count(),
        tree.depth()
    )?;
    writeln!(out, "model bytes   {}", r.model_bytes)
}

pub fn process(args: &ProcessArgs) -> Result<()> {
    if args.bundle_size == 0 {
        return Err(usage("--bundle-size must be positive"));
    }
    match snapshot_precision(&args.snapshot_in)? {
        Precision::F32 => process_as::<f32>(args),
        Precision::F64 => process_as::<f64>(args),
    }
}

fn process_as<F: Scalar>(args: &ProcessArgs) -> Result<()> {
    let mut tree = load_tree::<F>(&args.snapshot_in)?;
    let path = args.csv.csv.as_ref().expect("checked by caller");
    let ds = load_csv::<F>(path, &args.csv.schema()?)
        .with_context(|| format!("reading {}", path.display()))?;
    let train = args.mode == Mode::Train;

    let mut predictions = Vec::with_capacity(ds.samples.len());
    for chunk in ds.samples.chunks(args.bundle_size) {
        let bundle = Bundle::from_samples(
            chunk
                .iter()
                .map(|s| Sample { train, ..s.clone() })
                .collect(),
        );
        predictions.extend(process_bundle(&mut tree, &bundle)?);
    }

    let sink: Box<dyn Write> = match &args.out {
        Some(p) => {
            Box::new(fs::File::create(p).with_context(|| format!("writing {}", p.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    for p in predictions {
        writeln!(sink, "{p}")?;
    }
    sink.flush()?;
    if let Some(path) = &args.snapshot_out {
        save_tree(&tree, path)?;
    }
    Ok(())
}

pub fn mem(args: &MemArgs) -> Result<()> {
    match args.precision {
        Precision::F32 => mem_as::<f32>(args),
        Precision::F64 => mem_as::<f64>(args),
    }
}

fn mem_as<F: Scalar>(args: &MemArgs) -> Result<()> {
    let mut grid = MemGrid::<F>::default();
    if !args.max_nodes.is_empty() {
        grid.max_nodes = args.max_nodes.clone();
    }
    grid.dims = args.dims.clone();
    grid.classes = args.classes.clone();
    grid.n_quantiles = args.n_quantiles;
    let all = grid.max_nodes.iter().chain(&grid.dims).chain(&grid.classes);
    if all.copied().chain([grid.n_quantiles]).any(|v| v == 0) {
        return Err(usage("grid values must be positive"));
    }
    let rows = mem_report(&grid);

    let mut out = io::stdout().lock();
    match args.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "max_nodes,dims,classes,bytes")?;
            for r in &rows {
                writeln!(out, "{},{},{},{}", r.max_nodes, r.dims, r.classes, r.bytes)?;
            }
        }
        Format::Table => {
            writeln!(
                out,
                "{:>9} {:>5} {:>7} {:>12}",
                "max_nodes", "dims", "classes", "bytes"
            )?;
            for r in &rows {
                writeln!(
                    out,
                    "{:>9} {:>5} {:>7} {:>12}",
                    r.max_nodes, r.dims, r.classes, r.bytes
                )?;
            }
        }
    }
    Ok(())
}

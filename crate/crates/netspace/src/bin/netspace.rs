//! Command-line front end: net averages, net-space norms, block
//! decompositions, K-functional curves and verification campaigns over
//! CSV grid files.
//!
//! Exit codes: 0 success (and, for `verify`, all checks passed);
//! 1 verification failure; 2 invalid arguments or unsupported
//! parameters; 3 I/O or parse errors.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use netspace::{
    build_k_curve, build_net_average_table, decompose, check_zero_means, interpolation_functional,
    load_grid_csv, norm_from_table, run_campaign, save_grid_csv, Error, Exponents2D, GridFamily,
    InterpParams, CampaignConfig, QIndex, QuadratureSpec, Result, Tau,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "netspace",
    version,
    about = "Net-space numerics over CSV grids",
    after_help = "Exit codes: 0 success, 1 verification failure, \
                  2 invalid arguments, 3 I/O or parse errors."
)]
struct Cli {
    /// Worker threads (default: all cores; env NETSPACE_WORKERS).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct QuadArgs {
    /// Quadrature points per octave.
    #[arg(long, default_value_t = 8)]
    points_per_octave: usize,
    /// Start the numeric integration at this many cells.
    #[arg(long, default_value_t = 1.0)]
    t_min_cells: f64,
    /// Integrate numerically up to this multiple of the extent.
    #[arg(long, default_value_t = 4.0)]
    t_max_factor: f64,
}

impl QuadArgs {
    fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            points_per_octave: self.points_per_octave,
            t_min_cells: self.t_min_cells,
            t_max_factor: self.t_max_factor,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the net-averaging function over a dyadic threshold lattice.
    Avg {
        /// Input grid CSV.
        input: PathBuf,
        /// Output CSV path for the query matrix.
        #[arg(long)]
        out: PathBuf,
        /// Smallest threshold in cells.
        #[arg(long, default_value_t = 1.0)]
        t_min_cells: f64,
        /// Largest threshold as a multiple of the extent.
        #[arg(long, default_value_t = 4.0)]
        t_max_factor: f64,
        /// Lattice points per octave.
        #[arg(long, default_value_t = 1)]
        points_per_octave: usize,
    },
    /// Compute the anisotropic net-space norm of a grid.
    Norm {
        input: PathBuf,
        /// Primary exponents, e.g. --p 2,2
        #[arg(long, value_parser = parse_pair_f64)]
        p: (f64, f64),
        /// Secondary exponents, e.g. --q 1,inf
        #[arg(long, value_parser = parse_pair_q)]
        q: (QIndex, QIndex),
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Split a grid into the four block-decomposition components.
    Decompose {
        input: PathBuf,
        /// Block size in cells, e.g. --tau 4,2
        #[arg(long, value_parser = parse_pair_usize)]
        tau: (usize, usize),
        /// Output prefix; writes <prefix>_00.csv .. <prefix>_11.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// K-functional curve, interpolation functional and embedding ratio.
    Kfunc {
        input: PathBuf,
        #[arg(long, value_parser = parse_pair_f64)]
        p0: (f64, f64),
        #[arg(long, value_parser = parse_pair_f64)]
        p1: (f64, f64),
        #[arg(long, value_parser = parse_pair_f64)]
        theta: (f64, f64),
        #[arg(long, value_parser = parse_pair_q)]
        q: (QIndex, QIndex),
        /// Optional CSV path for the sampled K curve.
        #[arg(long)]
        curve_out: Option<PathBuf>,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Run the randomized verification campaign.
    Verify {
        /// Optional key=value config file (flags win over file entries).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated seed list or a count shorthand like 0..100.
        #[arg(long)]
        seeds: Option<String>,
        /// Comma-separated grid resolutions.
        #[arg(long)]
        resolutions: Option<String>,
        /// Comma-separated generator families.
        #[arg(long)]
        families: Option<String>,
        /// Report output path (default: stdout only).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        quad: QuadArgs,
    },
}

fn parse_pair<T: FromStr>(s: &str, what: &str) -> std::result::Result<(T, T), String> {
    let mut it = s.split(',');
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => {
            let a = a.trim().parse::<T>().map_err(|_| format!("bad {what}: '{s}'"))?;
            let b = b.trim().parse::<T>().map_err(|_| format!("bad {what}: '{s}'"))?;
            Ok((a, b))
        }
        _ => Err(format!("expected two comma-separated values, got '{s}'")),
    }
}

fn parse_pair_f64(s: &str) -> std::result::Result<(f64, f64), String> {
    parse_pair::<f64>(s, "number pair")
}
fn parse_pair_usize(s: &str) -> std::result::Result<(usize, usize), String> {
    parse_pair::<usize>(s, "integer pair")
}
fn parse_pair_q(s: &str) -> std::result::Result<(QIndex, QIndex), String> {
    parse_pair::<QIndex>(s, "q pair")
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>>
where
    <T as FromStr>::Err: std::fmt::Display,
{
    if let Some((a, b)) = s.split_once("..") {
        // numeric range shorthand for seeds
        if let (Ok(a), Ok(b)) = (a.trim().parse::<u64>(), b.trim().parse::<u64>()) {
            return (a..b)
                .map(|v| {
                    v.to_string()
                        .parse::<T>()
                        .map_err(|e| Error::InvalidArgument(e.to_string()))
                })
                .collect();
        }
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|e| Error::InvalidArgument(format!("bad list entry '{p}': {e}")))
        })
        .collect()
}

fn provenance(args: &str) -> String {
    format!("netspace v{VERSION} | {args}")
}

fn dyadic_lattice(lo: f64, hi: f64, ppo: usize) -> Vec<f64> {
    let mut ts = vec![lo];
    let ratio = 2.0f64.powf(1.0 / ppo.max(1) as f64);
    let mut t = lo;
    while t * ratio <= hi * (1.0 + 1e-12) {
        t *= ratio;
        ts.push(t);
    }
    ts
}

fn cmd_avg(
    input: &PathBuf,
    out: &PathBuf,
    t_min_cells: f64,
    t_max_factor: f64,
    ppo: usize,
) -> Result<()> {
    if !(t_min_cells > 0.0) || !(t_max_factor >= 1.0) || ppo == 0 {
        return Err(Error::InvalidArgument(
            "need t_min_cells > 0, t_max_factor >= 1, points_per_octave >= 1".into(),
        ));
    }
    let f = load_grid_csv(input)?;
    let tbl = build_net_average_table(&f);
    let (h1, h2) = f.cells();
    let (l1, l2) = f.extents();
    let t1s = dyadic_lattice(t_min_cells * h1, t_max_factor * l1, ppo);
    let t2s = dyadic_lattice(t_min_cells * h2, t_max_factor * l2, ppo);
    let mut text = String::new();
    text.push_str(&format!(
        "# {}\n# rows: t1, columns: t2\n",
        provenance(&format!(
            "avg --t-min-cells {t_min_cells} --t-max-factor {t_max_factor} \
             --points-per-octave {ppo} {}",
            input.display()
        ))
    ));
    text.push_str(&format!(
        "t1\\t2,{}\n",
        t2s.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
    ));
    for &t1 in &t1s {
        let row: Vec<String> = t2s
            .iter()
            .map(|&t2| tbl.query(t1, t2).map(|v| v.to_string()))
            .collect::<Result<_>>()?;
        text.push_str(&format!("{t1},{}\n", row.join(",")));
    }
    std::fs::write(out, text)?;
    println!("wrote {} x {} query matrix to {}", t1s.len(), t2s.len(), out.display());
    Ok(())
}

fn cmd_norm(input: &PathBuf, p: (f64, f64), q: (QIndex, QIndex), spec: &QuadratureSpec) -> Result<()> {
    let f = load_grid_csv(input)?;
    let e = Exponents2D::new(p, q)?;
    let b = netspace::net_norm_2d_breakdown(&f, e, spec)?;
    println!(
        "# {}",
        provenance(&format!("norm --p {},{} --q {},{} {}", p.0, p.1, q.0, q.1, input.display()))
    );
    println!("head\t{:.12e}", b.head);
    println!("body\t{:.12e}", b.body);
    println!("tail\t{:.12e}", b.tail);
    println!("norm\t{:.12e}", b.value);
    Ok(())
}

fn cmd_decompose(input: &PathBuf, tau_cells: (usize, usize), out: &PathBuf) -> Result<()> {
    let f = load_grid_csv(input)?;
    let tau = Tau::from_cells(tau_cells.0, tau_cells.1)?;
    let d = decompose(&f, tau);
    let header = provenance(&format!(
        "decompose --tau {},{} {}",
        tau_cells.0,
        tau_cells.1,
        input.display()
    ));
    let stem = out.to_string_lossy();
    for (suffix, g) in [("00", &d.f00), ("01", &d.f01), ("10", &d.f10), ("11", &d.f11)] {
        let path = format!("{stem}_{suffix}.csv");
        save_grid_csv(&path, g, &[header.clone()])?;
        println!("wrote {path}");
    }
    let zm = check_zero_means(&d);
    println!("zero-mean max violations:");
    println!("  f00 over x1 strips\t{:.3e}", zm.f00_x1);
    println!("  f01 over x1 strips\t{:.3e}", zm.f01_x1);
    println!("  f00 over x2 strips\t{:.3e}", zm.f00_x2);
    println!("  f10 over x2 strips\t{:.3e}", zm.f10_x2);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_kfunc(
    input: &PathBuf,
    p0: (f64, f64),
    p1: (f64, f64),
    theta: (f64, f64),
    q: (QIndex, QIndex),
    curve_out: Option<&PathBuf>,
    spec: &QuadratureSpec,
) -> Result<()> {
    let f = load_grid_csv(input)?;
    let params = InterpParams::new(p0, p1, theta, q)?;
    let curve = build_k_curve(&f, &params, spec)?;
    let header = provenance(&format!(
        "kfunc --p0 {},{} --p1 {},{} --theta {},{} --q {},{} {}",
        p0.0, p0.1, p1.0, p1.1, theta.0, theta.1, q.0, q.1, input.display()
    ));
    if let Some(path) = curve_out {
        let mut text = format!("# {header}\nt1,t2,k_upper\n");
        for (i, &t1) in curve.t1s.iter().enumerate() {
            for (j, &t2) in curve.t2s.iter().enumerate() {
                text.push_str(&format!("{t1},{t2},{}\n", curve.sample(i, j)));
            }
        }
        std::fs::write(path, text)?;
        println!("wrote K curve to {}", path.display());
    }
    let fk = interpolation_functional(&curve, spec)?;
    let norm = norm_from_table(&build_net_average_table(&f), params.derived_exponents()?, spec)?;
    println!("# {header}");
    println!("F(K)\t{fk:.12e}");
    println!("norm\t{norm:.12e}");
    if norm > 0.0 {
        println!("ratio\t{:.12e}", fk / norm);
    } else {
        println!("ratio\tundefined");
    }
    Ok(())
}

fn apply_config_file(path: &PathBuf, cfg: &mut CampaignConfig) -> Result<()> {
    let text = std::fs::read_to_string(path)?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: lineno + 1,
            msg: format!("expected key=value, got '{line}'"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "seeds" => cfg.seeds = parse_list(value)?,
            "resolutions" => cfg.resolutions = parse_list(value)?,
            "families" => cfg.families = parse_list(value)?,
            "t_per_regime" => {
                cfg.t_per_regime = value
                    .parse()
                    .map_err(|_| Error::Parse { line: lineno + 1, msg: "bad t_per_regime".into() })?
            }
            "max_resolution" => {
                cfg.max_resolution = value
                    .parse()
                    .map_err(|_| Error::Parse { line: lineno + 1, msg: "bad max_resolution".into() })?
            }
            "tau_choices" => {
                cfg.tau_choices = value
                    .split(';')
                    .map(|pair| {
                        parse_pair_usize(pair.trim())
                            .map_err(|msg| Error::Parse { line: lineno + 1, msg })
                    })
                    .collect::<Result<_>>()?
            }
            other => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("unknown config key '{other}'"),
                })
            }
        }
    }
    Ok(())
}

fn cmd_verify(
    config: Option<&PathBuf>,
    seeds: Option<&str>,
    resolutions: Option<&str>,
    families: Option<&str>,
    out: Option<&PathBuf>,
    spec: &QuadratureSpec,
) -> Result<bool> {
    let mut cfg = CampaignConfig::default();
    if let Some(path) = config {
        apply_config_file(path, &mut cfg)?;
    }
    // flags win over the config file
    if let Some(s) = seeds {
        cfg.seeds = parse_list(s)?;
    }
    if let Some(s) = resolutions {
        cfg.resolutions = parse_list(s)?;
    }
    if let Some(s) = families {
        cfg.families = parse_list::<GridFamily>(s)?;
    }
    let report = run_campaign(&cfg, spec)?;
    let header = provenance(&format!(
        "verify --seeds [{} values] --resolutions {:?} --families {:?}",
        cfg.seeds.len(),
        cfg.resolutions,
        cfg.families.iter().map(|f| f.name()).collect::<Vec<_>>()
    ));
    let text = format!("# {header}\n{}", report.to_text());
    if let Some(path) = out {
        std::fs::write(path, &text)?;
    }
    print!("{text}");
    Ok(report.all_pass())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Avg { input, out, t_min_cells, t_max_factor, points_per_octave } => {
            cmd_avg(input, out, *t_min_cells, *t_max_factor, *points_per_octave)?;
            Ok(true)
        }
        Command::Norm { input, p, q, quad } => {
            cmd_norm(input, *p, *q, &quad.spec())?;
            Ok(true)
        }
        Command::Decompose { input, tau, out } => {
            cmd_decompose(input, *tau, out)?;
            Ok(true)
        }
        Command::Kfunc { input, p0, p1, theta, q, curve_out, quad } => {
            cmd_kfunc(input, *p0, *p1, *theta, *q, curve_out.as_ref(), &quad.spec())?;
            Ok(true)
        }
        Command::Verify { config, seeds, resolutions, families, out, quad } => cmd_verify(
            config.as_ref(),
            seeds.as_deref(),
            resolutions.as_deref(),
            families.as_deref(),
            out.as_ref(),
            &quad.spec(),
        ),
    }
}

fn main() {
    let cli = Cli::parse();
    let workers = cli.workers.or_else(|| {
        std::env::var("NETSPACE_WORKERS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(n) = workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: could not configure {n} workers: {e}");
            std::process::exit(2);
        }
    }
    match run(&cli) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Io(_) | Error::Parse { .. } => 3,
                _ => 2,
            };
            std::process::exit(code);
        }
    }
}

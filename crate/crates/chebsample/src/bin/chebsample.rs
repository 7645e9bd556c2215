//! Command-line front end: draw samples from an expression density, run the
//! benchmark suite, sweep evaluation counts, or render histograms.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chebsample::bench::{
    evalcount_sweep, histogram, histogram_svg, read_samples_1d, run_density, suite_densities,
    BenchRecord,
};
use chebsample::cheb::{Interval, DEFAULT_TOL};
use chebsample::density::Arity;
use chebsample::error::Error;
use chebsample::expr::{compile, parse};
use chebsample::lowrank::Domain2D;
use chebsample::quad::integrate_split;
use chebsample::rejection::{rejection_sample_1d, rejection_sample_2d};
use chebsample::rng::UniformSource;
use chebsample::sampler1d::{cdf_from_density, sample_1d_from_cdf, DEFAULT_TOL_X};
use chebsample::sampler2d::{build_session, sample_2d, Sampler2DSession};

#[derive(Parser)]
#[command(name = "chebsample", about = "Inverse transform sampling from black-box smooth densities", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DomainArgs {
    /// Density expression in x (and optionally y)
    #[arg(long)]
    expr: String,
    /// x-domain bounds: --x a b
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    x: Vec<f64>,
    /// y-domain bounds for bivariate densities: --y c d
    #[arg(long, num_args = 2, value_names = ["C", "D"], allow_negative_numbers = true)]
    y: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples and write them as CSV
    Sample {
        #[command(flatten)]
        domain: DomainArgs,
        /// Number of samples
        #[arg(short = 'n', long = "num", default_value_t = 1000)]
        num: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative construction tolerance
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// its = inverse transform, rs = rejection with a rectangular hat
        #[arg(long, default_value = "its")]
        method: String,
        /// Shard sampling across this many worker threads by seed partitioning
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the benchmark suite (timings, eval counts, goodness-of-fit)
    Bench {
        /// 1d, 2d, or all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(short = 'n', long = "num", default_value_t = 10_000)]
        num: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Density evaluation counts as a function of sample count
    Evalcount {
        #[command(flatten)]
        domain: DomainArgs,
        /// Comma-separated sample counts
        #[arg(long, default_value = "10,100,1000")]
        ns: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Histogram a samples CSV into CSV or SVG
    Hist {
        /// Input samples CSV
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        /// Optional density expression to overlay (expected counts per bin)
        #[arg(long)]
        expr: Option<String>,
        /// x-domain for the overlay normalization
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        x: Option<Vec<f64>>,
        /// Output path; .svg renders a chart, anything else writes CSV
        #[arg(long)]
        out: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Syntax { .. } | Error::UnknownIdentifier { .. } | Error::EmptyInput(_) => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Sample {
            domain,
            num,
            seed,
            tol,
            method,
            jobs,
            out,
        } => cmd_sample(domain, num, seed, tol, &method, jobs, out),
        Command::Bench {
            suite,
            num,
            seed,
            tol,
            out,
        } => cmd_bench(&suite, num, seed, tol, out),
        Command::Evalcount {
            domain,
            ns,
            seed,
            tol,
            out,
        } => cmd_evalcount(domain, &ns, seed, tol, out),
        Command::Hist {
            input,
            bins,
            expr,
            x,
            out,
        } => cmd_hist(&input, bins, expr, x, &out),
    }
}

fn parse_interval(bounds: &[f64]) -> Result<Interval, Error> {
    Interval::new(bounds[0], bounds[1])
}

/// Split `n` across `jobs` shards; shard k samples with seed `seed + k`.
fn shard_sizes(n: usize, jobs: usize) -> Vec<usize> {
    let jobs = jobs.max(1);
    let base = n / jobs;
    let extra = n % jobs;
    (0..jobs)
        .map(|k| base + usize::from(k < extra))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    domain: DomainArgs,
    num: usize,
    seed: u64,
    tol: f64,
    method: &str,
    jobs: usize,
    out: Option<String>,
) -> Result<ExitCode, Error> {
    if domain.x.len() != 2 {
        return Err(Error::EmptyInput("--x requires two bounds".into()));
    }
    let tree = parse(&domain.expr)?;
    let x_iv = parse_interval(&domain.x)?;
    let y_iv = match &domain.y {
        Some(b) => Some(parse_interval(b)?),
        None => None,
    };
    if tree.arity() == Arity::Two && y_iv.is_none() {
        return Err(Error::EmptyInput(
            "expression uses `y`; pass --y c d".into(),
        ));
    }

    let mut csv = Vec::new();
    let summary;
    match tree.arity() {
        Arity::One => {
            let f = compile(&tree, x_iv, None)?;
            match method {
                "rs" => {
                    let hat_series = chebsample::cheb::adaptive_fit(
                        |x| tree.eval(x, f64::NAN),
                        x_iv,
                        tol,
                        chebsample::cheb::MAX_GRID_LOG2,
                    )?;
                    let hat = chebsample::bench::hat_height_1d(&hat_series);
                    let mut rng = UniformSource::new(seed);
                    let (batch, stats) = rejection_sample_1d(&f, x_iv, num, hat, &mut rng)?;
                    summary = format!(
                        "rejection: hat {hat:.6e}, acceptance {:.4}, {} density evals",
                        stats.acceptance_ratio(),
                        stats.density_evals
                    );
                    batch.write_csv(&mut csv).unwrap();
                }
                _ => {
                    let cdf = cdf_from_density(&f, x_iv, tol)?;
                    summary = format!(
                        "cdf degree {}, total mass {:.12e}, {} density evals",
                        cdf.series().degree(),
                        cdf.total_mass(),
                        f.eval_count()
                    );
                    let sizes = shard_sizes(num, jobs);
                    let shards: Vec<Vec<f64>> = std::thread::scope(|scope| {
                        let handles: Vec<_> = sizes
                            .iter()
                            .enumerate()
                            .map(|(k, &sz)| {
                                let cdf = &cdf;
                                scope.spawn(move || {
                                    let mut rng = UniformSource::new(seed.wrapping_add(k as u64));
                                    sample_1d_from_cdf(cdf, sz, &mut rng, DEFAULT_TOL_X).points
                                })
                            })
                            .collect();
                        handles.into_iter().map(|h| h.join().unwrap()).collect()
                    });
                    writeln!(csv, "# seed={seed}").unwrap();
                    writeln!(csv, "x").unwrap();
                    for shard in shards {
                        for x in shard {
                            writeln!(csv, "{x}").unwrap();
                        }
                    }
                }
            }
        }
        Arity::Two => {
            let y_iv = y_iv.unwrap();
            let dom = Domain2D::new(x_iv, y_iv);
            let f = compile(&tree, x_iv, Some(y_iv))?;
            match method {
                "rs" => {
                    let session = build_session(&f, dom, tol)?;
                    let hat = chebsample::bench::hat_height_2d(session.low_rank());
                    let f2 = compile(&tree, x_iv, Some(y_iv))?;
                    let mut rng = UniformSource::new(seed);
                    let (batch, stats) = rejection_sample_2d(&f2, dom, num, hat, &mut rng)?;
                    summary = format!(
                        "rejection: hat {hat:.6e}, acceptance {:.4}, {} density evals",
                        stats.acceptance_ratio(),
                        stats.density_evals
                    );
                    batch.write_csv(&mut csv).unwrap();
                }
                _ => {
                    let session = build_session(&f, dom, tol)?;
                    summary = format!(
                        "rank {}, marginal cdf degree {}, total mass {:.12e}, {} density evals",
                        session.low_rank().rank(),
                        session.marginal_cdf().series().degree(),
                        session.marginal_cdf().total_mass(),
                        f.eval_count()
                    );
                    let sizes = shard_sizes(num, jobs);
                    let shards: Vec<Vec<(f64, f64)>> = std::thread::scope(|scope| {
                        let handles: Vec<_> = sizes
                            .iter()
                            .enumerate()
                            .map(|(k, &sz)| {
                                let session: &Sampler2DSession = &session;
                                scope.spawn(move || {
                                    let mut rng = UniformSource::new(seed.wrapping_add(k as u64));
                                    sample_2d(session, sz, &mut rng, DEFAULT_TOL_X)
                                        .map(|b| b.points)
                                })
                            })
                            .collect();
                        handles
                            .into_iter()
                            .map(|h| h.join().unwrap())
                            .collect::<Result<_, _>>()
                    })?;
                    writeln!(csv, "# seed={seed}").unwrap();
                    writeln!(csv, "x,y").unwrap();
                    for shard in shards {
                        for (x, y) in shard {
                            writeln!(csv, "{x},{y}").unwrap();
                        }
                    }
                }
            }
        }
    }

    match out {
        Some(path) => {
            fs::write(&path, &csv).map_err(|e| Error::EmptyInput(format!("write {path}: {e}")))?;
            println!("{summary}");
            println!("wrote {num} samples to {path}");
        }
        None => {
            eprintln!("{summary}");
            print!("{}", String::from_utf8(csv).unwrap());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(
    suite: &str,
    num: usize,
    seed: u64,
    tol: f64,
    out: Option<String>,
) -> Result<ExitCode, Error> {
    let densities: Vec<_> = suite_densities()
        .into_iter()
        .filter(|d| match suite {
            "1d" => d.y.is_none(),
            "2d" => d.y.is_some(),
            _ => true,
        })
        .collect();
    if densities.is_empty() {
        return Err(Error::EmptyInput(format!("unknown suite `{suite}`")));
    }
    let mut rows = vec![BenchRecord::csv_header().to_string()];
    let mut any_gof_failure = false;
    let mut any_error = false;
    println!("{}", BenchRecord::csv_header());
    for d in &densities {
        match run_density(d, num, seed, tol) {
            Ok(records) => {
                for r in records {
                    any_gof_failure |= !r.gof.pass;
                    let line = r.csv_row();
                    println!("{line}");
                    rows.push(line);
                }
            }
            Err(e) => {
                any_error = true;
                eprintln!("{}: {e}", d.label);
                rows.push(format!("{},ERROR,,,,,,,,", d.label));
            }
        }
    }
    if let Some(path) = out {
        fs::write(&path, rows.join("\n") + "\n")
            .map_err(|e| Error::EmptyInput(format!("write {path}: {e}")))?;
    }
    if any_error {
        Ok(ExitCode::from(3))
    } else if any_gof_failure {
        Ok(ExitCode::from(4))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_evalcount(
    domain: DomainArgs,
    ns: &str,
    seed: u64,
    tol: f64,
    out: Option<String>,
) -> Result<ExitCode, Error> {
    if domain.x.len() != 2 {
        return Err(Error::EmptyInput("--x requires two bounds".into()));
    }
    let tree = parse(&domain.expr)?;
    if tree.arity() == Arity::Two {
        return Err(Error::EmptyInput(
            "evalcount supports univariate densities".into(),
        ));
    }
    let x_iv = parse_interval(&domain.x)?;
    let counts: Vec<usize> = ns
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::EmptyInput(format!("bad sample count `{s}`")))
        })
        .collect::<Result<_, _>>()?;
    let rows = evalcount_sweep(&tree, x_iv, &counts, seed, tol)?;
    let mut text = String::from("n,evals_its,evals_rs\n");
    for r in &rows {
        text.push_str(&format!("{},{},{}\n", r.n, r.evals_its, r.evals_rs));
    }
    match out {
        Some(path) => fs::write(&path, &text)
            .map_err(|e| Error::EmptyInput(format!("write {path}: {e}")))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_hist(
    input: &str,
    bins: usize,
    expr: Option<String>,
    x: Option<Vec<f64>>,
    out: &str,
) -> Result<ExitCode, Error> {
    let text = fs::read_to_string(input)
        .map_err(|e| Error::EmptyInput(format!("read {input}: {e}")))?;
    let samples = read_samples_1d(&text)?;
    let h = histogram(&samples, bins)?;

    // Optional overlay: expected count per bin from the normalized density.
    let overlay: Option<Vec<f64>> = match (expr, x) {
        (Some(src), Some(bounds)) if bounds.len() == 2 => {
            let tree = parse(&src)?;
            let g = move |t: f64| tree.eval(t, f64::NAN);
            let mass = integrate_split(&g, bounds[0], bounds[1], 64, 1e-12);
            let n = samples.len() as f64;
            let width = h.edges[1] - h.edges[0];
            Some(
                h.bin_centers()
                    .iter()
                    .map(|&c| g(c) / mass * n * width)
                    .collect(),
            )
        }
        _ => None,
    };

    if out.ends_with(".svg") {
        let svg = histogram_svg(&h, overlay.as_deref());
        fs::write(out, svg).map_err(|e| Error::EmptyInput(format!("write {out}: {e}")))?;
    } else {
        let mut text = String::from(if overlay.is_some() {
            "bin_lo,bin_hi,count,expected\n"
        } else {
            "bin_lo,bin_hi,count\n"
        });
        for i in 0..h.counts.len() {
            match &overlay {
                Some(o) => text.push_str(&format!(
                    "{},{},{},{}\n",
                    h.edges[i],
                    h.edges[i + 1],
                    h.counts[i],
                    o[i]
                )),
                None => text.push_str(&format!(
                    "{},{},{}\n",
                    h.edges[i],
                    h.edges[i + 1],
                    h.counts[i]
                )),
            }
        }
        fs::write(out, text).map_err(|e| Error::EmptyInput(format!("write {out}: {e}")))?;
    }
    println!("histogram of {} samples into {bins} bins -> {out}", samples.len());
    Ok(ExitCode::SUCCESS)
}

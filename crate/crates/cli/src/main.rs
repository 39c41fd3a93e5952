//! `syzkit`: builds nilmanifold fixtures, transforms forms, verifies SU(n)
//! systems and runs cohomology and randomized campaigns. Every command
//! prints a human summary to stdout and can write the full JSON report with
//! `--report`. Exit status is 0 iff every check passes, 1 if a check fails
//! and 2 on usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use syzkit::campaign;
use syzkit::cohomology::{mirror_compare, FiniteComplex};
use syzkit::error::Error;
use syzkit::exterior::GenClass;
use syzkit::fourier::{fm_backward, fm_forward, involution_sign, leg_counts, SemiflatPair};
use syzkit::json::{form_from_value, form_to_value, su_from_fixture, su_to_fixture, to_pretty};
use syzkit::nilmanifold::{build_iia_side, build_iib_side, check_family, NilData};
use syzkit::report::Report;
use syzkit::sustruct::{check_iia, check_iib, flux_constant};
use syzkit::{Form, Scalar, Q};

const MAX_K_VAR: &str = "SYZKIT_MAX_K";
const MAX_D_VAR: &str = "SYZKIT_MAX_D";

#[derive(Parser)]
#[command(name = "syzkit", version, about = "Exact exterior calculus for semi-flat mirror pairs")]
struct Cli {
    /// Write the full JSON report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the nilmanifold pair for K, write both fixtures and check everything.
    Nil {
        #[arg(long = "K", short = 'K', value_parser = at_least_two)]
        k: usize,
        /// Directory receiving `iib_K<k>.json` and `iia_K<k>.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Transform a form between the two sides of the standard pair.
    Fm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(long, value_parser = dimension::<6>)]
        n: usize,
        /// Write the transformed form here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a fixture against the Type IIA or Type IIB conditions.
    Verify {
        #[arg(long, value_enum)]
        system: System,
        #[arg(long)]
        input: PathBuf,
    },
    /// Bott-Chern / Tseng-Yau dimensions and their comparison.
    Cohomology {
        /// Nilmanifold member.
        #[arg(long = "K", short = 'K', value_parser = at_least_two, conflicts_with = "flat", required_unless_present = "flat")]
        k: Option<usize>,
        /// Flat pair of this dimension.
        #[arg(long, value_parser = dimension::<4>)]
        flat: Option<usize>,
        #[arg(long, value_enum)]
        which: Which,
        /// Side of the pair; must agree with `--which` when given.
        #[arg(long, value_enum)]
        side: Option<Side>,
        #[arg(long, requires = "q")]
        p: Option<usize>,
        #[arg(long, requires = "p")]
        q: Option<usize>,
        /// Coefficient degree bound.
        #[arg(long, default_value_t = 0)]
        degree: u32,
        /// Coefficient model; defaults to `constant` for `--flat` and `polynomial` for `--K`.
        #[arg(long, value_enum)]
        model: Option<Model>,
    },
    /// Randomized campaign over one suite.
    Proptest {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(campaign::SUITES))]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Fwd,
    Back,
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    Iia,
    Iib,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Bc,
    Ty,
    Mirror,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    X,
    Xcheck,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    /// Constant coefficients in coordinates.
    Constant,
    /// Polynomial coefficients of degree ≤ D in coordinates.
    Polynomial,
    /// Polynomial coefficients, restricted to lattice-invariant forms.
    Invariant,
    /// The invariant frame; constant coefficients unless `--degree` > 0.
    Frame,
}

fn at_least_two(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(k) if k >= 2 => Ok(k),
        Ok(k) => Err(format!("K must be at least 2, got {k}")),
        Err(e) => Err(e.to_string()),
    }
}

fn dimension<const MAX: usize>(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if (1..=MAX).contains(&n) => Ok(n),
        Ok(n) => Err(format!("expected 1..={MAX}, got {n}")),
        Err(e) => Err(e.to_string()),
    }
}

fn cap(var: &str, default: usize) -> anyhow::Result<usize> {
    match std::env::var(var) {
        Ok(v) => v.parse().with_context(|| format!("{var} must be a non-negative integer, got `{v}`")),
        Err(_) => Ok(default),
    }
}

fn check_k(k: usize) -> anyhow::Result<()> {
    let max = cap(MAX_K_VAR, 5)?;
    if k > max {
        bail!("K = {k} exceeds the cap {max}; raise {MAX_K_VAR} to allow it");
    }
    Ok(())
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_nil(k: usize, out: &Path) -> anyhow::Result<Report> {
    check_k(k)?;
    let nd = NilData::build(k)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let b = build_iib_side(&nd);
    let a = build_iia_side(&nd)?;
    let iib = out.join(format!("iib_K{k}.json"));
    let iia = out.join(format!("iia_K{k}.json"));
    write_file(&iib, &to_pretty(&su_to_fixture(&b, nd.pair())?))?;
    write_file(&iia, &to_pretty(&su_to_fixture(&a, nd.pair())?))?;
    let mut r = check_family(&nd)?;
    r.data("flux_constant", flux_constant(nd.n()).render());
    r.data("fixtures", json!([iib.display().to_string(), iia.display().to_string()]));
    Ok(r)
}

/// Bidegrees `(holomorphic, antiholomorphic)` of the terms of a `dz`-frame form.
fn complex_bidegrees(a: &Form) -> Vec<(usize, usize)> {
    let f = a.frame();
    let (h, ah) = (f.class_mask(GenClass::Holomorphic), f.class_mask(GenClass::AntiHolomorphic));
    let mut out: Vec<(usize, usize)> =
        a.terms().keys().map(|m| ((m & h).count_ones() as usize, (m & ah).count_ones() as usize)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn cmd_fm(input: &Path, direction: Direction, n: usize, output: Option<&Path>) -> anyhow::Result<(Report, Option<String>)> {
    let pair = SemiflatPair::<Q>::standard(n)?;
    let v = read_json(input)?;
    let mut r = Report::new("Fourier-Mukai transform");
    r.config("n", n);
    let (a, out, back) = match direction {
        Direction::Fwd => {
            r.config("direction", "fwd");
            let a = form_from_value(&v, &[pair.complex().frame(), pair.xcheck()])?;
            let a = if a.frame().same_as(pair.complex().frame()) { a } else { pair.complex().to_complex(&a)? };
            let out = fm_forward(&a, &pair)?;
            let expected: Vec<(usize, usize)> = complex_bidegrees(&a).into_iter().map(|(p, q)| (n - p, q)).collect();
            let legs: Vec<(usize, usize)> = leg_counts(&out).into_iter().collect();
            let ok = legs.iter().all(|l| expected.contains(l));
            r.check("fm.leg_count", ok, "(p,q) forms map to n−p fiber legs and q base legs", || format!("legs {legs:?}"));
            let back = fm_backward(&out, &pair)?;
            (a, out, back)
        }
        Direction::Back => {
            r.config("direction", "back");
            let a = form_from_value(&v, &[pair.x()])?;
            let out = fm_backward(&a, &pair)?;
            let expected: Vec<(usize, usize)> = leg_counts(&a).into_iter().map(|(f, b)| (n - f, b)).collect();
            let got = complex_bidegrees(&out);
            let ok = got.iter().all(|g| expected.contains(g));
            r.check("fm.leg_count", ok, "k fiber legs and q base legs map to bidegree (n−k, q)", || format!("bidegrees {got:?}"));
            let back = fm_forward(&out, &pair)?;
            (a, out, back)
        }
    };
    let sign = involution_sign::<Q>(n);
    let defect = &back - &a.scale(&sign);
    r.check("fm.round_trip", defect.is_zero(), format!("transforming twice gives {} times the input", sign.render()), || {
        defect.to_string()
    });
    r.data("output", form_to_value(&out));
    let text = to_pretty(&form_to_value(&out));
    match output {
        Some(path) => {
            write_file(path, &text)?;
            Ok((r, None))
        }
        None => Ok((r, Some(text))),
    }
}

fn cmd_verify(system: System, input: &Path) -> anyhow::Result<Report> {
    let (s, _pair) = su_from_fixture(&read_json(input)?)?;
    let mut r = match system {
        System::Iia => check_iia(&s)?,
        System::Iib => check_iib(&s)?,
    };
    r.config("input", input.display().to_string());
    Ok(r)
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

struct CohomologyArgs {
    k: Option<usize>,
    flat: Option<usize>,
    which: Which,
    side: Option<Side>,
    bidegree: Option<(usize, usize)>,
    degree: u32,
    model: Option<Model>,
}

fn cmd_cohomology(args: CohomologyArgs) -> anyhow::Result<Report> {
    let max_d = cap(MAX_D_VAR, 4)?;
    if args.degree as usize > max_d {
        bail!("--degree {} exceeds the cap {max_d}; raise {MAX_D_VAR} to allow it", args.degree);
    }
    match (args.which, args.side) {
        (Which::Bc, Some(Side::X)) => bail!("Bott-Chern cohomology lives on the complex side (--side xcheck)"),
        (Which::Ty, Some(Side::Xcheck)) => bail!("Tseng-Yau cohomology lives on the symplectic side (--side x)"),
        (Which::Mirror, Some(_)) => bail!("--which mirror uses both sides; drop --side"),
        _ => {}
    }
    let nd = match args.k {
        Some(k) => {
            check_k(k)?;
            Some(NilData::build(k)?)
        }
        None => None,
    };
    let model = args.model.unwrap_or(if nd.is_some() { Model::Polynomial } else { Model::Constant });
    let pair = match (&nd, args.flat) {
        (Some(nd), _) => nd.pair().clone(),
        (None, Some(n)) => SemiflatPair::standard(n)?,
        (None, None) => bail!("one of --K and --flat is required"),
    };
    let build = |complex_side: bool| -> anyhow::Result<FiniteComplex> {
        let side = |d| if complex_side { FiniteComplex::complex_side(&pair, d) } else { FiniteComplex::symplectic_side(&pair, d) };
        Ok(match (model, &nd) {
            (Model::Constant, _) => side(0).constant_coefficients(),
            (Model::Polynomial, _) => side(args.degree),
            (Model::Invariant, Some(nd)) => side(args.degree).with_invariance(nd)?,
            (Model::Frame, Some(nd)) => {
                let c = FiniteComplex::nil_invariant(nd, complex_side)?;
                if args.degree > 0 {
                    c.polynomial_coefficients(args.degree)
                } else {
                    c
                }
            }
            (Model::Invariant | Model::Frame, None) => bail!("this model needs a nilmanifold (--K)"),
        })
    };
    let n = pair.n();
    let bidegrees: Vec<(usize, usize)> = match args.bidegree {
        Some((p, q)) if p > n || q > n => bail!("bidegree ({p},{q}) out of range for n = {n}"),
        Some(b) => vec![b],
        None => (0..=n).flat_map(|p| (0..=n).map(move |q| (p, q))).collect(),
    };
    let which = match args.which {
        Which::Bc => "bc",
        Which::Ty => "ty",
        Which::Mirror => "mirror",
    };
    let mut r = Report::new(format!("cohomology {which}"));
    match (args.k, args.flat) {
        (Some(k), _) => r.config("K", k),
        (_, Some(f)) => r.config("flat", f),
        _ => &mut r,
    };
    r.config("n", n);
    r.config("D", args.degree);
    r.config("model", model.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default());
    let forced = nd.is_none() && model == Model::Constant;
    if args.which == Which::Mirror {
        let cx = build(false)?;
        let cxc = build(true)?;
        for (p, q) in bidegrees {
            r.absorb(&format!("({p},{q})."), mirror_compare(&cx, &cxc, &pair, p, q)?);
        }
        return Ok(r);
    }
    let c = build(args.which == Which::Bc)?;
    let mut results = Vec::new();
    for (p, q) in bidegrees {
        let h = c.cohomology(p, q)?;
        if forced {
            let want = binom(n, p) * binom(n, q);
            r.check(&format!("({p},{q}).binomial"), h.dim == want, format!("dim = C({n},{p})·C({n},{q}) = {want}"), || {
                format!("dim {}", h.dim)
            });
        }
        results.push(json!({"p": p, "q": q, "dim": h.dim, "detail": h.to_value()}));
    }
    r.data("dimensions", results);
    Ok(r)
}

fn summary(r: &Report) -> String {
    let mut s = r.to_string();
    if let Some(Value::Array(rows)) = r.data.get("dimensions") {
        for row in rows {
            s.push_str(&format!("  dim H^({},{}) = {}\n", row["p"], row["q"], row["dim"]));
        }
    }
    s
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut stdout_extra = None;
    let report = match cli.command {
        Command::Nil { k, out } => cmd_nil(k, &out)?,
        Command::Fm { input, direction, n, output } => {
            let (r, text) = cmd_fm(&input, direction, n, output.as_deref())?;
            stdout_extra = text;
            r
        }
        Command::Verify { system, input } => cmd_verify(system, &input)?,
        Command::Cohomology { k, flat, which, side, p, q, degree, model } => {
            let bidegree = p.zip(q);
            let next = degree + 1;
            match cmd_cohomology(CohomologyArgs { k, flat, which, side, bidegree, degree, model }) {
                Err(e) => match e.downcast_ref::<Error>() {
                    Some(Error::LimitExceeded(msg)) => bail!("{msg}; try --degree {next}"),
                    _ => return Err(e),
                },
                Ok(r) => r,
            }
        }
        Command::Proptest { suite, trials, seed } => campaign::run(&suite, trials, seed)?,
    };
    if let Some(path) = &cli.report {
        write_file(path, &format!("{}\n", report.to_json()))?;
    }
    match stdout_extra {
        // The transformed form owns stdout; the summary goes to stderr.
        Some(text) => {
            print!("{text}");
            eprint!("{}", summary(&report));
        }
        None => print!("{}", summary(&report)),
    }
    Ok(match report.first_failure() {
        None => ExitCode::SUCCESS,
        Some(c) => {
            eprintln!("first failing check: {}", c.id);
            ExitCode::from(1)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

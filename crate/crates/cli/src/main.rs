// `!(a < b)` also rejects NaN on the float backend.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use finetti::operators::parse_draws;
use finetti::scalar::{parse_rational, parse_scalar};
use finetti::{
    atomic_mixture, condition_evidence, constant_phenomenon, document_backend,
    hypothesis_posterior, mixture_of_hypotheses, model_from_json, monte_carlo_theorem1,
    occupancy_row, phenomenon_from_json, phenomenon_to_json, posterior_limit,
    posterior_trajectory, predictive_probability, theorem1_interval, uniform_phenomenon,
    urn_scenario, Backend, Error, EvidenceCount, Exact, Frequency, HypothesisModel, LimitCdf,
    Phenomenon, Result, Scalar,
};

const DEFAULT_DEPTH: usize = 100;

#[derive(Debug, Parser)]
#[command(
    name = "finetti",
    version,
    about = "Occupancy tables, conditioning, posteriors and limits for exchangeable phenomena"
)]
struct Cli {
    /// Numeric backend; defaults to the spec file's, else exact
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    /// Depth budget for moment-sequence inputs [default: 100 for --uniform]
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Decimal places for rendered floats
    #[arg(long, global = true, default_value_t = 6,
          value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(flatten)]
    source: Source,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Source {
    /// Phenomenon or hypothesis-model JSON file
    #[arg(long, global = true, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Constant success probability
    #[arg(long, global = true, value_name = "P")]
    constant: Option<String>,
    /// Uniform mixing measure
    #[arg(long, global = true)]
    uniform: bool,
    /// Finite mixture, e.g. "1/5:1/2,7/10:1/2"
    #[arg(long, global = true, value_name = "P:W,...")]
    atoms: Option<String>,
    /// Two-hypothesis urn model
    #[arg(long, global = true, num_args = 5,
          value_names = ["TOTAL", "WHITE", "URN", "ALPHA", "BETA"])]
    urn: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Probabilities of h successes in n trials, h = 0..=n
    Occupancy { n: usize },
    /// The phenomenon after r successes and s failures
    Condition { r: usize, s: usize },
    /// Hypothesis posteriors after each draw of EVIDENCE (W = success, B = failure)
    Posterior {
        #[arg(default_value = "")]
        evidence: String,
    },
    /// Limiting frequency distribution
    Limit(LimitArgs),
    /// Monte Carlo check of the frequency law
    Sample {
        n: usize,
        trials: usize,
        #[arg(long, num_args = 2, value_names = ["XI1", "XI2"], required = true)]
        interval: Vec<String>,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["interval", "cdf_grid", "posterior_limit"])))]
struct LimitArgs {
    /// Limit probability of the frequency lying in (XI1, XI2]
    #[arg(long, num_args = 2, value_names = ["XI1", "XI2"])]
    interval: Option<Vec<String>>,
    /// Tabulate the limiting CDF
    #[arg(long)]
    cdf_grid: bool,
    /// Limiting hypothesis weights at frequency F (rational, or tie:P,Q)
    #[arg(long, value_name = "F")]
    posterior_limit: Option<String>,
    /// Also report the finite-n value
    #[arg(long)]
    n: Option<usize>,
    /// Grid size for --cdf-grid
    #[arg(long, default_value_t = finetti::limitdist::DEFAULT_GRID_POINTS)]
    points: usize,
}

enum Input<S> {
    Phenomenon(Phenomenon<S>),
    Model(HypothesisModel<S>),
}

struct Ctx<'a, S> {
    cli: &'a Cli,
    input: Input<S>,
    places: usize,
}

impl<S: Scalar> Ctx<'_, S> {
    fn phenomenon(&self) -> Result<Phenomenon<S>> {
        match &self.input {
            Input::Phenomenon(ph) => Ok(ph.clone()),
            Input::Model(m) => mixture_of_hypotheses(m),
        }
    }

    fn model(&self) -> Result<&HypothesisModel<S>> {
        match &self.input {
            Input::Model(m) => Ok(m),
            Input::Phenomenon(_) => Err(Error::InvalidArgument(
                "this command needs a hypothesis model (--urn or a hypotheses spec)".into(),
            )),
        }
    }

    /// Exact values stay "num/den"; floats are rounded to the precision.
    fn num(&self, x: &S) -> Value {
        match S::BACKEND {
            Backend::Exact => x.to_json(),
            Backend::Float => x
                .to_decimal(self.places)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number),
        }
    }

    fn cell(&self, x: &S) -> String {
        match S::BACKEND {
            Backend::Exact => x.render(),
            Backend::Float => x.to_decimal(self.places),
        }
    }

    fn labelled(&self, values: &[(String, S)]) -> Value {
        values
            .iter()
            .map(|(label, v)| {
                json!({"label": label, "value": self.num(v), "decimal": v.to_decimal(self.places)})
            })
            .collect()
    }

    fn csv(&self) -> bool {
        self.cli.output == Output::Csv
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            report_error("Usage", &e.kind().to_string(), &e.to_string());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            report_error(e.kind(), &e.to_string(), "");
            ExitCode::from(if e.is_domain() { 3 } else { 2 })
        }
    }
}

fn report_error(kind: &str, message: &str, detail: &str) {
    let mut v = json!({"error": kind, "message": message});
    if !detail.is_empty() {
        v["detail"] = Value::String(detail.trim_end().to_string());
    }
    eprintln!("{v}");
}

fn run(cli: &Cli) -> Result<String> {
    let doc = match &cli.source.spec {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            Some(
                serde_json::from_str::<Value>(&text)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let backend = match (&doc, cli.backend) {
        (Some(doc), explicit) => {
            let named = document_backend(doc)?;
            if let Some(b) = explicit {
                if Backend::from(b) != named {
                    return Err(Error::MixedBackend { expected: b.into() });
                }
            }
            named
        }
        (None, Some(b)) => b.into(),
        (None, None) => Backend::Exact,
    };
    match backend {
        Backend::Exact => dispatch::<Exact>(cli, doc.as_ref()),
        Backend::Float => dispatch::<f64>(cli, doc.as_ref()),
    }
}

fn dispatch<S: Scalar>(cli: &Cli, doc: Option<&Value>) -> Result<String> {
    let ctx = Ctx {
        cli,
        input: build_input::<S>(cli, doc)?,
        places: cli.precision as usize,
    };
    let out = match &cli.command {
        Command::Occupancy { n } => cmd_occupancy(&ctx, *n)?,
        Command::Condition { r, s } => cmd_condition(&ctx, EvidenceCount::new(*r, *s))?,
        Command::Posterior { evidence } => cmd_posterior(&ctx, evidence)?,
        Command::Limit(args) => cmd_limit(&ctx, args)?,
        Command::Sample { n, trials, interval } => cmd_sample(&ctx, *n, *trials, interval)?,
    };
    Ok(match out {
        Value::String(csv) => csv,
        v => format!("{}\n", serde_json::to_string_pretty(&v).expect("values serialize")),
    })
}

fn build_input<S: Scalar>(cli: &Cli, doc: Option<&Value>) -> Result<Input<S>> {
    let src = &cli.source;
    let chosen = [
        src.spec.is_some(),
        src.constant.is_some(),
        src.uniform,
        src.atoms.is_some(),
        src.urn.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if chosen != 1 {
        return Err(Error::InvalidArgument(
            "give exactly one of --spec, --constant, --uniform, --atoms, --urn".into(),
        ));
    }
    if let Some(doc) = doc {
        if doc.get("kind").and_then(Value::as_str) == Some("hypotheses") {
            return Ok(Input::Model(model_from_json(doc)?));
        }
        let ph = phenomenon_from_json::<S>(doc)?;
        return Ok(Input::Phenomenon(match (ph, cli.depth) {
            (Phenomenon::Moments(m), Some(d)) if d < m.depth() => m.truncate(d)?.into(),
            (ph, _) => ph,
        }));
    }
    if let Some(p) = &src.constant {
        return Ok(Input::Phenomenon(constant_phenomenon(parse_scalar::<S>(p)?)?));
    }
    if src.uniform {
        return Ok(Input::Phenomenon(uniform_phenomenon(
            cli.depth.unwrap_or(DEFAULT_DEPTH),
        )));
    }
    if let Some(list) = &src.atoms {
        let atoms = list
            .split(',')
            .map(|item| match item.split_once(':') {
                Some((p, w)) => Ok((parse_scalar::<S>(p)?, parse_scalar::<S>(w)?)),
                None => Err(Error::Parse(format!("atom {item:?} is not P:W"))),
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(Input::Phenomenon(atomic_mixture(atoms)?));
    }
    let urn = src.urn.as_ref().expect("one source is set");
    let count = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("{s:?} is not a nonnegative integer")))
    };
    Ok(Input::Model(urn_scenario(
        count(&urn[0])?,
        count(&urn[1])?,
        count(&urn[2])?,
        parse_scalar::<S>(&urn[3])?,
        parse_scalar::<S>(&urn[4])?,
    )?))
}

fn cmd_occupancy<S: Scalar>(ctx: &Ctx<S>, n: usize) -> Result<Value> {
    let row = occupancy_row(&ctx.phenomenon()?, n)?;
    if ctx.csv() {
        let mut out = String::from("h,omega\n");
        for (h, w) in row.probs().iter().enumerate() {
            out.push_str(&format!("{h},{}\n", ctx.cell(w)));
        }
        return Ok(Value::String(out));
    }
    Ok(json!({
        "backend": S::BACKEND.as_str(),
        "n": n,
        "omega": row.probs().iter().map(|w| ctx.num(w)).collect::<Vec<_>>(),
    }))
}

fn cmd_condition<S: Scalar>(ctx: &Ctx<S>, ev: EvidenceCount) -> Result<Value> {
    let conditioned = condition_evidence(&ctx.phenomenon()?, ev)?;
    if ctx.csv() {
        let mut out = String::new();
        match &conditioned {
            Phenomenon::Moments(m) => {
                out.push_str("h,value\n");
                for (h, v) in m.values().iter().enumerate() {
                    out.push_str(&format!("{h},{}\n", ctx.cell(v)));
                }
            }
            Phenomenon::Atomic(a) => {
                out.push_str("p,weight\n");
                for atom in a.atoms() {
                    out.push_str(&format!("{},{}\n", ctx.cell(&atom.p), ctx.cell(&atom.weight)));
                }
            }
        }
        return Ok(Value::String(out));
    }
    Ok(phenomenon_to_json(&conditioned))
}

fn cmd_posterior<S: Scalar>(ctx: &Ctx<S>, evidence: &str) -> Result<Value> {
    let model = ctx.model()?;
    let draws = parse_draws(evidence)?;
    let trace = posterior_trajectory(model, &draws)?;
    let mixture = mixture_of_hypotheses(model)?;
    let mut ev = EvidenceCount::default();
    let mut steps = Vec::with_capacity(trace.len());
    for (k, posterior) in trace.iter().enumerate() {
        if k > 0 {
            ev.record(draws[k - 1]);
        }
        let draw = match k {
            0 => None,
            _ => Some(if draws[k - 1] { "W" } else { "B" }),
        };
        steps.push((k, draw, ev, posterior, predictive_probability(&mixture, ev)?));
    }
    let labels = model.labels();
    if ctx.csv() {
        let mut out = format!("step,draw,r,s,{},predictive\n", labels.join(","));
        for (k, draw, ev, posterior, pred) in &steps {
            let cells: Vec<String> = posterior.iter().map(|(_, v)| ctx.cell(v)).collect();
            out.push_str(&format!(
                "{k},{},{},{},{},{}\n",
                draw.unwrap_or(""),
                ev.r,
                ev.s,
                cells.join(","),
                ctx.cell(pred)
            ));
        }
        return Ok(Value::String(out));
    }
    let (_, _, last_ev, last, last_pred) = steps.last().expect("trace includes the prior");
    Ok(json!({
        "evidence": draws.iter().map(|&b| if b { 'W' } else { 'B' }).collect::<String>(),
        "labels": labels,
        "trace": steps.iter().map(|(k, draw, ev, posterior, pred)| json!({
            "step": k,
            "draw": draw,
            "r": ev.r,
            "s": ev.s,
            "posterior": posterior.iter().map(|(_, v)| ctx.num(v)).collect::<Vec<_>>(),
            "predictive": ctx.num(pred),
        })).collect::<Vec<_>>(),
        "r": last_ev.r,
        "s": last_ev.s,
        "posterior": ctx.labelled(last),
        "predictive": ctx.num(last_pred),
        "predictive_decimal": last_pred.to_decimal(ctx.places),
    }))
}

/// Exact limit of the input: atomic inputs and the uniform flag only.
fn limit_cdf<S: Scalar>(ctx: &Ctx<S>, ph: &Phenomenon<S>) -> Result<LimitCdf<S>> {
    if ctx.cli.source.uniform {
        return Ok(LimitCdf::Uniform);
    }
    LimitCdf::exact(ph)
}

fn parse_interval<S: Scalar>(pair: &[String]) -> Result<(S, S)> {
    let xi1 = parse_scalar::<S>(&pair[0])?;
    let xi2 = parse_scalar::<S>(&pair[1])?;
    if !(xi1 < xi2) {
        return Err(Error::InvalidArgument(format!(
            "interval ({}, {}) is empty",
            pair[0], pair[1]
        )));
    }
    Ok((xi1, xi2))
}

fn parse_frequency(text: &str) -> Result<Frequency> {
    if let Some(pair) = text.strip_prefix("tie:") {
        let (p, q) = pair
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("{text:?} is not tie:P,Q")))?;
        return Ok(Frequency::Tie(parse_rational(p)?, parse_rational(q)?));
    }
    Ok(Frequency::Rational(parse_rational(text)?))
}

fn cmd_limit<S: Scalar>(ctx: &Ctx<S>, args: &LimitArgs) -> Result<Value> {
    if let Some(f) = &args.posterior_limit {
        return posterior_limit_report(ctx, &parse_frequency(f)?, args.n);
    }
    let ph = ctx.phenomenon()?;
    let cdf = limit_cdf(ctx, &ph)?;
    if let Some(pair) = &args.interval {
        let (xi1, xi2) = parse_interval::<S>(pair)?;
        let limit = cdf.eval(&xi2) - cdf.eval(&xi1);
        let finite = match args.n {
            Some(n) => Some(theorem1_interval(&ph, &xi1, &xi2, n)?.finite),
            None => None,
        };
        if ctx.csv() {
            let mut out = String::from("xi1,xi2,limit");
            if args.n.is_some() {
                out.push_str(",n,finite");
            }
            out.push_str(&format!("\n{},{},{}", ctx.cell(&xi1), ctx.cell(&xi2), ctx.cell(&limit)));
            if let (Some(n), Some(v)) = (args.n, &finite) {
                out.push_str(&format!(",{n},{}", ctx.cell(v)));
            }
            out.push('\n');
            return Ok(Value::String(out));
        }
        let mut v = json!({
            "xi1": ctx.num(&xi1),
            "xi2": ctx.num(&xi2),
            "limit": ctx.num(&limit),
            "decimal": limit.to_decimal(ctx.places),
        });
        if let (Some(n), Some(f)) = (args.n, finite) {
            v["finite"] = json!({"n": n, "value": ctx.num(&f), "decimal": f.to_decimal(ctx.places)});
        }
        return Ok(v);
    }

    let grid = cdf.grid(args.points);
    let finite = match args.n {
        Some(n) => Some(LimitCdf::sampled(&ph, n, args.points.max(2))?.grid(0)),
        None => None,
    };
    if ctx.csv() {
        let mut out = String::from(if finite.is_some() { "xi,phi,phi_n\n" } else { "xi,phi\n" });
        for (k, (xi, phi)) in grid.iter().enumerate() {
            out.push_str(&format!("{},{}", ctx.cell(xi), ctx.cell(phi)));
            if let Some(f) = &finite {
                out.push_str(&format!(",{}", ctx.cell(&f[k].1)));
            }
            out.push('\n');
        }
        return Ok(Value::String(out));
    }
    let mut v = json!({
        "cdf": finetti::limit_cdf_to_json(&cdf),
        "grid": grid.iter().map(|(xi, phi)| json!([ctx.num(xi), ctx.num(phi)])).collect::<Vec<_>>(),
    });
    if let (Some(n), Some(f)) = (args.n, finite) {
        v["finite"] = json!({
            "n": n,
            "grid": f.iter().map(|(xi, phi)| json!([ctx.num(xi), ctx.num(phi)])).collect::<Vec<_>>(),
        });
    }
    Ok(v)
}

fn posterior_limit_report<S: Scalar>(
    ctx: &Ctx<S>,
    frequency: &Frequency,
    n: Option<usize>,
) -> Result<Value> {
    let model = ctx.model()?;
    let limit = posterior_limit(model, frequency)?;
    let finite = match n {
        Some(n) => {
            let r = (n as f64 * frequency.value()).round() as usize;
            let ev = EvidenceCount::new(r.min(n), n - r.min(n));
            Some((ev, hypothesis_posterior(model, ev)?))
        }
        None => None,
    };
    if ctx.csv() {
        let mut out = String::from(if finite.is_some() { "label,limit,finite\n" } else { "label,limit\n" });
        for (k, (label, w)) in limit.weights.iter().enumerate() {
            out.push_str(&format!("{label},{}", ctx.cell(w)));
            if let Some((_, post)) = &finite {
                out.push_str(&format!(",{}", ctx.cell(&post[k].1)));
            }
            out.push('\n');
        }
        return Ok(Value::String(out));
    }
    let mut v = json!({
        "frequency": frequency.value(),
        "weights": ctx.labelled(&limit.weights),
        "dominant_atoms": limit.dominant_atoms.iter().map(|p| ctx.num(p)).collect::<Vec<_>>(),
        "near_tie": limit.near_tie,
    });
    if let Some((ev, post)) = finite {
        v["finite"] = json!({"n": ev.total(), "r": ev.r, "s": ev.s, "weights": ctx.labelled(&post)});
    }
    Ok(v)
}

fn cmd_sample<S: Scalar>(ctx: &Ctx<S>, n: usize, trials: usize, interval: &[String]) -> Result<Value> {
    let (xi1, xi2) = parse_interval::<S>(interval)?;
    let seed = ctx.cli.seed.unwrap_or(0);
    let report = monte_carlo_theorem1(&ctx.phenomenon()?, n, trials, &xi1, &xi2, seed)?;
    if ctx.csv() {
        return Ok(Value::String(format!(
            "seed,n,trials,empirical,exact,stderr\n{},{},{},{},{},{}\n",
            report.seed,
            report.n,
            report.trials,
            report.empirical,
            report.exact.render(),
            report.stderr
        )));
    }
    Ok(report.to_json())
}

//! The `crnss` command line, callable in-process.

use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crnss::bundled::read_model;
use crnss::decomposition::{finest_independent_decomposition, mass_action_union, restrict_kinetics};
use crnss::dsl::{parse_network, parse_parametrization, render_network, Model};
use crnss::linalg::QMatrix;
use crnss::mixed::clear_denominators;
use crnss::parametrization::{ParamOptions, Parametrization};
use crnss::pipeline::{
    directed_shifts, render_text, run_pipeline, translate_and_parametrize, ClearedReport, ParamView, PipelineOptions,
    TranslationReport, DEFAULT_SEED,
};
use crnss::report::SCHEMA;
use crnss::symbolic::{Expr, Symbol, Q};
use crnss::translation::{check_dynamic_equivalence, search_translation, translate, SearchBudget, SigmaNaming};
use crnss::verify::{residual_harness, HarnessConfig, HarnessReport};
use crnss::Error;

#[derive(Parser)]
#[command(name = "crnss", version, about = "Positive steady states of reaction networks with mixed kinetics")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structural indices: complexes, linkage classes, rank, deficiency.
    Analyze { file: String },
    /// Finest independent decomposition and kinetic purity of each part.
    Decompose { file: String },
    /// Network translation of the whole network or one part.
    Translate {
        file: String,
        /// 1-based part of the finest decomposition.
        #[arg(long)]
        part: Option<usize>,
        /// Ignore `translate` lines and search.
        #[arg(long)]
        search: bool,
    },
    /// Tree-constant parametrization of a mass-action network or part.
    Parametrize {
        file: String,
        #[arg(long)]
        part: Option<usize>,
        /// Spanning forest as vertex pairs, e.g. `0-1,0-2`.
        #[arg(long)]
        forest: Option<String>,
        /// Generalized inverse H, one row per line, species by forest edges.
        #[arg(long = "h")]
        h_file: Option<String>,
        #[command(flatten)]
        harness: HarnessArgs,
    },
    /// Decompose, parametrize, merge and verify.
    Pipeline {
        file: String,
        #[arg(long)]
        clear_denominators: bool,
        #[command(flatten)]
        harness: HarnessArgs,
    },
    /// Residual check of a parametrization file against the network.
    Verify {
        file: String,
        parametrization: String,
        #[command(flatten)]
        harness: HarnessArgs,
    },
    /// Clear a shared rate denominator, giving a mass-action network.
    Transform { file: String },
}

#[derive(Args)]
struct HarnessArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Hold a constant at a value, `name=value`; repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
}

impl HarnessArgs {
    fn config(&self) -> Result<HarnessConfig, Error> {
        let mut cfg = HarnessConfig::new(self.seed, self.samples, self.tol);
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("expected name=value, got `{kv}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Config(format!("bad number in `{kv}`")))?;
            cfg.fixed.insert(Symbol::new(k.trim()), v);
        }
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: &'static str,
    command: &'static str,
    #[serde(flatten)]
    body: T,
}

struct Output {
    command: &'static str,
    json: serde_json::Value,
    text: String,
    code: i32,
}

impl Output {
    fn new<T: Serialize>(command: &'static str, body: T, text: String, code: i32) -> Self {
        let json = serde_json::to_value(Envelope { schema: SCHEMA, command, body }).expect("report serializes");
        Output { command, json, text, code }
    }
}

fn load(path: &str) -> Result<Model, Error> {
    let src = read_model(path).map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
    parse_network(&src)
}

/// Result of one command-line invocation.
#[derive(Clone, Debug)]
pub struct Invocation {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (program name first) and runs the command.
pub fn execute<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Invocation { stdout: text, stderr: String::new(), code }
            } else {
                Invocation { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let file = match &cli.cmd {
        Cmd::Analyze { file }
        | Cmd::Decompose { file }
        | Cmd::Translate { file, .. }
        | Cmd::Parametrize { file, .. }
        | Cmd::Pipeline { file, .. }
        | Cmd::Verify { file, .. }
        | Cmd::Transform { file } => file.clone(),
    };
    match run(&cli) {
        Ok(out) => {
            let stdout = if cli.json { serde_json::to_string_pretty(&out.json).expect("json") + "\n" } else { out.text };
            let stderr = if out.code != 0 { format!("crnss {}: exit {}\n", out.command, out.code) } else { String::new() };
            Invocation { stdout, stderr, code: out.code }
        }
        Err(e) => {
            let stderr = match &e {
                Error::Parse(diags) => diags.iter().map(|d| format!("{file}:{d}\n")).collect(),
                other => format!("error: {other}\n"),
            };
            Invocation { stdout: String::new(), stderr, code: e.exit_code() }
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Error> {
    match &cli.cmd {
        Cmd::Analyze { file } => analyze(&load(file)?),
        Cmd::Decompose { file } => decompose(&load(file)?),
        Cmd::Translate { file, part, search } => translate_cmd(&load(file)?, *part, *search),
        Cmd::Parametrize { file, part, forest, h_file, harness } => {
            parametrize_cmd(&load(file)?, *part, forest.as_deref(), h_file.as_deref(), harness)
        }
        Cmd::Pipeline { file, clear_denominators, harness } => {
            let model = load(file)?;
            let opts = PipelineOptions { harness: harness.config()?, budget: SearchBudget::default(), clear_denominators: *clear_denominators };
            let report = run_pipeline(&model, &opts);
            let code = report.exit_code();
            let text = render_text(&report, model.network.species());
            Ok(Output::new("pipeline", report, text, code))
        }
        Cmd::Verify { file, parametrization, harness } => verify_cmd(&load(file)?, parametrization, harness),
        Cmd::Transform { file } => transform(&load(file)?),
    }
}

fn analyze(model: &Model) -> Result<Output, Error> {
    let s = model.network.summary();
    let text = format!(
        "species (m)            {}\nreactions (r)          {}\ncomplexes (n)          {}\nlinkage classes (l)    {}\nstrong linkage classes {}\nrank (s)               {}\ndeficiency             {}\nweakly reversible      {}\n",
        s.m, s.r, s.n, s.ell, s.strong_linkage_classes, s.s, s.delta, s.weakly_reversible
    );
    Ok(Output::new("analyze", s, text, 0))
}

#[derive(Serialize)]
struct DecomposeBody {
    decomposition: crnss::decomposition::Decomposition,
    mass_action: Vec<bool>,
    mass_action_union: crnss::decomposition::MassActionUnion,
    rank_sum: usize,
}

fn decompose(model: &Model) -> Result<Output, Error> {
    let net = &model.network;
    let dec = finest_independent_decomposition(net)?;
    let purity: Vec<bool> = restrict_kinetics(&model.kinetics, &dec).into_iter().map(|(_, p)| p).collect();
    let union = mass_action_union(net, &dec, &purity);
    let rank_sum = dec.parts.iter().map(|p| p.summary.s).sum();
    let mut text = format!("{} parts, rank {} = sum of part ranks {}\n", dec.parts.len(), dec.rank, rank_sum);
    for (i, p) in dec.parts.iter().enumerate() {
        let kind = if purity[i] { "mass action" } else { "mixed" };
        text += &format!("  part {}: {} (s={}, deficiency={}, {kind})\n", i + 1, p.labels.join(" "), p.summary.s, p.summary.delta);
    }
    text += &format!("mass-action and other parts mutually exclusive: {}\n", union.mutually_exclusive);
    Ok(Output::new("decompose", DecomposeBody { decomposition: dec, mass_action: purity, mass_action_union: union, rank_sum }, text, 0))
}

fn select_part(model: &Model, part: Option<usize>) -> Result<(Vec<usize>, crnss::kinetics::Kinetics, crnss::crn::Network), Error> {
    let net = &model.network;
    let reactions: Vec<usize> = match part {
        None => (0..net.r()).collect(),
        Some(p) => {
            let dec = finest_independent_decomposition(net)?;
            dec.parts.get(p.wrapping_sub(1)).ok_or_else(|| Error::Config(format!("no part {p}; the decomposition has {}", dec.parts.len())))?.reactions.clone()
        }
    };
    Ok((reactions.clone(), model.kinetics.restrict(&reactions), net.subnetwork(&reactions)))
}

#[derive(Serialize)]
struct TranslateBody {
    translation: TranslationReport,
    theorem_applies: bool,
    reason: Option<String>,
    generalized_network: crnss::translation::GeneralizedNetwork,
}

fn translate_cmd(model: &Model, part: Option<usize>, search: bool) -> Result<Output, Error> {
    let (reactions, kin, net) = select_part(model, part)?;
    let naming = SigmaNaming::default();
    let declared = if search { None } else { directed_shifts(model, &reactions) };
    let (g, searched) = match declared {
        Some(s) => (translate(&net, &kin, &s, naming)?, false),
        None => {
            let s = search_translation(&net, &kin, &SearchBudget::default())
                .ok_or_else(|| Error::Inapplicable("no translation satisfies the parametrization theorem within the search budget".into()))?;
            (translate(&net, &kin, &s, naming)?, true)
        }
    };
    let status = g.theorem_applies();
    let equivalent = check_dynamic_equivalence(&net, &kin, &g).is_empty();
    let report = TranslationReport::new(&net, &g, searched, equivalent);
    let mut text = format!(
        "{}effective deficiency {}, kinetic deficiency {}\n",
        report.graph, report.effective_deficiency, report.kinetic_deficiency
    );
    for (r, s) in &report.shifts {
        text += &format!("  {r} shifted by {s}\n");
    }
    text += &format!("dynamically equivalent: {equivalent}\n");
    let code = match &status {
        Ok(()) => {
            text += "parametrization theorem applies\n";
            0
        }
        Err(why) => {
            text += &format!("parametrization theorem does not apply: {why}\n");
            3
        }
    };
    let body = TranslateBody { translation: report, theorem_applies: status.is_ok(), reason: status.err(), generalized_network: g };
    Ok(Output::new("translate", body, text, code))
}

fn parse_forest(s: &str) -> Result<Vec<(usize, usize)>, Error> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p.split_once('-').ok_or_else(|| Error::Config(format!("forest edge `{p}` is not `i-j`")))?;
            let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad vertex in `{p}`")));
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

fn read_matrix(path: &str) -> Result<QMatrix, Error> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
    let rows: Vec<Vec<Q>> = src
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.split_whitespace().map(|x| Q::from_str(x).map_err(|_| Error::Config(format!("bad entry `{x}` in {path}")))).collect())
        .collect::<Result<_, _>>()?;
    if rows.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(Error::Config(format!("{path}: rows differ in length")));
    }
    Ok(QMatrix::from_rows(&rows))
}

#[derive(Serialize)]
struct ParametrizeBody {
    translation: TranslationReport,
    system: crnss::parametrization::ParamSystem,
    parametrization: ParamView,
    residual: HarnessReport,
}

fn parametrize_cmd(model: &Model, part: Option<usize>, forest: Option<&str>, h: Option<&str>, harness: &HarnessArgs) -> Result<Output, Error> {
    let (reactions, kin, net) = select_part(model, part)?;
    let opts = ParamOptions { forest: forest.map(parse_forest).transpose()?, h: h.map(read_matrix).transpose()?, part: None };
    let tp = translate_and_parametrize(&net, &kin, directed_shifts(model, &reactions), SigmaNaming::default(), &SearchBudget::default(), &opts)?;
    let residual = residual_harness(&net, &kin, &tp.parametrization, &harness.config()?)?;
    let species = model.network.species();
    let view = ParamView::new(&tp.parametrization, species);
    let mut text = String::from("tree constants:\n");
    for (i, k) in tp.system.tree_constants.iter().enumerate() {
        text += &format!("  K{} = {k}\n", i + 1);
    }
    text += &format!("steady states (free: {}):\n", view.free.join(", "));
    for e in &view.entries {
        text += &format!("  {} = {}\n", e.species, e.value);
    }
    text += &harness_line(&residual);
    let code = if residual.passed { 0 } else { 1 };
    let body = ParametrizeBody { translation: TranslationReport::new(&net, &tp.graph, tp.searched, tp.equivalent), system: tp.system, parametrization: view, residual };
    Ok(Output::new("parametrize", body, text, code))
}

fn harness_line(h: &HarnessReport) -> String {
    let mut s = format!(
        "residual: {} samples, seed {}, max {:.3e}, median {:.3e}, tol {:.0e}: {}\n",
        h.samples,
        h.seed,
        h.max_residual,
        h.median_residual,
        h.tol,
        if h.passed { "pass" } else { "FAIL" }
    );
    if let Some(f) = &h.failure {
        s += &format!("  worst sample #{}: residual {:.3e} ({})\n", f.index, f.residual, f.reason);
    }
    s
}

#[derive(Serialize)]
struct VerifyBody {
    parametrization: ParamView,
    residual: HarnessReport,
}

fn verify_cmd(model: &Model, path: &str, harness: &HarnessArgs) -> Result<Output, Error> {
    let src = read_model(path).map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
    let file = parse_parametrization(&src, model).map_err(|e| match e {
        Error::Parse(d) => Error::Config(d.iter().map(|x| format!("{path}:{x}")).collect::<Vec<_>>().join("\n")),
        other => other,
    })?;
    // `x3 = x3` just declares x3 free.
    let (own, entries): (Vec<_>, Vec<_>) = file.entries.into_iter().partition(|(j, e)| matches!(e, Expr::Sym(s) if s == model.conc_symbol(*j)));
    let p = Parametrization {
        entries,
        free: file.free.iter().chain(own.iter().map(|(j, _)| j)).map(|&j| model.conc_symbol(j).clone()).collect(),
        provenance: path.to_string(),
    };
    let residual = residual_harness(&model.network, &model.kinetics, &p, &harness.config()?)?;
    let text = harness_line(&residual);
    let code = if residual.passed { 0 } else { 1 };
    Ok(Output::new("verify", VerifyBody { parametrization: ParamView::new(&p, model.network.species()), residual }, text, code))
}

#[derive(Serialize)]
struct TransformBody {
    cleared: ClearedReport,
    network: String,
    equivalent: bool,
}

fn transform(model: &Model) -> Result<Output, Error> {
    let c = clear_denominators(&model.network, &model.kinetics)?;
    let equivalent = c.check(&model.network, &model.kinetics);
    let cleared_model = Model { network: c.network.clone(), kinetics: c.kinetics.clone(), free: model.free.clone(), translations: vec![] };
    let network = render_network(&cleared_model);
    let mut text = format!("# rates multiplied by {}\n", c.denominator);
    for (s, e) in &c.substitutions {
        text += &format!("# {s} = {e}\n");
    }
    text += &network;
    let code = if equivalent { 0 } else { 1 };
    Ok(Output::new("transform", TransformBody { cleared: ClearedReport::new(&c), network, equivalent }, text, code))
}

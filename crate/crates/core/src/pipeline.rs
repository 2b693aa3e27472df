//! Decompose, parametrize each part, merge, verify.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::crn::{render_linear, Network, StructuralSummary};
use crate::decomposition::{finest_independent_decomposition, mass_action_union, restrict_kinetics, Decomposition, MassActionUnion};
use crate::dsl::Model;
use crate::error::{Error, Result};
use crate::kinetics::Kinetics;
use crate::merge::{acr_report, entry_equations, forest_relations, merge_equations, MergeConstraint};
use crate::mixed::{clear_denominators, default_free, solve_by_elimination, ClearedSystem, EliminationPlan};
use crate::parametrization::{parametrize, ParamOptions, ParamSystem, Parametrization};
use crate::report::SCHEMA;
use crate::symbolic::{Expr, Symbol};
use crate::translation::{check_dynamic_equivalence, search_translation, translate, GeneralizedNetwork, SearchBudget, SigmaNaming};
use crate::verify::{residual_harness, HarnessConfig, HarnessReport};

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub harness: HarnessConfig,
    pub budget: SearchBudget,
    pub clear_denominators: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { harness: HarnessConfig::new(DEFAULT_SEED, 200, 1e-9), budget: SearchBudget::default(), clear_denominators: false }
    }
}

pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Clone, Debug, Serialize)]
pub struct NamedValue {
    pub species: String,
    pub value: String,
}

/// A parametrization with species names, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct ParamView {
    pub entries: Vec<NamedValue>,
    pub free: Vec<String>,
}

impl ParamView {
    pub fn new(p: &Parametrization, species: &[String]) -> Self {
        ParamView {
            entries: p.entries.iter().map(|(j, e)| NamedValue { species: species[*j].clone(), value: e.to_string() }).collect(),
            free: p.free.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslationReport {
    /// `(reaction label, shift)` for every shifted reaction.
    pub shifts: Vec<(String, String)>,
    pub searched: bool,
    pub vertices: usize,
    pub phantom_edges: usize,
    pub effective_deficiency: i64,
    pub kinetic_deficiency: i64,
    pub dynamically_equivalent: bool,
    pub graph: String,
}

impl TranslationReport {
    pub fn new(net: &Network, g: &GeneralizedNetwork, searched: bool, equivalent: bool) -> Self {
        TranslationReport {
            shifts: g
                .shifts
                .iter()
                .enumerate()
                .filter(|(_, s)| s.iter().any(|&x| x != 0))
                .map(|(r, s)| (net.reactions()[r].label.clone(), render_linear(s, net.species())))
                .collect(),
            searched,
            vertices: g.vertices.len(),
            phantom_edges: g.edges.iter().filter(|e| e.phantom).count(),
            effective_deficiency: g.effective_deficiency(),
            kinetic_deficiency: g.kinetic_deficiency(),
            dynamically_equivalent: equivalent,
            graph: g.render(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartReport {
    pub index: usize,
    pub reactions: Vec<String>,
    pub mass_action: bool,
    pub method: String,
    pub summary: StructuralSummary,
    pub translation: Option<TranslationReport>,
    pub system: Option<ParamSystem>,
    pub elimination: Option<EliminationPlan>,
    pub parametrization: Option<ParamView>,
    pub residual: Option<HarnessReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct AcrRow {
    pub species: String,
    pub acr: bool,
    pub depends_on: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClearedReport {
    pub denominator: String,
    pub reactions: Vec<String>,
    pub substitutions: Vec<(String, String)>,
}

impl ClearedReport {
    pub fn new(c: &ClearedSystem) -> Self {
        ClearedReport {
            denominator: c.denominator.to_string(),
            reactions: (0..c.network.r()).map(|r| format!("{} ; {}", c.network.render_reaction(r), c.kinetics.rates[r].expr)).collect(),
            substitutions: c.substitutions.iter().map(|(s, e)| (s.to_string(), e.to_string())).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub schema: &'static str,
    pub seed: u64,
    pub summary: StructuralSummary,
    pub cleared: Option<ClearedReport>,
    pub decomposition: Option<Decomposition>,
    pub mass_action_union: Option<MassActionUnion>,
    pub parts: Vec<PartReport>,
    pub merged: Option<ParamView>,
    pub constraints: Vec<MergeConstraint>,
    pub acr: Vec<AcrRow>,
    pub residual: Option<HarnessReport>,
    pub errors: Vec<StageError>,
    pub passed: bool,
    #[serde(skip)]
    pub parametrization: Option<Parametrization>,
}

impl PipelineReport {
    pub fn exit_code(&self) -> i32 {
        if let Some(e) = self.errors.iter().map(|e| e.exit_code).max() {
            return e;
        }
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn stage_error(stage: &str, e: &Error) -> StageError {
    StageError { stage: stage.into(), message: e.to_string(), exit_code: e.exit_code() }
}

/// Outcome of a mass-action part.
pub struct TranslatedPart {
    pub graph: GeneralizedNetwork,
    pub searched: bool,
    pub equivalent: bool,
    pub system: ParamSystem,
    pub parametrization: Parametrization,
}

/// Shifts from the model's `translate` lines for the given reactions, if any.
pub fn directed_shifts(model: &Model, reactions: &[usize]) -> Option<Vec<Vec<i64>>> {
    let m = model.network.m();
    if !model.translations.iter().any(|t| reactions.contains(&t.reaction)) {
        return None;
    }
    Some(
        reactions
            .iter()
            .map(|r| model.translations.iter().find(|t| t.reaction == *r).map_or_else(|| vec![0; m], |t| t.shift.clone()))
            .collect(),
    )
}

/// Translates with the given shifts, or searches when none are given or they
/// do not satisfy the theorem; then parametrizes.
pub fn translate_and_parametrize(
    net: &Network,
    kin: &Kinetics,
    shifts: Option<Vec<Vec<i64>>>,
    naming: SigmaNaming,
    budget: &SearchBudget,
    opts: &ParamOptions,
) -> Result<TranslatedPart> {
    let mut chosen = None;
    let mut reason = String::from("no translation satisfies the parametrization theorem within the search budget");
    if let Some(s) = shifts {
        let g = translate(net, kin, &s, naming)?;
        match g.theorem_applies() {
            Ok(()) => chosen = Some((g, false)),
            Err(why) => reason = format!("declared translation does not apply ({why}); search failed too"),
        }
    } else {
        let g = translate(net, kin, &vec![vec![0; net.m()]; net.r()], naming)?;
        if g.theorem_applies().is_ok() {
            chosen = Some((g, false));
        }
    }
    if chosen.is_none() {
        if let Some(s) = search_translation(net, kin, budget) {
            chosen = Some((translate(net, kin, &s, naming)?, true));
        }
    }
    let Some((graph, searched)) = chosen else {
        return Err(Error::Inapplicable(reason));
    };
    let equivalent = check_dynamic_equivalence(net, kin, &graph).is_empty();
    let columns: Vec<usize> = net.species_in_complexes().into_iter().collect();
    let (system, parametrization) = parametrize(&graph, &columns, opts)?;
    Ok(TranslatedPart { graph, searched, equivalent, system, parametrization })
}

fn harness_on(net: &Network, kin: &Kinetics, p: &Parametrization, cfg: &HarnessConfig) -> std::result::Result<HarnessReport, Error> {
    residual_harness(net, kin, p, cfg)
}

pub fn run_pipeline(model: &Model, opts: &PipelineOptions) -> PipelineReport {
    let original_net = &model.network;
    let original_kin = &model.kinetics;
    let species = original_net.species().to_vec();
    let mut report = PipelineReport {
        schema: SCHEMA,
        seed: opts.harness.seed,
        summary: original_net.summary(),
        cleared: None,
        decomposition: None,
        mass_action_union: None,
        parts: vec![],
        merged: None,
        constraints: vec![],
        acr: vec![],
        residual: None,
        errors: vec![],
        passed: false,
        parametrization: None,
    };

    let mut cleared = None;
    if opts.clear_denominators {
        match clear_denominators(original_net, original_kin) {
            Ok(c) => {
                report.cleared = Some(ClearedReport::new(&c));
                cleared = Some(c);
            }
            Err(e) => {
                report.errors.push(stage_error("clear-denominators", &e));
                return report;
            }
        }
    }
    let (net, kin) = match &cleared {
        Some(c) => (&c.network, &c.kinetics),
        None => (original_net, original_kin),
    };
    // Translate directives name reactions of the input, not of the cleared system.
    let directives_apply = cleared.is_none();

    let dec = match finest_independent_decomposition(net) {
        Ok(d) => d,
        Err(e) => {
            report.errors.push(stage_error("decompose", &e));
            return report;
        }
    };
    let restricted = restrict_kinetics(kin, &dec);
    let purity: Vec<bool> = restricted.iter().map(|(_, p)| *p).collect();
    report.mass_action_union = Some(mass_action_union(net, &dec, &purity));
    let multi = dec.parts.len() > 1;

    let mut equations = Vec::new();
    let mut params: Vec<Symbol> = Vec::new();
    let mut part_params: Vec<Parametrization> = Vec::new();
    for (i, (part, (subkin, pure))) in dec.parts.iter().zip(&restricted).enumerate() {
        let sub = net.subnetwork(&part.reactions);
        let label = format!("part {}", i + 1);
        let mut pr = PartReport {
            index: i + 1,
            reactions: part.labels.clone(),
            mass_action: *pure,
            method: String::new(),
            summary: part.summary.clone(),
            translation: None,
            system: None,
            elimination: None,
            parametrization: None,
            residual: None,
            error: None,
        };
        let naming = SigmaNaming { part: multi.then_some(i + 1) };
        let popts = ParamOptions { part: multi.then_some(i + 1), ..Default::default() };
        let mut done = false;
        if *pure {
            let shifts = if directives_apply { directed_shifts(model, &part.reactions) } else { None };
            match translate_and_parametrize(&sub, subkin, shifts, naming, &opts.budget, &popts) {
                Ok(tp) => {
                    pr.method = "translation".into();
                    pr.translation = Some(TranslationReport::new(&sub, &tp.graph, tp.searched, tp.equivalent));
                    equations.extend(forest_relations(&tp.system, &kin.conc, &label));
                    for s in &tp.system.sigmas {
                        if !params.contains(s) {
                            params.push(s.clone());
                        }
                    }
                    pr.parametrization = Some(ParamView::new(&tp.parametrization, &species));
                    match harness_on(&sub, subkin, &tp.parametrization, &opts.harness) {
                        Ok(h) => pr.residual = Some(h),
                        Err(e) => pr.error = Some(e.to_string()),
                    }
                    part_params.push(tp.parametrization);
                    pr.system = Some(tp.system);
                    done = true;
                }
                Err(e) => pr.error = Some(format!("translation: {e}; falling back to elimination")),
            }
        }
        if !done {
            let free = default_free(&sub, subkin, &model.free);
            match solve_by_elimination(&sub, subkin, &free) {
                Ok((plan, p)) => {
                    pr.method = "elimination".into();
                    equations.extend(entry_equations(&p, &kin.conc, &label));
                    pr.parametrization = Some(ParamView::new(&p, &species));
                    match harness_on(&sub, subkin, &p, &opts.harness) {
                        Ok(h) => pr.residual = Some(h),
                        Err(e) => pr.error = Some(e.to_string()),
                    }
                    pr.elimination = Some(plan);
                    part_params.push(p);
                }
                Err(e) => {
                    pr.method = "elimination".into();
                    report.errors.push(stage_error(&format!("parametrize {label}"), &e));
                    pr.error = Some(e.to_string());
                }
            }
        }
        report.parts.push(pr);
    }
    report.decomposition = Some(dec);
    if !report.errors.is_empty() {
        return report;
    }

    let all_species: Vec<usize> = net.species_in_complexes().into_iter().collect();
    let merged = if part_params.len() == 1 && model.free.is_empty() {
        Ok(part_params.pop().unwrap())
    } else {
        merge_equations(&all_species, &kin.conc, equations, &params, &model.free).map(|o| {
            report.constraints = o.constraints;
            o.parametrization
        })
    };
    let mut merged = match merged {
        Ok(p) => p,
        Err(e) => {
            report.errors.push(stage_error("merge", &e));
            return report;
        }
    };
    if let Some(c) = &cleared {
        let sub = c.substitution_map();
        for (_, e) in merged.entries.iter_mut() {
            *e = e.subst(&sub);
        }
    }
    let conc_set: BTreeSet<&Symbol> = kin.conc.iter().collect();
    report.acr = acr_report(&merged, &kin.conc)
        .into_iter()
        .map(|a| AcrRow {
            species: species[a.species].clone(),
            acr: a.acr,
            depends_on: a.depends_on.iter().filter(|s| merged.free.contains(s) || conc_set.contains(s)).map(|s| s.to_string()).collect(),
        })
        .collect();
    report.merged = Some(ParamView::new(&merged, &species));
    match harness_on(original_net, original_kin, &merged, &opts.harness) {
        Ok(h) => {
            let parts_ok = report.parts.iter().all(|p| p.residual.as_ref().is_some_and(|r| r.passed));
            report.passed = h.passed && parts_ok;
            report.residual = Some(h);
        }
        Err(e) => report.errors.push(stage_error("verify", &e)),
    }
    report.parametrization = Some(merged);
    report
}

pub fn render_text(report: &PipelineReport, species: &[String]) -> String {
    let mut out = String::new();
    let s = &report.summary;
    let _ = writeln!(out, "network: m={} r={} n={} l={} s={} deficiency={} weakly_reversible={}", s.m, s.r, s.n, s.ell, s.s, s.delta, s.weakly_reversible);
    if let Some(c) = &report.cleared {
        let _ = writeln!(out, "cleared by {}:", c.denominator);
        for r in &c.reactions {
            let _ = writeln!(out, "  {r}");
        }
        for (k, v) in &c.substitutions {
            let _ = writeln!(out, "  {k} = {v}");
        }
    }
    if let Some(d) = &report.decomposition {
        let _ = writeln!(out, "decomposition: {} parts, independent={}", d.parts.len(), d.independent);
    }
    for p in &report.parts {
        let verdict = match &p.residual {
            Some(h) if h.passed => format!("pass (max residual {:.2e})", h.max_residual),
            Some(h) => format!("FAIL (max residual {:.2e})", h.max_residual),
            None => "not verified".into(),
        };
        let kind = if p.mass_action { "mass action" } else { "mixed" };
        let _ = writeln!(out, "  part {}: {} [{kind}, {}] {verdict}", p.index, p.reactions.join(" "), p.method);
        if let Some(e) = &p.error {
            let _ = writeln!(out, "    note: {e}");
        }
    }
    if let Some(m) = &report.merged {
        let _ = writeln!(out, "steady states (free: {}):", m.free.join(", "));
        for e in &m.entries {
            let _ = writeln!(out, "  {} = {}", e.species, e.value);
        }
    }
    if !report.acr.is_empty() {
        let acr: Vec<&str> = report.acr.iter().filter(|a| a.acr).map(|a| a.species.as_str()).collect();
        let _ = writeln!(out, "ACR: {}", if acr.is_empty() { "none".to_string() } else { acr.join(", ") });
    }
    if let Some(h) = &report.residual {
        let _ = writeln!(
            out,
            "residual: {} samples, seed {}, max {:.3e}, median {:.3e}, tol {:.0e}: {}",
            h.samples,
            h.seed,
            h.max_residual,
            h.median_residual,
            h.tol,
            if h.passed { "pass" } else { "FAIL" }
        );
    }
    for e in &report.errors {
        let _ = writeln!(out, "error in {}: {}", e.stage, e.message);
    }
    let _ = species;
    out
}

/// Convenience for callers holding only an expression list.
pub fn param_from_pairs(pairs: Vec<(usize, Expr)>, free: Vec<Symbol>) -> Parametrization {
    Parametrization { entries: pairs, free, provenance: "file".into() }
}

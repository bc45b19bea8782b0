use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use pel_core::decision::parent_instantiations;
use pel_core::{
    formula_probability_oracle, id_to_bn, parse_formula, solve_id, validate_id, Diagnostic, Evidence, Formula,
    InfluenceDiagram, PelError, PelModel, Policy,
};
use thiserror::Error;

use crate::document::{apply_uncertainty, load_model, save_document, Diagram, Loaded, ModelDocument};

/// Failures that map to their own exit codes.
#[derive(Debug, Error)]
pub enum CommandError {
    #[error("inconsistent assertion: {0}")]
    InconsistentAssertion(String),
    #[error("fast path {fast} and oracle {oracle} disagree")]
    Disagreement { fast: f64, oracle: f64 },
}

pub struct QueryOptions {
    pub evidence: Vec<String>,
    pub oracle: bool,
    pub check: bool,
    pub explain: bool,
    pub max_states: usize,
}

fn diagnostics_error(diagnostics: &[Diagnostic]) -> anyhow::Error {
    let lines: Vec<String> = diagnostics.iter().map(|d| d.to_string()).collect();
    anyhow!("model is invalid:\n{}", lines.join("\n"))
}

/// Arcs `solve_id` will add to restore no-forgetting.
fn missing_arcs(id: &InfluenceDiagram) -> Vec<String> {
    let mut completed = id.clone();
    completed
        .complete_no_forgetting()
        .into_iter()
        .map(|(from, to)| format!("{} -> {}", id.node(from).name, id.node(to).name))
        .collect()
}

fn solve_diagram(diagram: &Diagram, err: &mut dyn Write) -> Result<Policy> {
    for arc in missing_arcs(&diagram.id) {
        writeln!(err, "warning: added no-forgetting arc {arc}")?;
    }
    solve_id(&diagram.id).map_err(|e| match e {
        pel_core::DecisionError::Invalid(d) => diagnostics_error(&d),
        other => other.into(),
    })
}

/// The network a query runs against: the model itself, or the solved and
/// converted diagram.
fn query_model(loaded: Loaded, err: &mut dyn Write) -> Result<PelModel> {
    let model = match loaded {
        Loaded::Model(model) => model,
        Loaded::Diagram(diagram) => {
            let policy = solve_diagram(&diagram, err)?;
            let net = id_to_bn(&diagram.id, &policy)?;
            let model = PelModel::new(net, diagram.schedule.clone())?;
            apply_uncertainty(model, &diagram.uncertainty).map_err(|m| anyhow!(m))?
        }
    };
    let diagnostics = model.validate_model();
    if !diagnostics.is_empty() {
        return Err(diagnostics_error(&diagnostics));
    }
    Ok(model)
}

fn parse(text: &str) -> Result<Formula> {
    parse_formula(text).with_context(|| format!("cannot parse `{text}`"))
}

/// `VAR=VALUE` assignments as evidence plus the matching conjunction.
fn parse_evidence(model: &PelModel, items: &[String]) -> Result<(Evidence, Option<Formula>)> {
    let mut evidence = Evidence::new();
    let mut conjunction: Option<Formula> = None;
    for item in items {
        let (var, value) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("evidence `{item}` is not of the form VAR=VALUE"))?;
        let (var, value) = (var.trim(), value.trim());
        let id = model.network().id_of(var).ok_or_else(|| PelError::UnknownVariable(var.into()))?;
        if model.is_indicator(id) {
            return Err(PelError::IndicatorInFormula(var.into()).into());
        }
        let index = model.network().variables()[id.index()]
            .value_index(value)
            .ok_or_else(|| PelError::UnknownValue { var: var.into(), value: value.into() })?;
        if !evidence.insert(id, index) {
            bail!("conflicting evidence for `{var}`");
        }
        let atom = Formula::atom(var, value);
        conjunction = Some(match conjunction {
            None => atom,
            Some(c) => Formula::and(c, atom),
        });
    }
    Ok((evidence, conjunction))
}

fn oracle_probability(model: &PelModel, formula: &Formula, given: Option<&Formula>, cap: usize) -> Result<f64> {
    match given {
        None => Ok(formula_probability_oracle(model, formula, cap)?),
        Some(given) => {
            let both = formula_probability_oracle(model, &Formula::and(formula.clone(), given.clone()), cap)?;
            let mass = formula_probability_oracle(model, given, cap)?;
            if mass == 0.0 {
                bail!("evidence has probability zero");
            }
            Ok(both / mass)
        }
    }
}

fn explain(model: &PelModel, formula: &Formula, out: &mut dyn Write) -> Result<()> {
    let net = model.network();
    let mut seen = BTreeSet::new();
    let mut beliefs = Vec::new();
    formula.for_each_subformula(&mut |f| {
        if matches!(f, Formula::BelCond { .. }) && seen.insert(f.to_string()) {
            beliefs.push(f.clone());
        }
    });
    for belief in &beliefs {
        let eta = model.indicator(belief).expect("created by the query");
        let rel: Vec<&str> = net.parents(eta).iter().map(|&p| net.name(p)).collect();
        writeln!(out, "{belief}: Rel = {{{}}}", rel.join(", "))?;
    }
    writeln!(out, "nodes:")?;
    for v in net.variables() {
        writeln!(out, "  {} [{}]", v.name, v.domain.join(", "))?;
    }
    writeln!(out, "edges:")?;
    for child in net.ids() {
        for &p in net.parents(child) {
            writeln!(out, "  {} -> {}", net.name(p), net.name(child))?;
        }
    }
    Ok(())
}

pub fn query(path: &Path, formula: &str, options: &QueryOptions, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let (_, loaded) = load_model(path)?;
    let mut model = query_model(loaded, err)?;
    let formula = parse(formula)?;
    model.bind(&formula)?;
    let (evidence, given) = parse_evidence(&model, &options.evidence)?;
    let fast = if options.oracle && !options.check {
        None
    } else {
        Some(model.query_formula(&formula, &evidence)?)
    };
    let oracle = if options.oracle || options.check {
        Some(oracle_probability(&model, &formula, given.as_ref(), options.max_states)?)
    } else {
        None
    };
    match (fast, oracle) {
        (Some(fast), Some(oracle)) => {
            writeln!(out, "{fast:.6}")?;
            writeln!(out, "oracle {oracle:.6}, difference {:.3e}", (fast - oracle).abs())?;
            if (fast - oracle).abs() > 1e-9 {
                return Err(CommandError::Disagreement { fast, oracle }.into());
            }
        }
        (Some(p), None) | (None, Some(p)) => writeln!(out, "{p:.6}")?,
        (None, None) => unreachable!("at least one path runs"),
    }
    if options.explain {
        if fast.is_none() {
            model.create_node(&formula)?;
        }
        explain(&model, &formula, out)?;
    }
    Ok(())
}

pub fn assert_query(
    path: &Path,
    assertion: &str,
    formula: &str,
    evidence: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let (_, loaded) = load_model(path)?;
    let mut model = query_model(loaded, err)?;
    let assertion = parse(assertion)?;
    let formula = parse(formula)?;
    model.bind(&assertion)?;
    model.bind(&formula)?;
    let (evidence, _) = parse_evidence(&model, evidence)?;
    let combined = match model.assert_formula_onto(&assertion, &evidence) {
        Ok(e) => e,
        Err(PelError::InconsistentAssertion(f)) => return Err(CommandError::InconsistentAssertion(f).into()),
        Err(e) => return Err(e.into()),
    };
    writeln!(out, "{:.6}", model.query_formula(&formula, &combined)?)?;
    Ok(())
}

pub fn solve(path: &Path, export: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let (doc, loaded) = load_model(path)?;
    let Loaded::Diagram(diagram) = loaded else {
        bail!("{} has no decisions or utilities to solve", path.display());
    };
    let policy = solve_diagram(&diagram, err)?;
    let id = &diagram.id;
    for rule in &policy.rules {
        let decision = id.node(rule.decision);
        let parents: Vec<&str> = rule.parents.iter().map(|&p| id.node(p).name.as_str()).collect();
        writeln!(out, "decision {} (observes: {})", decision.name, parents.join(", "))?;
        for (inst, &action) in parent_instantiations(id, &rule.parents).iter().zip(&rule.actions) {
            let condition: Vec<String> = rule
                .parents
                .iter()
                .zip(inst)
                .map(|(&p, &x)| format!("{}={}", id.node(p).name, id.node(p).domain[x]))
                .collect();
            let condition = if condition.is_empty() { "always".to_string() } else { condition.join(", ") };
            writeln!(out, "  {condition} -> {}", decision.domain[action])?;
        }
    }
    writeln!(out, "meu {:.6}", policy.meu)?;
    if let Some(target) = export {
        let net = id_to_bn(id, &policy)?;
        let model = PelModel::new(net, diagram.schedule.clone())?;
        let model = apply_uncertainty(model, &diagram.uncertainty).map_err(|m| anyhow!(m))?;
        let description = Some(format!("Decisions of {} replaced by their optimal rules", path.display()));
        let mut exported = ModelDocument::from_model(&model, description);
        if doc.description.is_some() && exported.description.is_none() {
            exported.description = doc.description.clone();
        }
        save_document(&exported, target).with_context(|| format!("cannot write {}", target.display()))?;
        writeln!(err, "wrote {}", target.display())?;
    }
    Ok(())
}

/// Returns whether the file is clean.
pub fn validate(path: &Path, out: &mut dyn Write) -> Result<bool> {
    let (_, loaded) = load_model(path)?;
    let diagnostics = match &loaded {
        Loaded::Model(model) => model.validate_model(),
        Loaded::Diagram(diagram) => {
            let mut found = validate_id(&diagram.id);
            for (agent, stages) in diagram.schedule.agents() {
                for (i, set) in stages.iter().enumerate() {
                    for name in set {
                        let known = diagram.id.id_of(name).is_some_and(|n| diagram.id.node(n).kind != pel_core::NodeKind::Utility);
                        if !known {
                            found.push(Diagnostic::UnknownVariable {
                                context: format!("observation set of {agent} at stage {}", i + 1),
                                name: name.clone(),
                            });
                        }
                    }
                }
            }
            found.extend(perfect_recall(&diagram.schedule));
            found
        }
    };
    if diagnostics.is_empty() {
        writeln!(out, "OK")?;
        return Ok(true);
    }
    for d in &diagnostics {
        writeln!(out, "{d}")?;
    }
    Ok(false)
}

fn perfect_recall(schedule: &pel_core::ObservationSchedule) -> Vec<Diagnostic> {
    // names are checked separately against the diagram, so validate
    // against an empty network and keep only the recall findings
    schedule
        .validate(&pel_core::Network::new())
        .into_iter()
        .filter(|d| matches!(d, Diagnostic::PerfectRecall { .. }))
        .collect()
}

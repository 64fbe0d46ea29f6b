use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use fusion_slp::fusion::{normalize, parse_agent, reductions, Agent, ReductionLabel};
use fusion_slp::fusion2hshr::{interleaving_admit, translate_with_productions, FusionProductions, ProductionOptions};
use fusion_slp::hshr::{
    admit_all, derive_transition, enumerate_transitions, parse_hg_file, parse_new_nodes, print_hg_file, to_dot, Choice,
    DeriveOptions, EnumOptions, Judgement, Production, Transition,
};
use fusion_slp::hshr2slp::{
    check_correspondence, choices_for, translate_judgement, translate_productions, ClauseOptions,
};
use fusion_slp::oracles::{check_process, productions_for_graph, theorem_sweep, SweepConfig};
use fusion_slp::slp::{big_steps, big_steps_with, parse_slp, BigStep, BigStepOptions, Goal, Program};
use serde_json::{json, Value};

use crate::error::CliError;

pub const SCHEMA: u32 = 1;

/// Settings shared by all subcommands.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub seed: u64,
    pub bound: Option<usize>,
    pub nonempty: bool,
    pub no_chain_collapse: bool,
    pub literal_translation: bool,
    pub foo: bool,
}

impl Settings {
    fn production_options(&self) -> ProductionOptions {
        ProductionOptions { collapse_chains: !(self.no_chain_collapse || self.literal_translation) }
    }

    fn clause_options(&self) -> ClauseOptions {
        ClauseOptions { foo_convention: self.foo && !self.literal_translation }
    }

    fn enum_options(&self) -> EnumOptions {
        let mut o = EnumOptions::default();
        if let Some(b) = self.bound {
            o.max_choice_maps = b;
        }
        o.derive = DeriveOptions { fresh_seed: self.seed as u32 };
        o
    }

    fn big_step_options(&self) -> BigStepOptions {
        let mut o = BigStepOptions { nonempty: self.nonempty, ..BigStepOptions::default() };
        if let Some(b) = self.bound {
            o.max_selections = b;
        }
        o
    }
}

/// What a subcommand produced. `ok` is false when a check failed.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub ok: bool,
}

impl Report {
    fn new(text: String, json: Value) -> Report {
        Report { text, json, ok: true }
    }
}

enum Input {
    Process(Agent),
    Graph { graph: Judgement, productions: Vec<Arc<Production>> },
    Program { program: Program, goals: Vec<Goal> },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn parse_error(path: &Path, e: impl ToString) -> CliError {
    CliError::Parse { path: path.to_path_buf(), message: e.to_string() }
}

fn load(path: &Path) -> Result<Input, CliError> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default();
    match ext {
        "fu" => Ok(Input::Process(parse_agent(&read(path)?).map_err(|e| parse_error(path, e))?)),
        "hg" => {
            let f = parse_hg_file(&read(path)?).map_err(|e| parse_error(path, e))?;
            Ok(Input::Graph { graph: f.graph.unwrap_or_default(), productions: f.productions })
        }
        "slp" => {
            let f = parse_slp(&read(path)?).map_err(|e| parse_error(path, e))?;
            Ok(Input::Program { program: f.program, goals: f.goals })
        }
        _ => Err(CliError::UnknownExtension(path.to_path_buf())),
    }
}

fn wrong(path: &Path, what: &'static str, command: &'static str) -> CliError {
    CliError::WrongKind { path: path.to_path_buf(), what, command }
}

fn load_process(path: &Path, command: &'static str) -> Result<Agent, CliError> {
    match load(path)? {
        Input::Process(a) => Ok(a),
        Input::Graph { .. } => Err(wrong(path, "a graph", command)),
        Input::Program { .. } => Err(wrong(path, "a program", command)),
    }
}

/// A graph and its productions, translating a process first if needed.
/// Processes bring the productions of the translation.
struct Rewriting {
    graph: Judgement,
    productions: Vec<Arc<Production>>,
    from_process: bool,
}

fn load_rewriting(path: &Path, s: &Settings, command: &'static str) -> Result<Rewriting, CliError> {
    match load(path)? {
        Input::Process(a) => {
            let (graph, src) = translate(&a, s, path)?;
            let productions = productions_for_graph(&graph, &src);
            Ok(Rewriting { graph, productions, from_process: true })
        }
        Input::Graph { graph, productions } => Ok(Rewriting { graph, productions, from_process: false }),
        Input::Program { .. } => Err(wrong(path, "a program", command)),
    }
}

fn translate(a: &Agent, s: &Settings, path: &Path) -> Result<(Judgement, FusionProductions), CliError> {
    translate_with_productions(a, s.production_options()).map_err(|e| parse_error(path, e))
}

fn label_text(l: &ReductionLabel) -> String {
    match l {
        ReductionLabel::Comm { input, output } => {
            format!("comm input {}.{} output {}.{}", input.0 + 1, input.1 + 1, output.0 + 1, output.1 + 1)
        }
        ReductionLabel::Fusion { at } => format!("fusion {}.{}", at.0 + 1, at.1 + 1),
    }
}

pub fn fusion_reduce(path: &Path) -> Result<Report, CliError> {
    let a = load_process(path, "fusion-reduce")?;
    let nf = normalize(&a).map_err(|e| parse_error(path, e))?;
    let rs = reductions(&nf);
    let mut text = String::new();
    let mut items = Vec::new();
    for r in &rs {
        let _ = writeln!(text, "{}: {}", label_text(&r.label), r.result);
        let effect: BTreeMap<String, String> = r.effect.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        items.push(json!({ "label": label_text(&r.label), "effect": effect, "result": r.result.to_string() }));
    }
    Ok(Report::new(text, json!({ "process": a.to_string(), "normal_form": nf.to_string(), "reductions": items })))
}

pub fn fusion2hshr(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let a = load_process(path, "fusion2hshr")?;
    let (g, src) = translate(&a, s, path)?;
    let prods = productions_for_graph(&g, &src);
    let text = print_hg_file(Some(&g), &prods);
    let json = json!({
        "graph": g.to_string(),
        "productions": prods.iter().map(|p| named(p)).collect::<Vec<_>>(),
    });
    Ok(Report::new(text, json))
}

fn named(p: &Production) -> String {
    match &p.name {
        Some(n) => format!("{n}: {p}"),
        None => p.to_string(),
    }
}

fn provenance(t: &Transition) -> Vec<String> {
    t.provenance
        .iter()
        .flatten()
        .map(|c| match c {
            Choice::Idle => "idle".to_string(),
            Choice::Use(p) => p.name.clone().unwrap_or_else(|| "?".into()),
        })
        .collect()
}

fn transition_json(t: &Transition) -> Value {
    json!({
        "source": t.source.to_string(),
        "label": t.label.to_string(),
        "target": t.target.to_string(),
        "productions": provenance(t),
    })
}

fn transition_text(t: &Transition) -> String {
    format!("[{}] --[{}]--> {}", provenance(t).join(", "), t.label, t.target)
}

/// Parses `0,-,1`: a production index per edge, `-` for idle.
fn parse_selection(src: &str, edges: usize) -> Result<Vec<Option<usize>>, CliError> {
    let sel: Vec<Option<usize>> = src
        .split(',')
        .map(|p| match p.trim() {
            "-" => Ok(None),
            n => n.parse().map(Some).map_err(|_| CliError::Invalid(format!("bad selection entry `{n}`"))),
        })
        .collect::<Result<_, _>>()?;
    if sel.len() != edges {
        return Err(CliError::Invalid(format!("selection has {} entries for {edges} edges", sel.len())));
    }
    Ok(sel)
}

pub struct StepArgs<'a> {
    pub select: Option<&'a str>,
    pub interleaving: bool,
    pub isolated: Option<&'a str>,
}

pub fn hshr_step(path: &Path, s: &Settings, args: StepArgs<'_>) -> Result<Report, CliError> {
    let rw = load_rewriting(path, s, "hshr-step")?;
    let new_nodes = match args.isolated {
        Some(src) => parse_new_nodes(src).map_err(|e| CliError::Invalid(format!("--isolated: {e}")))?,
        None => BTreeMap::new(),
    };
    let filter = args.interleaving || rw.from_process;
    let transitions = match args.select {
        Some(sel) => {
            let sel = parse_selection(sel, rw.graph.edges.len())?;
            if let Some(k) = sel.iter().flatten().find(|k| **k >= rw.productions.len()) {
                return Err(CliError::Invalid(format!("no production {k}")));
            }
            let choices = choices_for(&sel, &rw.productions);
            let opts = DeriveOptions { fresh_seed: s.seed as u32 };
            match derive_transition(&rw.graph, &choices, &new_nodes, opts) {
                Ok(t) => vec![t],
                Err(e) => {
                    let text = format!("no transition: {e}\n");
                    return Ok(Report { text, json: json!({ "transitions": [], "error": e.to_string() }), ok: false });
                }
            }
        }
        None => {
            if !new_nodes.is_empty() {
                return Err(CliError::Invalid("--isolated needs --select".into()));
            }
            let en = if filter {
                enumerate_transitions(&rw.graph, &rw.productions, &interleaving_admit, s.enum_options())
            } else {
                enumerate_transitions(&rw.graph, &rw.productions, &admit_all, s.enum_options())
            };
            if en.incomplete {
                return Err(CliError::Invalid("transition enumeration hit its bound; raise --bound".into()));
            }
            en.transitions
        }
    };
    let mut text = format!("source {}\n", rw.graph);
    for t in &transitions {
        let _ = writeln!(text, "{}", transition_text(t));
    }
    let json = json!({
        "source": rw.graph.to_string(),
        "interleaving": filter,
        "transitions": transitions.iter().map(transition_json).collect::<Vec<_>>(),
    });
    Ok(Report::new(text, json))
}

pub fn hshr2slp(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let rw = load_rewriting(path, s, "hshr2slp")?;
    let program = translate_productions(&rw.productions, s.clause_options()).map_err(|e| parse_error(path, e))?;
    let goal = translate_judgement(&rw.graph);
    let mut text = program.to_string();
    let query = if goal.is_empty() { "?- .".to_string() } else { format!("?- {goal}.") };
    let _ = writeln!(text, "{query}");
    let json = json!({
        "clauses": program.clauses.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "goal": goal.to_string(),
    });
    Ok(Report::new(text, json))
}

pub fn check(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let rw = load_rewriting(path, s, "check")?;
    let en = if rw.from_process {
        enumerate_transitions(&rw.graph, &rw.productions, &interleaving_admit, s.enum_options())
    } else {
        enumerate_transitions(&rw.graph, &rw.productions, &admit_all, s.enum_options())
    };
    if en.incomplete {
        return Err(CliError::Invalid("transition enumeration hit its bound; raise --bound".into()));
    }
    let mut text = String::new();
    let mut items = Vec::new();
    let mut ok = true;
    for t in &en.transitions {
        let r = check_correspondence(t, &rw.productions);
        ok &= r.passed();
        let verdict = if r.passed() { "ok" } else { "FAIL" };
        let _ = writeln!(text, "{verdict} {}", transition_text(t));
        match (&r.witness, &r.counterexample) {
            (Some(w), _) if r.passed() => {
                let _ = writeln!(text, "  theta {}", w.theta);
                let _ = writeln!(text, "  end {}", w.end);
            }
            (_, Some(c)) => {
                let _ = writeln!(text, "  {c}");
            }
            _ => {}
        }
        items.push(json!({ "transition": transition_json(t), "report": r }));
    }
    let _ = writeln!(text, "{} transitions, {}", en.transitions.len(), if ok { "all correspond" } else { "mismatch" });
    Ok(Report { text, json: json!({ "passed": ok, "transitions": items }), ok })
}

fn big_step_text(b: &BigStep) -> String {
    let sel: Vec<String> = b.selection.iter().map(|c| c.map_or("-".to_string(), |k| k.to_string())).collect();
    let theta = if b.theta.is_empty() { "{}".to_string() } else { b.theta.to_string() };
    format!("[{}] theta {theta} end {}", sel.join(","), b.end)
}

pub fn slp_bigstep(path: &Path, s: &Settings, select: Option<&str>) -> Result<Report, CliError> {
    let (program, goals) = match load(path)? {
        Input::Program { program, goals } => (program, goals),
        Input::Process(_) => return Err(wrong(path, "a process", "slp-bigstep")),
        Input::Graph { .. } => return Err(wrong(path, "a graph", "slp-bigstep")),
    };
    if goals.is_empty() {
        return Err(CliError::Invalid(format!("{}: no query", path.display())));
    }
    let mut text = String::new();
    let mut items = Vec::new();
    for g in &goals {
        let sel = select.map(|src| parse_selection(src, g.len())).transpose()?;
        let bs = big_steps(g, &program, sel.as_deref(), s.big_step_options())
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        let _ = writeln!(text, "?- {g}.");
        for b in &bs {
            let _ = writeln!(text, "{}", big_step_text(b));
        }
        items.push(json!({ "goal": g.to_string(), "big_steps": bs }));
    }
    Ok(Report::new(text, json!({ "queries": items })))
}

pub fn pipeline(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let a = load_process(path, "pipeline")?;
    let nf = normalize(&a).map_err(|e| parse_error(path, e))?;
    let rs = reductions(&nf);
    let (g, src) = translate(&a, s, path)?;
    let prods = productions_for_graph(&g, &src);
    let en = enumerate_transitions(&g, &prods, &interleaving_admit, s.enum_options());
    let program = translate_productions(&prods, s.clause_options()).map_err(|e| parse_error(path, e))?;
    let start = translate_judgement(&g);
    let admit = |sel: &[Option<usize>], complete: bool| {
        let ch = choices_for(sel, &prods);
        let partial: Vec<Option<&Choice>> = ch.iter().map(Some).collect();
        interleaving_admit(&partial, complete)
    };
    let opts = BigStepOptions { nonempty: true, ..s.big_step_options() };
    let bs = big_steps_with(&start, &program, None, &admit, opts).map_err(|e| CliError::Invalid(e.to_string()))?;
    let verdict = check_process(0, &a);

    let mut text = String::new();
    let _ = writeln!(text, "process {a}");
    let _ = writeln!(text, "normal form {nf}");
    for r in &rs {
        let _ = writeln!(text, "reduction {}: {}", label_text(&r.label), r.result);
    }
    let _ = writeln!(text, "graph {g}");
    for t in &en.transitions {
        let _ = writeln!(text, "transition {}", transition_text(t));
    }
    for c in &program.clauses {
        let _ = writeln!(text, "clause {c}");
    }
    let _ = writeln!(text, "goal {start}");
    for b in &bs {
        let _ = writeln!(text, "big-step {}", big_step_text(b));
    }
    match &verdict.counterexample {
        None => {
            let _ = writeln!(
                text,
                "check ok: {} reductions, {} transitions, {} big-steps correspond",
                verdict.reductions, verdict.transitions, verdict.big_steps
            );
        }
        Some(c) => {
            let _ = writeln!(text, "check FAILED ({}): {}", c.relation, c.detail);
        }
    }
    let json = json!({
        "process": a.to_string(),
        "normal_form": nf.to_string(),
        "reductions": rs.iter().map(|r| json!({ "label": label_text(&r.label), "result": r.result.to_string() })).collect::<Vec<_>>(),
        "graph": g.to_string(),
        "transitions": en.transitions.iter().map(transition_json).collect::<Vec<_>>(),
        "clauses": program.clauses.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "goal": start.to_string(),
        "big_steps": bs,
        "verdict": verdict,
    });
    Ok(Report { text, json, ok: verdict.ok })
}

pub fn sweep(s: &Settings, count: usize, cfg: SweepConfig) -> Report {
    let cfg = SweepConfig { seed: s.seed, ..cfg };
    let r = theorem_sweep(&cfg, count);
    let mut text = String::new();
    for v in r.verdicts.iter().filter(|v| !v.ok) {
        let c = v.counterexample.as_ref().expect("failed verdicts carry a counterexample");
        let _ = writeln!(text, "counterexample #{} {}: {} ({})", v.index, v.process, c.detail, c.relation);
        for line in &c.trace {
            let _ = writeln!(text, "  {line}");
        }
    }
    let _ = writeln!(
        text,
        "{} processes, {} reductions, {} transitions, {} big-steps, {} counterexamples",
        r.instances, r.reductions, r.transitions, r.big_steps, r.counterexamples
    );
    let ok = r.counterexamples == 0;
    Report { text, json: serde_json::to_value(&r).expect("reports serialize"), ok }
}

pub fn dot(path: &Path, s: &Settings) -> Result<Report, CliError> {
    let rw = load_rewriting(path, s, "dot")?;
    let title = path.file_stem().and_then(|x| x.to_str()).unwrap_or("graph");
    let text = to_dot(&rw.graph, title);
    Ok(Report::new(text.clone(), json!({ "dot": text })))
}

pub fn input_path(p: &str) -> PathBuf {
    PathBuf::from(p)
}

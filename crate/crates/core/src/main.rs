use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use theta_merge::bud_systems::{BudSystem, Membership};
use theta_merge::criterion::{criterion_report, is_balanced, render_balance};
use theta_merge::syntax::{
    fully_colored, parse_colored, parse_colored_workspace, parse_so, parse_workspace, print_colored,
    print_colored_workspace, print_so, print_workspace,
};
use theta_merge::workspace_engine::{
    coproduct, equivalence_harness, event_line_colored, event_line_free, explore, initial_colored, initial_free,
    markov_step_colored, markov_step_free, HeadPolicy, MergeKind, Xi, DEFAULT_GUARD,
};
use theta_merge::{Error, Lexicon, Mode, Result, RoleInventory, Workspace};

#[derive(Parser)]
#[command(name = "theta-merge", version, about = "Theta-role coloring of Merge-built syntactic objects")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Lexicon file (JSON).
    #[arg(long, global = true)]
    lexicon: Option<String>,
    /// Tree or workspace: a file path or inline text.
    #[arg(long, global = true)]
    tree: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Complete)]
    mode: ModeArg,
    #[arg(long, global = true, default_value_t = 2)]
    depth: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_GUARD)]
    guard: usize,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Work on colored trees and colored Merge.
    #[arg(long, global = true)]
    colored: bool,
    /// Head choice for free Merge.
    #[arg(long, global = true, value_enum, default_value_t = HeadArg::Default)]
    head: HeadArg,
}

#[derive(Subcommand)]
enum Cmd {
    /// Membership in the complete language, with the rule used at each vertex.
    CheckComplete,
    /// Membership in the bare language, with the rule used at each vertex.
    CheckBare,
    /// The theta criterion on a colored tree.
    Criterion,
    /// Balanced theta structure check with the projection pieces.
    Balance,
    /// All colorings of an uncolored tree.
    Color,
    /// Coproduct terms with both quotients.
    Coproduct,
    /// All Merge events from a workspace.
    Step,
    /// Reachable workspaces by depth; `--walk N` takes a random walk instead.
    Explore {
        #[arg(long)]
        walk: Option<usize>,
    },
    /// Compare colored Merge with free Merge followed by coloring.
    Equiv,
    /// The rule table.
    Rules,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Bare,
    Complete,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeadArg {
    Default,
    Both,
}

enum Fail {
    Verdict,
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

type Out = std::result::Result<(), Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Verdict) => ExitCode::from(1),
        Err(Fail::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Guard(_) => ExitCode::from(3),
                Error::Parse { .. } | Error::Lexicon(_) | Error::Selector(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn input(text: &str) -> Result<String> {
    if Path::new(text).is_file() {
        std::fs::read_to_string(text).map_err(|e| Error::Lexicon(format!("{text}: {e}")))
    } else {
        Ok(text.to_string())
    }
}

impl Cli {
    fn lex(&self) -> Result<Lexicon> {
        match &self.lexicon {
            Some(p) => Lexicon::load(p),
            None => Err(Error::Lexicon("--lexicon is required".into())),
        }
    }

    fn lex_opt(&self) -> Result<Option<Lexicon>> {
        self.lexicon.as_ref().map(Lexicon::load).transpose()
    }

    fn tree_text(&self) -> Result<String> {
        match &self.tree {
            Some(t) => input(t),
            None => Err(Error::parse(0, "--tree is required")),
        }
    }

    fn mode(&self) -> Mode {
        match self.mode {
            ModeArg::Bare => Mode::Bare,
            ModeArg::Complete => Mode::Complete,
        }
    }

    fn policy(&self) -> HeadPolicy {
        match self.head {
            HeadArg::Default => HeadPolicy::Default,
            HeadArg::Both => HeadPolicy::Both,
        }
    }

    fn emit(&self, text: String, value: Value) {
        match self.format {
            Format::Text => print!("{text}"),
            Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json")),
        }
    }
}

fn verdict(ok: bool) -> Out {
    if ok {
        Ok(())
    } else {
        Err(Fail::Verdict)
    }
}

fn membership_text(m: &Membership) -> String {
    let mut s = format!("member: {}\n", m.member);
    for st in &m.steps {
        let p: String = st.path.iter().map(|i| format!("/{i}")).collect();
        s.push_str(&format!(
            "  {:<6} {:?}{}\n",
            if p.is_empty() { "/".into() } else { p },
            st.family,
            st.note.as_ref().map(|n| format!(" ({n})")).unwrap_or_default()
        ));
    }
    if let Some(r) = &m.reason {
        s.push_str(&format!("reason: {r}\n"));
    }
    s
}

fn membership_json(m: &Membership) -> Value {
    json!({
        "member": m.member,
        "reason": m.reason,
        "steps": m.steps.iter().map(|s| json!({"path": s.path, "family": format!("{:?}", s.family), "note": s.note})).collect::<Vec<_>>(),
    })
}

fn run(cli: &Cli) -> Out {
    match &cli.cmd {
        Cmd::CheckComplete | Cmd::CheckBare => {
            let lex = cli.lex()?;
            let mode = if matches!(cli.cmd, Cmd::CheckBare) { Mode::Bare } else { Mode::Complete };
            let t = fully_colored(&parse_colored(&cli.tree_text()?, &lex)?)?;
            let sys = BudSystem::new(lex, mode);
            let m = sys.membership(&t);
            let tree = print_colored(&t, sys.lex.inventory());
            cli.emit(format!("tree: {tree}\n{}", membership_text(&m)), json!({"tree": tree, "membership": membership_json(&m)}));
            verdict(m.member)
        }
        Cmd::Criterion => {
            let lex = cli.lex()?;
            let t = fully_colored(&parse_colored(&cli.tree_text()?, &lex)?)?;
            let r = criterion_report(&t);
            let inv = lex.inventory();
            let recv: Vec<&str> = r.receivers.iter().map(|x| inv.name(*x)).collect();
            let grid: Option<Vec<&str>> = r.grid.as_ref().map(|g| g.iter().map(|x| inv.name(*x)).collect());
            let mut text = format!(
                "criterion: {}\ngrid: {}\nreceivers: [{}]\n",
                r.holds,
                grid.as_ref().map(|g| format!("[{}]", g.join(","))).unwrap_or_else(|| "-".into()),
                recv.join(",")
            );
            if let Some(x) = &r.reason {
                text.push_str(&format!("reason: {x}\n"));
            }
            cli.emit(text, json!({"holds": r.holds, "grid": grid, "receivers": recv, "reason": r.reason}));
            verdict(r.holds)
        }
        Cmd::Balance => {
            let lex = cli.lex()?;
            let t = fully_colored(&parse_colored(&cli.tree_text()?, &lex)?)?;
            let sys = BudSystem::new(lex, Mode::Complete);
            let r = is_balanced(&sys, &t);
            let inv = sys.lex.inventory();
            let value = json!({
                "balanced": r.balanced,
                "membership": membership_json(&r.membership),
                "components": r.components.iter().map(|c| json!({
                    "tree": print_colored(&c.tree, inv), "passes": c.passes, "reason": c.reason,
                })).collect::<Vec<_>>(),
                "residue": r.residue.iter().map(|l| print_colored(l, inv)).collect::<Vec<_>>(),
            });
            cli.emit(render_balance(&r, inv), value);
            verdict(r.balanced)
        }
        Cmd::Color => {
            let lex = cli.lex()?;
            let t = parse_so(&cli.tree_text()?, Some(&lex))?;
            let sys = BudSystem::new(lex, cli.mode());
            let all = if t.is_leaf() { sys.leaf_colorings(&t) } else { sys.color_search(&t) };
            let inv = sys.lex.inventory();
            let lines: Vec<String> = all.iter().map(|x| print_colored(x, inv)).collect();
            let mut text = format!("{} coloring(s) of {}\n", lines.len(), print_so(&t));
            for l in &lines {
                text.push_str(&format!("{l}\n"));
            }
            cli.emit(text, json!({"tree": print_so(&t), "colorings": lines}));
            Ok(())
        }
        Cmd::Coproduct => {
            let text = cli.tree_text()?;
            let (terms, rendered): (usize, Vec<[String; 3]>) = if cli.colored {
                let lex = cli.lex()?;
                let t = fully_colored(&parse_colored(&text, &lex)?)?;
                let inv = lex.inventory();
                let terms = coproduct(&t, cli.guard)?;
                let show = |x: &Option<_>| x.as_ref().map(|y| print_colored(y, inv)).unwrap_or_else(|| "1".into());
                (
                    terms.len(),
                    terms
                        .iter()
                        .map(|c| {
                            let left: Vec<String> = c.left.iter().map(|x| print_colored(x, inv)).collect();
                            [left.join(" "), show(&c.right_deletion), show(&c.right_contraction)]
                        })
                        .collect(),
                )
            } else {
                let lex = cli.lex_opt()?;
                let t = parse_so(&text, lex.as_ref())?;
                let terms = coproduct(&t, cli.guard)?;
                let show = |x: &Option<_>| x.as_ref().map(print_so).unwrap_or_else(|| "1".into());
                (
                    terms.len(),
                    terms
                        .iter()
                        .map(|c| {
                            let left: Vec<String> = c.left.iter().map(print_so).collect();
                            [left.join(" "), show(&c.right_deletion), show(&c.right_contraction)]
                        })
                        .collect(),
                )
            };
            let mut out = format!("{terms} term(s)\n");
            for [l, d, c] in &rendered {
                let l = if l.is_empty() { "1" } else { l.as_str() };
                out.push_str(&format!("{l} | {d} | {c}\n"));
            }
            let value = json!({
                "terms": rendered.iter().map(|[l, d, c]| json!({"left": l, "deletion": d, "contraction": c})).collect::<Vec<_>>(),
            });
            cli.emit(out, value);
            Ok(())
        }
        Cmd::Step => {
            let text = cli.tree_text()?;
            let mut lines = Vec::new();
            let mut results = Vec::new();
            if cli.colored {
                let lex = cli.lex()?;
                let ws = parse_colored_workspace(&text, &lex)?;
                let sys = BudSystem::new(lex, Mode::Complete);
                let xi = Xi::new(&sys);
                let inv = sys.lex.inventory();
                for e in markov_step_colored(&ws, &xi, cli.guard)? {
                    lines.push(event_line_colored(&e, inv));
                    results.push(print_colored_workspace(&e.result, inv));
                }
            } else {
                let lex = cli.lex_opt()?;
                let ws = parse_workspace(&text, lex.as_ref())?;
                for e in markov_step_free(&ws, cli.policy(), lex.as_ref(), cli.guard)? {
                    lines.push(event_line_free(&e));
                    results.push(print_workspace(&e.result));
                }
            }
            let mut out = format!("{} event(s)\n", lines.len());
            for (l, r) in lines.iter().zip(&results) {
                out.push_str(&format!("{l}\n  {r}\n"));
            }
            let value = json!({"events": lines.iter().zip(&results).map(|(l, r)| json!({"event": l, "result": r})).collect::<Vec<_>>()});
            cli.emit(out, value);
            Ok(())
        }
        Cmd::Explore { walk } => explore_cmd(cli, *walk),
        Cmd::Equiv => {
            let sys = BudSystem::new(cli.lex()?, Mode::Complete);
            let r = equivalence_harness(&sys, cli.depth, cli.guard)?;
            let inv = sys.lex.inventory();
            let mut out = format!(
                "depth: {}\nbuilt: {} workspace(s), {} component(s)\nfiltered: {} workspace(s)\nfree workspaces: {} ({} without a coloring)\nequal: {}\n",
                r.depth,
                r.built.len(),
                r.built_components().len(),
                r.filtered.len(),
                r.free_workspaces,
                r.rejected,
                r.equal()
            );
            for w in &r.only_built {
                out.push_str(&format!("only built: {}\n", print_colored_workspace(w, inv)));
            }
            for w in &r.only_filtered {
                out.push_str(&format!("only filtered: {}\n", print_colored_workspace(w, inv)));
            }
            let kinds = |m: &BTreeMap<MergeKind, usize>| m.iter().map(|(k, v)| (format!("{k:?}"), *v)).collect::<BTreeMap<_, _>>();
            let value = json!({
                "depth": r.depth,
                "built": r.built.len(),
                "filtered": r.filtered.len(),
                "equal": r.equal(),
                "free_workspaces": r.free_workspaces,
                "rejected": r.rejected,
                "only_built": r.only_built.iter().map(|w| print_colored_workspace(w, inv)).collect::<Vec<_>>(),
                "only_filtered": r.only_filtered.iter().map(|w| print_colored_workspace(w, inv)).collect::<Vec<_>>(),
                "free_events": kinds(&r.free_events),
                "colored_events": kinds(&r.colored_events),
            });
            cli.emit(out, value);
            verdict(r.equal())
        }
        Cmd::Rules => {
            let sys = BudSystem::new(cli.lex()?, cli.mode());
            let inv = sys.lex.inventory();
            let rules = sys.enumerate_rules(None);
            let mut out = format!("{} rule(s)\n", rules.len());
            let mut rows = Vec::new();
            for r in &rules {
                let root = match &r.root {
                    theta_merge::bud_systems::RootPat::Any => "any initial".to_string(),
                    theta_merge::bud_systems::RootPat::Color(c) => c.show(inv),
                };
                let tree = show_rule_tree(&r.tree, inv);
                out.push_str(&format!("{:?}: {root} -> {tree}\n", r.family));
                rows.push(json!({"family": format!("{:?}", r.family), "root": root, "tree": tree}));
            }
            cli.emit(out, json!({"rules": rows}));
            Ok(())
        }
    }
}

fn show_rule_tree(t: &theta_merge::ColoredTree, inv: &RoleInventory) -> String {
    print_colored(t, inv)
}

fn explore_cmd(cli: &Cli, walk: Option<usize>) -> Out {
    let guard = cli.guard;
    if cli.colored {
        let lex = cli.lex()?;
        let start = match &cli.tree {
            Some(t) => vec![parse_colored_workspace(&input(t)?, &lex)?],
            None => initial_colored(&BudSystem::new(lex.clone(), Mode::Complete)),
        };
        let sys = BudSystem::new(lex, Mode::Complete);
        let xi = Xi::new(&sys);
        let inv = sys.lex.inventory().clone();
        if let Some(n) = walk {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut ws = start.choose(&mut rng).cloned().ok_or_else(|| Error::Rejected("no start".into()))?;
            let mut out = format!("start {}\n", print_colored_workspace(&ws, &inv));
            let mut lines = Vec::new();
            for _ in 0..n {
                let ev = markov_step_colored(&ws, &xi, guard)?;
                let Some(e) = ev.choose(&mut rng) else { break };
                lines.push(event_line_colored(e, &inv));
                ws = e.result.clone();
            }
            for l in &lines {
                out.push_str(&format!("{l}\n"));
            }
            let end = print_colored_workspace(&ws, &inv);
            out.push_str(&format!("end {end}\n"));
            cli.emit(out, json!({"events": lines, "end": end}));
            return Ok(());
        }
        let layers = explore(start, cli.depth, guard, &|w| {
            Ok(markov_step_colored(w, &xi, guard)?.into_iter().map(|e| e.result).collect())
        })?;
        report_layers(cli, &layers);
    } else {
        let lex = cli.lex_opt()?;
        let start = match (&cli.tree, &lex) {
            (Some(t), _) => parse_workspace(&input(t)?, lex.as_ref())?,
            (None, Some(l)) => initial_free(l),
            (None, None) => return Err(Error::parse(0, "--tree or --lexicon is required").into()),
        };
        let policy = cli.policy();
        if let Some(n) = walk {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut ws = start;
            let mut out = format!("start {}\n", print_workspace(&ws));
            let mut lines = Vec::new();
            for _ in 0..n {
                let ev = markov_step_free(&ws, policy, lex.as_ref(), guard)?;
                let Some(e) = ev.choose(&mut rng) else { break };
                lines.push(event_line_free(e));
                ws = e.result.clone();
            }
            for l in &lines {
                out.push_str(&format!("{l}\n"));
            }
            let end = print_workspace(&ws);
            out.push_str(&format!("end {end}\n"));
            cli.emit(out, json!({"events": lines, "end": end}));
            return Ok(());
        }
        let layers = explore(vec![start], cli.depth, guard, &|w| {
            Ok(markov_step_free(w, policy, lex.as_ref(), guard)?.into_iter().map(|e| e.result).collect())
        })?;
        report_layers(cli, &layers);
    }
    Ok(())
}

fn report_layers<C>(cli: &Cli, layers: &[std::collections::BTreeSet<Workspace<C>>])
where
    C: theta_merge::so_core::Decor,
{
    let mut out = String::new();
    let mut rows = Vec::new();
    let mut total = 0;
    for (d, l) in layers.iter().enumerate() {
        total += l.len();
        let comps: usize = l.iter().map(|w| w.len()).sum();
        out.push_str(&format!("depth {d}: {} new workspace(s), {comps} component(s)\n", l.len()));
        rows.push(json!({"depth": d, "workspaces": l.len(), "components": comps}));
    }
    out.push_str(&format!("total: {total}\n"));
    cli.emit(out, json!({"layers": rows, "total": total}));
}

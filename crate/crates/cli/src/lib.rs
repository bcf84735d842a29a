//! The `mtw` command line: file-based front ends to the workbench and the
//! game server.
//!
//! Exit status: 0 on success, 1 on a negative verdict (not entailed,
//! Spoiler wins, a satisfiable set handed to the prover, ...), 2 on usage
//! and input errors.

pub mod server;
pub mod session;

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mtw_core::games::{
    ef_solve, efq_solve, efq_symbolic, shelah_solve_with, ColorRange, GameError, GameResult, Player,
};
use mtw_core::interpolation::{
    beth, craig, craig_sorted, robinson_join, separate, BethResult, Check, InterpolantReport, InterpolationBounds,
    InterpolationResult, PcClass, RobinsonInput, RobinsonResult, SeparationResult,
};
use mtw_core::semantics::{
    entails_bounded, hintikka_rank_formula, rank_classes, satisfies_sentence, EntailOptions, EntailmentVerdict,
};
use mtw_core::structures::{parse_structure, parse_symbolic, Structure};
use mtw_core::syntax::{declarations, parse_formula_file, Formula, FormulaFile, SortSet, Vocabulary};
use mtw_core::tableau::{check_hintikka, parse_hintikka, prove, term_model, TableauBounds, TableauVerdict};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "mtw", version, about = "Many-sorted model-theory workbench")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug, Clone, Copy)]
struct Bounds {
    /// Deepest term a tableau branch may contain.
    #[arg(long, default_value_t = 4)]
    term_depth: usize,
    /// Branches a tableau may open.
    #[arg(long, default_value_t = 2000)]
    branch_limit: usize,
    /// Longest chain of witness constants.
    #[arg(long, default_value_t = 4)]
    witness_depth: usize,
    /// Elements per sort for model search and bounded entailment.
    #[arg(long, default_value_t = 3)]
    bound: usize,
}

impl Bounds {
    fn tableau(self) -> TableauBounds {
        TableauBounds {
            term_depth: self.term_depth,
            branch_limit: self.branch_limit,
            model_size_cap: self.bound,
            witness_depth: self.witness_depth,
        }
    }

    fn interpolation(self) -> InterpolationBounds {
        InterpolationBounds {
            tableau: self.tableau(),
            entail_bound: self.bound,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FileKind {
    Formula,
    Structure,
    Symbolic,
    Hintikka,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Colors {
    Full,
    Clock,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum RoleArg {
    Spoiler,
    Duplicator,
}

#[derive(Args, Debug, Clone)]
struct Play {
    /// Play interactively against the engine, one JSON move per line on stdin.
    #[arg(long)]
    play: bool,
    /// The human's role in `--play`.
    #[arg(long = "as", value_enum, default_value_t = RoleArg::Spoiler)]
    role: RoleArg,
    /// Print the winner's strategy, one `state => move` JSON line per state.
    #[arg(long)]
    strategy: bool,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Parse a file and print it back in normal form.
    Parse {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "as", value_enum, default_value_t = FileKind::Formula)]
        kind: FileKind,
    },
    /// Evaluate every sentence of a formula file in a structure.
    Check {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Bounded entailment: the `[conclusion]` section (or the last formula)
    /// from the other formulas.
    Entails {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// The rank-n characteristic sentence of a structure.
    HintikkaFormula {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        rank: usize,
    },
    /// Partition structures by rank-n elementary equivalence.
    Classes {
        #[arg(long, num_args = 1.., required = true)]
        structures: Vec<PathBuf>,
        #[arg(long)]
        rank: usize,
    },
    /// The Ehrenfeucht–Fraïssé game.
    Ef {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        rounds: usize,
        #[command(flatten)]
        play: Play,
    },
    /// The game with threshold set moves.
    Efq {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        play: Play,
    },
    /// The Q-game on symbolic equivalence structures.
    EfqSym {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        alpha: u32,
        #[command(flatten)]
        play: Play,
    },
    /// The clocked game with colored challenges.
    Shelah {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        beta: usize,
        #[arg(long)]
        theta: usize,
        #[arg(long, value_enum, default_value_t = Colors::Full)]
        colors: Colors,
        #[command(flatten)]
        play: Play,
    },
    /// Tableau refutation of the formulas of a file; a `[goal]` section is
    /// negated and added.
    Prove {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Check the Hintikka conditions on a set of sentences.
    HintikkaCheck {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// The term model of a Hintikka set.
    TermModel {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Craig interpolant of `phi ⊨ psi` (conjunctions of the files).
    Craig {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Interpolant respecting universal and existential sorts.
    CraigSorted {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Explicit definition of an implicitly defined relation.
    Beth {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        rel: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Joint model of two extensions of a complete propositional theory.
    /// Each theory's vocabulary is its file's vocabulary.
    Robinson {
        #[arg(long)]
        sigma0: PathBuf,
        #[arg(long)]
        sigma1: PathBuf,
        #[arg(long)]
        sigma2: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Separate two projective classes over their visible symbols.
    Separate {
        #[arg(long)]
        k0: PathBuf,
        #[arg(long)]
        k1: PathBuf,
        /// Visible symbols, comma separated.
        #[arg(long, value_delimiter = ',')]
        visible: Vec<String>,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Serve the game API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Append-only log of session events, one JSON object per line.
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

/// A usage or input error: exit status 2.
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Printed output and whether the verdict was positive.
struct Report {
    text: String,
    ok: bool,
}

impl Report {
    fn new(ok: bool) -> Report {
        Report { text: String::new(), ok }
    }

    fn line(&mut self, s: impl std::fmt::Display) {
        self.text.push_str(&s.to_string());
        if !self.text.ends_with('\n') {
            self.text.push('\n');
        }
    }
}

/// Runs the command line `argv` (program name first), writing results to
/// `out` and errors to `err`; returns the exit status.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    run_with_input(argv, &mut std::io::stdin().lock(), out, err)
}

/// [`run`] with an explicit input stream for `--play`.
pub fn run_with_input(argv: &[String], input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.verb {
        Verb::Serve { port, log } => return serve(port, log.as_deref(), err),
        verb => execute(verb, input, out),
    };
    match result {
        Ok(r) => {
            let _ = write!(out, "{}", r.text);
            if r.ok {
                0
            } else {
                1
            }
        }
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn serve(port: u16, log: Option<&Path>, err: &mut dyn Write) -> i32 {
    let state = match log.map(server::AppState::with_log).transpose() {
        Ok(s) => s.unwrap_or_default(),
        Err(e) => {
            let _ = writeln!(err, "error: session log: {e}");
            return 2;
        }
    };
    let rt = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    match rt.block_on(server::serve(port, state)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: port {port}: {e}");
            2
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn formula_file(path: &Path) -> Result<FormulaFile, Failure> {
    parse_formula_file(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn structure(path: &Path) -> Result<Structure, Failure> {
    parse_structure(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// All formulas of a file, sections included, in file order of sections.
fn all_formulas(f: &FormulaFile) -> Vec<Formula> {
    f.formulas.iter().chain(f.sections.values().flatten()).cloned().collect()
}

fn conjunction(f: &FormulaFile) -> Formula {
    let mut fs = all_formulas(f);
    if fs.len() == 1 {
        fs.remove(0)
    } else {
        Formula::and(fs)
    }
}

fn file_vocabulary(f: &FormulaFile) -> Result<Vocabulary, Failure> {
    let mut v = f.voc.clone();
    for g in all_formulas(f) {
        v = v.union(&g.vocabulary())?;
    }
    Ok(v)
}

fn sorts(s: &SortSet) -> String {
    let items: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn describe(c: &Check) -> String {
    match c {
        Check::Tautology => "valid (truth table)".into(),
        Check::Proved(tree) => format!("proved (closed tableau, {} nodes)", tree.node.size()),
        Check::HoldsUpToBound(b) => format!("holds on all structures up to size {b}"),
        Check::Fails(m) => format!("fails in\n{m}"),
        Check::Unknown(why) => format!("unknown: {why}"),
    }
}

fn report_lines(r: &mut Report, report: &InterpolantReport, with_sorts: bool) {
    r.line(format!("phi entails theta: {}", describe(&report.left)));
    r.line(format!("theta entails psi: {}", describe(&report.right)));
    if report.foreign.is_empty() {
        r.line("vocabulary: shared only");
    } else {
        r.line(format!("vocabulary: foreign symbols {}", report.foreign.join(", ")));
    }
    if with_sorts {
        let s = &report.sorts;
        r.line(format!(
            "sorts: Un(theta) = {} within Un(phi) = {}; Ex(theta) = {} within Ex(psi) = {}",
            sorts(&s.un_theta),
            sorts(&s.un_left),
            sorts(&s.ex_theta),
            sorts(&s.ex_right)
        ));
    }
}

fn strategy_lines<S: Ord + Serialize, M: Serialize>(r: &mut Report, result: &GameResult<S, M>) -> Result<(), Failure> {
    for (s, m) in &result.strategy {
        r.line(format!("{} => {}", serde_json::to_string(s)?, serde_json::to_string(m)?));
    }
    Ok(())
}

fn game_report<S: Ord + Serialize, M: Serialize>(
    result: Result<GameResult<S, M>, GameError>,
    strategy: bool,
) -> Result<Report, Failure> {
    let result = result?;
    let mut r = Report::new(result.winner == Player::Duplicator);
    r.line(result.winner);
    if strategy {
        strategy_lines(&mut r, &result)?;
    }
    Ok(r)
}

/// Interactive play over stdin: prints the position and the legal moves,
/// reads one JSON move per line.
fn play(
    kind: session::Kind,
    left: &Path,
    right: &Path,
    params: session::Params,
    role: RoleArg,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<Report, Failure> {
    let cfg = session::NewGame {
        kind,
        left: read(left)?,
        right: read(right)?,
        params,
        human_role: match role {
            RoleArg::Spoiler => session::Role::Spoiler,
            RoleArg::Duplicator => session::Role::Duplicator,
        },
    };
    let (mut s, mut engine_move) = session::Session::new("play", cfg)?;
    loop {
        if let Some(m) = engine_move.take() {
            writeln!(out, "engine: {m}")?;
        }
        let status = s.status()?;
        writeln!(out, "position: {}", s.position)?;
        if !matches!(status, mtw_core::games::Status::ToMove(_)) {
            let mut r = Report::new(true);
            r.line(session::status_name(status));
            return Ok(r);
        }
        for m in s.legal_moves()? {
            writeln!(out, "  {m}")?;
        }
        write!(out, "move> ")?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 || line.trim() == "quit" {
            let mut r = Report::new(true);
            r.line("stopped");
            return Ok(r);
        }
        let mv: serde_json::Value = match serde_json::from_str(line.trim()) {
            Ok(v) => v,
            Err(e) => {
                writeln!(out, "not JSON: {e}")?;
                continue;
            }
        };
        match s.play(mv) {
            Ok(m) => engine_move = m,
            Err(e) => writeln!(out, "rejected: {e}")?,
        }
    }
}

fn execute(verb: Verb, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<Report, Failure> {
    match verb {
        Verb::Parse { input, kind } => {
            let text = read(&input)?;
            let at = |e: &dyn std::fmt::Display| Failure(format!("{}: {e}", input.display()));
            let mut r = Report::new(true);
            match kind {
                FileKind::Formula => {
                    let f = parse_formula_file(&text).map_err(|e| at(&e))?;
                    r.text.push_str(&declarations(&f.voc));
                    let mut chunks: Vec<String> = f.formulas.iter().map(|g| g.to_string()).collect();
                    for (name, fs) in &f.sections {
                        let body: Vec<String> = fs.iter().map(|g| g.to_string()).collect();
                        chunks.push(format!("[{name}]\n{}", body.join(";\n")));
                    }
                    if !chunks.is_empty() {
                        r.line(chunks.join(";\n"));
                    }
                }
                FileKind::Structure => r.text.push_str(&parse_structure(&text).map_err(|e| at(&e))?.to_string()),
                FileKind::Symbolic => r.line(parse_symbolic(&text).map_err(|e| at(&e))?),
                FileKind::Hintikka => r.text.push_str(&parse_hintikka(&text).map_err(|e| at(&e))?.to_string()),
            }
            Ok(r)
        }
        Verb::Check { structure: s, input } => {
            let m = structure(&s)?;
            let f = formula_file(&input)?;
            let mut r = Report::new(true);
            for g in all_formulas(&f) {
                let v = satisfies_sentence(&m, &g)?;
                r.ok &= v;
                r.line(format!("{v}\t{g}"));
            }
            Ok(r)
        }
        Verb::Entails { input, bound } => {
            let f = formula_file(&input)?;
            let mut premises = f.formulas.clone();
            let conclusion = match f.sections.get("conclusion") {
                Some(c) if c.len() == 1 => c[0].clone(),
                Some(_) => return Err(Failure("the [conclusion] section must hold one formula".into())),
                None => premises.pop().ok_or_else(|| Failure("no conclusion".into()))?,
            };
            match entails_bounded(&premises, &conclusion, bound, &EntailOptions::default())? {
                EntailmentVerdict::EntailsUpToBound(b) => {
                    let mut r = Report::new(true);
                    r.line(format!("Entailed on all structures up to size {b}"));
                    Ok(r)
                }
                EntailmentVerdict::Countermodel(m, asg) => {
                    let mut r = Report::new(false);
                    r.line("Not entailed; countermodel:");
                    r.text.push_str(&m.to_string());
                    for (x, (s, e)) in &asg {
                        r.line(format!("{x}:{s} = {}", m.label(*e)));
                    }
                    Ok(r)
                }
            }
        }
        Verb::HintikkaFormula { structure: s, rank } => {
            let mut r = Report::new(true);
            r.line(hintikka_rank_formula(&structure(&s)?, rank)?);
            Ok(r)
        }
        Verb::Classes { structures, rank } => {
            let ms: Vec<Structure> = structures.iter().map(|p| structure(p)).collect::<Result<_, _>>()?;
            let mut r = Report::new(true);
            for class in rank_classes(&ms, rank)? {
                let names: Vec<String> = class.iter().map(|i| structures[*i].display().to_string()).collect();
                r.line(names.join(" "));
            }
            Ok(r)
        }
        Verb::Ef { left, right, rounds, play: p } => {
            if p.play {
                let params = session::Params {
                    rounds: Some(rounds),
                    ..Default::default()
                };
                return play(session::Kind::Ef, &left, &right, params, p.role, input, out);
            }
            game_report(ef_solve(&structure(&left)?, &structure(&right)?, rounds), p.strategy)
        }
        Verb::Efq { left, right, rounds, k, play: p } => {
            if p.play {
                let params = session::Params {
                    rounds: Some(rounds),
                    k: Some(k),
                    ..Default::default()
                };
                return play(session::Kind::Efq, &left, &right, params, p.role, input, out);
            }
            game_report(efq_solve(&structure(&left)?, &structure(&right)?, rounds, k), p.strategy)
        }
        Verb::EfqSym { left, right, rounds, alpha, play: p } => {
            if p.play {
                let params = session::Params {
                    rounds: Some(rounds),
                    alpha: Some(alpha),
                    ..Default::default()
                };
                return play(session::Kind::EfqSym, &left, &right, params, p.role, input, out);
            }
            let sym = |path: &Path| parse_symbolic(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())));
            game_report(efq_symbolic(&sym(&left)?, &sym(&right)?, rounds, alpha), p.strategy)
        }
        Verb::Shelah { left, right, beta, theta, colors, play: p } => {
            let colors = match colors {
                Colors::Full => ColorRange::Full,
                Colors::Clock => ColorRange::Clock,
            };
            if p.play {
                let params = session::Params {
                    beta: Some(beta),
                    theta: Some(theta),
                    colors: Some(colors),
                    ..Default::default()
                };
                return play(session::Kind::Shelah, &left, &right, params, p.role, input, out);
            }
            game_report(
                shelah_solve_with(&structure(&left)?, &structure(&right)?, beta, theta, colors),
                p.strategy,
            )
        }
        Verb::Prove { input, bounds } => {
            let f = formula_file(&input)?;
            let mut gamma = f.formulas.clone();
            for (name, fs) in &f.sections {
                if name == "goal" {
                    gamma.extend(fs.iter().map(|g| Formula::not(g.clone())));
                } else {
                    gamma.extend(fs.iter().cloned());
                }
            }
            match prove(&gamma, bounds.tableau())? {
                TableauVerdict::Closed(tree) => {
                    let mut r = Report::new(true);
                    r.line("Closed");
                    r.text.push_str(&tree.to_string());
                    Ok(r)
                }
                TableauVerdict::Satisfiable { hintikka, model, source } => {
                    let mut r = Report::new(false);
                    r.line(format!("Satisfiable ({source:?})"));
                    r.line("# Hintikka set");
                    r.text.push_str(&hintikka.to_string());
                    r.line("# term model");
                    r.text.push_str(&model.to_string());
                    Ok(r)
                }
                TableauVerdict::Unknown(why) => {
                    let mut r = Report::new(false);
                    r.line(format!("Unknown: {why}"));
                    Ok(r)
                }
            }
        }
        Verb::HintikkaCheck { input } => {
            let h = parse_hintikka(&read(&input)?).map_err(|e| Failure(format!("{}: {e}", input.display())))?;
            let violations = check_hintikka(&h);
            let mut r = Report::new(violations.is_empty());
            if violations.is_empty() {
                r.line("Hintikka set");
            }
            for v in violations {
                r.line(v);
            }
            Ok(r)
        }
        Verb::TermModel { input } => {
            let h = parse_hintikka(&read(&input)?).map_err(|e| Failure(format!("{}: {e}", input.display())))?;
            let violations = check_hintikka(&h);
            if !violations.is_empty() {
                let mut r = Report::new(false);
                r.line("not a Hintikka set:");
                for v in violations {
                    r.line(v);
                }
                return Ok(r);
            }
            let mut r = Report::new(true);
            r.text.push_str(&term_model(&h)?.to_string());
            Ok(r)
        }
        Verb::Craig { phi, psi, bounds } => {
            let (phi, psi) = (conjunction(&formula_file(&phi)?), conjunction(&formula_file(&psi)?));
            interpolant_report(craig(&phi, &psi, &bounds.interpolation())?, false)
        }
        Verb::CraigSorted { phi, psi, bounds } => {
            let (phi, psi) = (conjunction(&formula_file(&phi)?), conjunction(&formula_file(&psi)?));
            interpolant_report(craig_sorted(&phi, &psi, &bounds.interpolation())?, true)
        }
        Verb::Beth { phi, rel, bounds } => {
            let f = formula_file(&phi)?;
            match beth(&conjunction(&f), &rel, &file_vocabulary(&f)?, &bounds.interpolation())? {
                BethResult::Defined { definition, theta, check, .. } => {
                    let mut r = Report::new(true);
                    r.line(format!("Definition: {definition}"));
                    r.line(format!("theta: {theta}"));
                    r.line(format!("phi entails the definition: {}", describe(&check)));
                    Ok(r)
                }
                BethResult::NotImplicit(m) => {
                    let mut r = Report::new(false);
                    r.line(format!("Not implicitly defined; {rel} and its copy differ in"));
                    r.text.push_str(&m.to_string());
                    Ok(r)
                }
                BethResult::Unknown(why) => {
                    let mut r = Report::new(false);
                    r.line(format!("Unknown: {why}"));
                    Ok(r)
                }
            }
        }
        Verb::Robinson { sigma0, sigma1, sigma2, bounds } => {
            let files = [formula_file(&sigma0)?, formula_file(&sigma1)?, formula_file(&sigma2)?];
            let input = RobinsonInput {
                sigma0: all_formulas(&files[0]),
                sigma1: all_formulas(&files[1]),
                sigma2: all_formulas(&files[2]),
                vocab0: file_vocabulary(&files[0])?,
                vocab1: file_vocabulary(&files[1])?,
                vocab2: file_vocabulary(&files[2])?,
            };
            match robinson_join(&input, &bounds.interpolation())? {
                RobinsonResult::Joint(m) => {
                    let mut r = Report::new(true);
                    r.line("Joint model:");
                    r.text.push_str(&m.to_string());
                    Ok(r)
                }
                RobinsonResult::Separated(theta) => {
                    let mut r = Report::new(false);
                    r.line(format!("Separated by: {theta}"));
                    Ok(r)
                }
                RobinsonResult::Unknown(why) => {
                    let mut r = Report::new(false);
                    r.line(format!("Unknown: {why}"));
                    Ok(r)
                }
            }
        }
        Verb::Separate { k0, k1, visible, bounds } => {
            let (f0, f1) = (formula_file(&k0)?, formula_file(&k1)?);
            let all = file_vocabulary(&f0)?.union(&file_vocabulary(&f1)?)?;
            let mut vis = Vocabulary::new();
            vis.sorts = all.sorts.clone();
            for name in &visible {
                let kind = all
                    .kind_of(name)
                    .ok_or_else(|| Failure(format!("visible symbol {name} is not declared")))?;
                vis.declare(name, kind)?;
            }
            let c0 = PcClass {
                matrix: conjunction(&f0),
                visible: vis.clone(),
            };
            let c1 = PcClass {
                matrix: conjunction(&f1),
                visible: vis,
            };
            match separate(&c0, &c1, &bounds.interpolation())? {
                SeparationResult::Separated { theta, defines } => {
                    let mut r = Report::new(true);
                    r.line(format!("Separated by: {theta}"));
                    match defines {
                        Some(true) => r.line("the classes are complementary; theta defines the first"),
                        Some(false) => r.line("the classes are not complementary"),
                        None => {}
                    }
                    Ok(r)
                }
                SeparationResult::Overlap(m) => {
                    let mut r = Report::new(false);
                    r.line("Overlap; a visible reduct in both classes:");
                    r.text.push_str(&m.to_string());
                    Ok(r)
                }
                SeparationResult::Unknown(why) => {
                    let mut r = Report::new(false);
                    r.line(format!("Unknown: {why}"));
                    Ok(r)
                }
            }
        }
        Verb::Serve { .. } => unreachable!("handled by run"),
    }
}

fn interpolant_report(result: InterpolationResult, with_sorts: bool) -> Result<Report, Failure> {
    match result {
        InterpolationResult::Interpolant { theta, extracted, report } => {
            let mut r = Report::new(true);
            r.line(format!("Interpolant: {theta}"));
            r.line(format!("extracted: {extracted}"));
            report_lines(&mut r, &report, with_sorts);
            Ok(r)
        }
        InterpolationResult::NotEntailed(m) => {
            let mut r = Report::new(false);
            r.line("Not entailed; countermodel:");
            r.text.push_str(&m.to_string());
            Ok(r)
        }
        InterpolationResult::Unknown(why) => {
            let mut r = Report::new(false);
            r.line(format!("Unknown: {why}"));
            Ok(r)
        }
    }
}

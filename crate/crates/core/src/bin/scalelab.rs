use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scalelab::cli::{export_dot, load_scenario, parse_scenario, repro_all, run_scenario, scenario::window_tree, TaskReport};
use scalelab::limits;
use scalelab::trees::Window;

#[derive(Parser)]
#[command(name = "scalelab", version, about = "Scale groups, self-replicating groups and their residues")]
struct Cli {
    #[command(flatten)]
    limits: LimitArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct LimitArgs {
    /// Maximum permutation degree / window size (also read from SCALELAB_MAX_POINTS).
    #[arg(long, global = true)]
    max_points: Option<usize>,
    /// Default radius R = D of windows around the base vertex.
    #[arg(long, global = true)]
    window: Option<i64>,
    /// Horospheres an orbit search may pass beyond the compared levels.
    #[arg(long, global = true)]
    search_depth: Option<usize>,
    /// Run independent tasks concurrently; output keeps declaration order.
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print one JSON report per task.
    Run { file: PathBuf },
    /// Residue groups of an automaton group.
    Residue {
        /// Builtin name such as `grigorchuk` or `odometer(3)`.
        #[arg(long, conflicts_with = "automaton")]
        group: Option<String>,
        /// Automaton file.
        #[arg(long)]
        automaton: Option<PathBuf>,
        /// Level or level range, e.g. `3` or `1..4`.
        #[arg(short, long, default_value = "1..3")]
        d: String,
    },
    /// Finite-depth self-replication test.
    CheckSr {
        #[arg(long, conflicts_with = "automaton")]
        group: Option<String>,
        #[arg(long)]
        automaton: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Tidiness and residue groups of a G(F, A) profile.
    Gfa {
        /// Finite group: `sym3`, `c<n>` or a Cayley-table file.
        #[arg(long = "F", default_value = "sym3")]
        f: String,
        /// Tail subgroup generators, `1` for trivial.
        #[arg(long = "A", default_value = "1")]
        a: String,
        /// Profile: `V0`, `V` or `W`.
        #[arg(long, default_value = "V0")]
        tidy: String,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(short, long, default_value = "1..2")]
        d: String,
    },
    /// Compatible labelling for a unit b and the odometer at p.
    Padic {
        #[arg(long, default_value_t = 5)]
        p: u32,
        #[arg(long, default_value = "1")]
        b: String,
        /// Window `top..bottom`.
        #[arg(long, default_value = "-1..3", allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 40)]
        trials: usize,
    },
    /// Print a labelled window tree as DOT.
    Tree {
        /// Group declaration line, e.g. `gfa F=sym3 A=1 tidy=V0` or `group builtin=grigorchuk`.
        #[arg(long)]
        spec: String,
        /// Window `top..bottom`.
        #[arg(long, default_value = "-1..1", allow_hyphen_values = true)]
        range: String,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the bundled reproduction table.
    ReproAll {
        /// Restrict to these modules (repeatable).
        #[arg(long)]
        only: Vec<String>,
    },
}

fn group_line(group: &Option<String>, automaton: &Option<PathBuf>) -> Result<String, String> {
    match (group, automaton) {
        (Some(g), _) => Ok(format!("group builtin=\"{g}\"")),
        (None, Some(p)) => Ok(format!("group automaton=\"{}\"", p.display())),
        (None, None) => Err("give --group or --automaton".into()),
    }
}

fn emit(reports: &[TaskReport]) -> ExitCode {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for r in reports {
        let _ = writeln!(out, "{}", r.to_json_line());
    }
    let failed = reports.iter().filter(|r| !r.ok).count();
    for r in reports.iter().filter(|r| !r.ok) {
        eprintln!(
            "FAIL line {} {}: {}",
            r.line,
            r.task,
            r.error.as_deref().unwrap_or("check failed")
        );
    }
    eprintln!("{} tasks, {} ok, {} failed", reports.len(), reports.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run_text(text: &str, parallel: bool) -> Result<ExitCode, String> {
    let cwd = std::env::current_dir().map_err(|e| e.to_string())?;
    let sc = parse_scenario(text, &cwd).map_err(|e| e.to_string())?;
    Ok(emit(&run_scenario(&sc, parallel)))
}

fn parse_range(text: &str) -> Result<(i64, i64), String> {
    let (a, b) = text.split_once("..").ok_or_else(|| format!("expected top..bottom, got {text:?}"))?;
    Ok((
        a.trim().parse().map_err(|_| format!("bad range {text:?}"))?,
        b.trim().parse().map_err(|_| format!("bad range {text:?}"))?,
    ))
}

fn main_inner(cli: Cli) -> Result<ExitCode, String> {
    let parallel = cli.limits.parallel;
    match cli.command {
        Command::Run { file } => {
            let sc = load_scenario(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            Ok(emit(&run_scenario(&sc, parallel)))
        }
        Command::Residue { group, automaton, d } => {
            let text = format!("{}\nresidue d={d}\n", group_line(&group, &automaton)?);
            run_text(&text, parallel)
        }
        Command::CheckSr { group, automaton, depth } => {
            let text = format!("{}\ncheck-sr depth={depth}\n", group_line(&group, &automaton)?);
            run_text(&text, parallel)
        }
        Command::Gfa { f, a, tidy, r, d } => {
            let text = format!("gfa F={f} A={a} tidy={tidy} r={r}\ntidiness\nresidue d={d}\nprimitivity\n");
            run_text(&text, parallel)
        }
        Command::Padic { p, b, range, trials } => {
            let text = format!("padic p={p} b=\"{b}\"\nwindow {range}\nlabelling trials={trials}\nodometer d=1..3\n");
            run_text(&text, parallel)
        }
        Command::Tree { spec, range, out } => {
            let cwd = std::env::current_dir().map_err(|e| e.to_string())?;
            let sc = parse_scenario(&spec, &cwd).map_err(|e| e.to_string())?;
            let source = sc.groups.first().ok_or("the spec declares no group")?;
            let (top, bottom) = parse_range(&range)?;
            let tree = window_tree(source, &Window::from_range(source.q(), top, bottom)).map_err(|e| e.to_string())?;
            let dot = export_dot(&tree).map_err(|e| e.to_string())?;
            match out {
                Some(path) => std::fs::write(&path, dot).map_err(|e| format!("{}: {e}", path.display()))?,
                None => print!("{dot}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ReproAll { only } => {
            let rows = repro_all(&only, parallel);
            for row in &rows {
                println!("{}", serde_json::to_string(row).expect("rows serialize"));
                eprintln!("{:4} {:9} {:48} {}", if row.ok { "ok" } else { "FAIL" }, row.module, row.check, row.detail);
            }
            let failed = rows.iter().filter(|r| !r.ok).count();
            eprintln!("{} rows, {} failed", rows.len(), failed);
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.limits.max_points {
        limits::set_max_points(n);
    }
    if let Some(n) = cli.limits.window {
        limits::set_default_window(n);
    }
    if let Some(n) = cli.limits.search_depth {
        limits::set_search_depth(n);
    }
    match main_inner(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

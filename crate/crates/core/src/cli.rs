//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bipoly::BiPoly;
use crate::cache::{cache_key, default_cache_dir, Cache, Lookup};
use crate::error::Error;
use crate::modalg::FreeModule;
use crate::oracle::validate_page;
use crate::schubert::{e1_page, e1_quotient_page, normalize_params, total_weight_formula, unique_e1_pages, SignWord};
use crate::search::{
    candidate_outcomes, check_grassmannian_params, solve, Budget, FilterOrder, PageSummary, SolveOptions, SolveReport,
    Status, Strategy,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_AMBIGUOUS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "kronholm",
    version,
    about = "Bredon cohomology of real Grassmannians Gr_k(R^{p,q})"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    /// Worker threads for the search (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Poly,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// E1 page of Gr_k for one sign word.
    E1 {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// All distinct E1 pages of Gr_k(R^{p,q}), lowest tension first.
    Pages {
        #[command(flatten)]
        space: Space,
    },
    /// Possible outcomes of a page: the lowest-tension page of a space, the
    /// page of one sign word, or an explicit module.
    Candidates {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        word: Option<String>,
        #[command(flatten)]
        input: ModuleInput,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        normalize: bool,
    },
    /// Pruned search for the cohomology of Gr_k(R^{p,q}).
    Solve {
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        search: SearchArgs,
        /// Order in which surviving pages filter the candidates.
        #[arg(long, value_enum, default_value_t = OrderArg::Descending)]
        order: OrderArg,
        /// Cache directory (default: $KRONHOLM_CACHE_DIR, $XDG_CACHE_HOME/kronholm or ~/.cache/kronholm).
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Neither read nor write the cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Shift story (P(B) - P(A)) / K_{1,1} between two Poincare polynomials.
    Story {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Total weight of any E1 page of Gr_k(R^{p,q}).
    Totalweight {
        #[command(flatten)]
        space: Space,
    },
    /// Checks a module against the classical invariants of Gr_k(R^{p,q}).
    Validate {
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        input: ModuleInput,
    },
    /// E1 page of the cells of Gr_k(R^p) not contained in Gr_k(R^m).
    Quotient {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long)]
        m: usize,
    },
}

#[derive(Args, Debug)]
struct Space {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    q: usize,
    /// Replace (k, q) by min(k, p-k), min(q, p-q).
    #[arg(long)]
    normalize: bool,
}

impl Space {
    fn params(&self) -> (usize, usize, usize) {
        if self.normalize && self.k <= self.p && self.q <= self.p {
            normalize_params(self.k, self.p, self.q)
        } else {
            (self.k, self.p, self.q)
        }
    }
}

#[derive(Args, Debug)]
struct ModuleInput {
    /// Module as JSON: {"generators": [[a, b, count], ...]}.
    #[arg(long, conflicts_with = "poly")]
    module: Option<String>,
    /// Module as a Poincare polynomial.
    #[arg(long)]
    poly: Option<String>,
}

impl ModuleInput {
    fn get(&self) -> Result<Option<FreeModule>, Error> {
        if let Some(js) = &self.module {
            return serde_json::from_str(js)
                .map(Some)
                .map_err(|e| Error::Module(format!("cannot parse `{js}`: {e}")));
        }
        if let Some(text) = &self.poly {
            return FreeModule::from_poly(&text.parse::<BiPoly>()?).map(Some);
        }
        Ok(None)
    }
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// closure, closure:<depth> or matchings.
    #[arg(long, default_value = "closure")]
    strategy: String,
    /// Cap on distinct intermediate modules.
    #[arg(long)]
    max_modules: Option<usize>,
    /// Cap on approximate memory held by intermediate modules.
    #[arg(long)]
    max_bytes: Option<usize>,
    /// Wall-clock limit for the search.
    #[arg(long)]
    timeout_secs: Option<u64>,
}

impl SearchArgs {
    fn strategy(&self) -> Result<Strategy, Error> {
        self.strategy.parse()
    }

    fn budget(&self) -> Budget {
        let mut b = Budget::default();
        if let Some(n) = self.max_modules {
            b.max_modules = n;
        }
        if let Some(n) = self.max_bytes {
            b.max_bytes = n;
        }
        if let Some(t) = self.timeout_secs {
            b = b.with_time_limit(Duration::from_secs(t));
        }
        b
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Descending,
    Ascending,
}

impl From<OrderArg> for FilterOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Descending => FilterOrder::DescendingTension,
            OrderArg::Ascending => FilterOrder::AscendingTension,
        }
    }
}

struct Output {
    stdout: String,
    stderr: String,
    code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }
}

/// Parses `args` (including the program name), runs the command, writes its
/// output and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let rendered = e.render().to_string();
            let line = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("error: bad arguments");
            let _ = writeln!(err, "{line}");
            return EXIT_USAGE;
        }
    };

    let result = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Error::InvalidParameters(format!("--jobs {n}: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(o) => {
            let _ = out.write_all(o.stdout.as_bytes());
            let _ = err.write_all(o.stderr.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Budget(_) => EXIT_BUDGET,
                _ => EXIT_USAGE,
            }
        }
    }
}

/// Runs with string arguments and collects stdout and stderr.
pub fn run_captured<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(args, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn render_module(m: &FreeModule, format: Format) -> String {
    match format {
        Format::Table => m.render_rank_table(),
        Format::Poly => format!("{}\n", m.poincare()),
        Format::Json => pretty(m),
    }
}

fn render_modules(ms: &[FreeModule], format: Format, label: &str) -> String {
    match format {
        Format::Json => pretty(&ms),
        Format::Poly => ms.iter().map(|m| format!("{}\n", m.poincare())).collect(),
        Format::Table => {
            let mut s = String::new();
            for (i, m) in ms.iter().enumerate() {
                if i > 0 {
                    s.push('\n');
                }
                s.push_str(&format!("{label} {}: {}\n", i + 1, m.poincare()));
                s.push_str(&m.render_rank_table());
            }
            s
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Output, Error> {
    let format = cli.format;
    match &cli.command {
        Command::E1 { k, word } => {
            let w: SignWord = word.parse()?;
            Ok(Output::ok(render_module(&e1_page(*k, &w)?, format)))
        }
        Command::Quotient { k, word, m } => {
            let w: SignWord = word.parse()?;
            Ok(Output::ok(render_module(&e1_quotient_page(*k, &w, *m)?, format)))
        }
        Command::Pages { space } => {
            let (k, p, q) = space.params();
            check_grassmannian_params(k, p, q)?;
            let pages = unique_e1_pages(k, p, q)?;
            let text = match format {
                Format::Json => {
                    let summaries: Vec<PageSummary> = pages
                        .iter()
                        .map(|pg| PageSummary {
                            word: pg.word.to_string(),
                            word_count: pg.word_count,
                            tension: pg.tension,
                            poincare: pg.module.poincare().to_string(),
                            module: pg.module.clone(),
                        })
                        .collect();
                    pretty(&summaries)
                }
                Format::Poly => pages
                    .iter()
                    .map(|pg| format!("{}\t{}\n", pg.tension, pg.module.poincare()))
                    .collect(),
                Format::Table => {
                    let mut s = format!("{} distinct E1 pages\n", pages.len());
                    for (i, pg) in pages.iter().enumerate() {
                        s.push_str(&format!(
                            "\npage {}: word {} ({} words), tension {}\n",
                            i + 1,
                            pg.word,
                            pg.word_count,
                            pg.tension
                        ));
                        s.push_str(&pg.module.render_rank_table());
                    }
                    s
                }
            };
            Ok(Output::ok(text))
        }
        Command::Candidates {
            k,
            p,
            q,
            word,
            input,
            search,
            normalize,
        } => {
            let start = match (input.get()?, k, word, p, q) {
                (Some(m), None, None, None, None) => m,
                (None, Some(k), Some(w), None, None) => e1_page(*k, &w.parse()?)?,
                (None, Some(k), None, Some(p), Some(q)) => {
                    let (k, p, q) = if *normalize && k <= p && q <= p {
                        normalize_params(*k, *p, *q)
                    } else {
                        (*k, *p, *q)
                    };
                    check_grassmannian_params(k, p, q)?;
                    unique_e1_pages(k, p, q)?.swap_remove(0).module
                }
                _ => {
                    return Err(Error::InvalidParameters(
                        "give one of --module/--poly, --k with --word, or --k --p --q".into(),
                    ))
                }
            };
            let cands = candidate_outcomes(&start, search.strategy()?, search.budget())?;
            let text = match format {
                Format::Table => format!(
                    "{} candidates\n\n{}",
                    cands.len(),
                    render_modules(&cands, format, "candidate")
                ),
                _ => render_modules(&cands, format, "candidate"),
            };
            Ok(Output::ok(text))
        }
        Command::Solve {
            space,
            search,
            order,
            cache_dir,
            no_cache,
        } => {
            let (k, p, q) = space.params();
            check_grassmannian_params(k, p, q)?;
            let opts = SolveOptions {
                strategy: search.strategy()?,
                budget: search.budget(),
                filter_order: (*order).into(),
            };
            let mut stderr = String::new();
            let cache = if *no_cache {
                None
            } else {
                cache_dir.clone().or_else(default_cache_dir).map(Cache::new)
            };
            let key = cache_key(k, p, q, opts.strategy, opts.filter_order);

            let mut report: Option<SolveReport> = None;
            if let Some(c) = &cache {
                match c.load(&key) {
                    Lookup::Hit(r) => report = Some(*r),
                    Lookup::Miss => {}
                    Lookup::Corrupt(why) => stderr.push_str(&format!("warning: ignoring corrupt cache entry {why}\n")),
                }
            }
            let report = match report {
                Some(r) => r,
                None => {
                    let r = solve(k, p, q, opts)?;
                    if let (Some(c), true) = (&cache, r.is_complete()) {
                        if let Err(e) = c.store(&key, &r) {
                            stderr.push_str(&format!(
                                "warning: could not write cache in {}: {e}\n",
                                c.dir().display()
                            ));
                        }
                    }
                    r
                }
            };
            Ok(render_report(&report, format, stderr))
        }
        Command::Story { a, b } => {
            let a: BiPoly = a.parse()?;
            let b: BiPoly = b.parse()?;
            let story = b.sub(&a)?.divide_by_k11()?;
            let text = match format {
                Format::Json => pretty(&json!({
                    "story": story.as_ref().map(|s| s.to_string()),
                    "relaxes": story.as_ref().is_some_and(|s| s.is_nonnegative()),
                })),
                _ => match &story {
                    Some(s) => format!("{s}\n"),
                    None => "none\n".to_string(),
                },
            };
            Ok(Output::ok(text))
        }
        Command::Totalweight { space } => {
            let (k, p, q) = space.params();
            let t = total_weight_formula(k, p, q)?;
            let text = match format {
                Format::Json => pretty(&json!({ "k": k, "p": p, "q": q, "total_weight": t })),
                _ => format!("{t}\n"),
            };
            Ok(Output::ok(text))
        }
        Command::Validate { space, input } => {
            let (k, p, q) = space.params();
            check_grassmannian_params(k, p, q)?;
            let m = input
                .get()?
                .ok_or_else(|| Error::InvalidParameters("validate needs --module or --poly".into()))?;
            let diag = validate_page(&m, k, p, q)?;
            let text = match format {
                Format::Json => pretty(&diag),
                _ => diag
                    .checks
                    .iter()
                    .map(|c| format!("{} {}: {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail))
                    .collect(),
            };
            let code = if diag.all_pass() { EXIT_OK } else { EXIT_AMBIGUOUS };
            Ok(Output {
                stdout: text,
                stderr: String::new(),
                code,
            })
        }
    }
}

fn render_report(report: &SolveReport, format: Format, mut stderr: String) -> Output {
    let code = match &report.status {
        Status::Aborted { reason } => {
            stderr.push_str(&format!(
                "error: budget exhausted: {reason} ({} pages built, search incomplete)\n",
                report.pages.len()
            ));
            EXIT_BUDGET
        }
        Status::Complete if report.survivors.len() == 1 => EXIT_OK,
        Status::Complete => EXIT_AMBIGUOUS,
    };
    let stdout = match format {
        Format::Json => pretty(report),
        _ if code == EXIT_BUDGET => String::new(),
        Format::Table if report.survivors.len() == 1 => report.survivors[0].render_rank_table(),
        Format::Table => format!(
            "{} possibilities remain\n\n{}",
            report.survivors.len(),
            render_modules(&report.survivors, format, "survivor")
        ),
        Format::Poly => render_modules(&report.survivors, format, "survivor"),
    };
    Output { stdout, stderr, code }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use tempera_core::gen::{self, rng};
use tempera_core::jacquet::{
    check_def_even, check_def_main, check_def_odd2, check_pr_def_t, filtered_bound, mu_star_bound, pi_delta_case,
    pi_delta_support_holds, ChainWire, ConstructionChain, LemmaReport,
};
use tempera_core::jordan::{deform_down, deform_up, point_reduces, validate_triple, AdmissibleTriple, Reducibility, TripleWire};
use tempera_core::multiseg::{m_star, m_star_twisted, Multisegment, RSElement, RTensor, DEFAULT_MAX_TERMS};
use tempera_core::symbols::{Catalog, HalfInt, Rho};
use tempera_core::tempered::{
    decompose, is_generic, params_equivalent, validate_tempered_triple, Delta, DeltaWire, TemperedParam,
    TemperedParamWire, TemperedTriple, TemperedTripleWire,
};
use tempera_core::{Error, Result};

#[derive(Parser)]
#[command(name = "tempera", version, about = "Multisegment algebra, Jordan blocks and Jacquet-module bounds")]
struct Cli {
    /// Symbol catalog (JSON); the built-in sample catalog when omitted.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Abort an expansion once it has more terms than this.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_TERMS)]
    max_terms: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// M* of a multisegment such as "d(r1;-1/2..1/2) * d(r2;1/2..3/2)".
    Mstar {
        multiseg: String,
        /// Print m* instead of M*.
        #[arg(long)]
        untwisted: bool,
    },
    /// The μ*-bound of a construction chain.
    MuBound {
        chain: PathBuf,
        /// Apply the degree-zero relabelling and the Jordan filter.
        #[arg(long)]
        filter: bool,
        /// Number of steps to use (default: all).
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Check a triple file; exit 1 when it has violations.
    ValidateTriple {
        file: PathBuf,
        /// Read a tempered triple instead of an admissible one.
        #[arg(long)]
        tempered: bool,
    },
    /// Replay a chain; exit 1 when a step does not apply.
    ValidateChain { file: PathBuf },
    /// The case defining π_δ for δ = δ(ρ,b) over a triple or chain.
    PiDelta {
        file: PathBuf,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        b: i64,
    },
    /// All constituents of δ_1 × … × δ_n ⋊ π.
    Decompose { file: PathBuf },
    /// Deform one Jordan block of a triple or chain.
    Deform {
        file: PathBuf,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        a: i64,
        /// Replace a by a - 2k.
        #[arg(long, conflicts_with = "up", required_unless_present = "up")]
        down: Option<i64>,
        /// Replace a by the given larger block.
        #[arg(long)]
        up: Option<i64>,
    },
    /// Whether ν^α ρ ⋊ π reduces; exit 1 when irreducible.
    Reduces {
        file: PathBuf,
        #[arg(long)]
        rho: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Whether two tempered parameters name the same representation; exit 1 if not.
    Equiv { first: PathBuf, second: PathBuf },
    /// Whether a tempered parameter is generic; exit 1 if not.
    Generic { file: PathBuf },
    /// Multiplicity checks of the lemmas on a chain or on random instances.
    CheckLemma {
        lemma: LemmaKind,
        /// Chain file; omit with --random.
        file: Option<PathBuf>,
        /// Check this many generated instances (seeded by TEMPERA_SEED).
        #[arg(long, conflicts_with = "file")]
        random: Option<usize>,
        #[arg(long)]
        rho: Option<String>,
        #[arg(long)]
        b: Option<i64>,
        /// δ(ρ,a) given as ρ:a; repeat for pr-def-t.
        #[arg(long = "delta")]
        deltas: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LemmaKind {
    DefMain,
    DefEven,
    DefOdd2,
    PrDefT,
}

/// What a command prints, and whether its check came out negative.
struct Output {
    text: String,
    json: Value,
    negative: bool,
}

impl Output {
    fn ok(text: String, json: Value) -> Output {
        Output { text, json, negative: false }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// A triple file, or a chain file replayed to its triple.
fn load_triple(path: &Path, cat: &Catalog) -> Result<AdmissibleTriple> {
    let v: Value = parse_json(path)?;
    if v.get("base").is_some() {
        let w: ChainWire = serde_json::from_value(v).map_err(|e| Error::Parse(format!("chain: {e}")))?;
        tempera_core::jacquet::replay(&ConstructionChain::from_wire(&w, cat)?)
    } else {
        let w: TripleWire = serde_json::from_value(v).map_err(|e| Error::Parse(format!("triple: {e}")))?;
        w.resolve(cat)
    }
}

fn load_chain(path: &Path, cat: &Catalog) -> Result<ConstructionChain> {
    ConstructionChain::from_wire(&parse_json(path)?, cat)
}

fn load_param(path: &Path, cat: &Catalog) -> Result<TemperedParam> {
    TemperedParam::from_wire(&parse_json(path)?, cat)
}

fn parse_delta(s: &str, cat: &Catalog) -> Result<Delta> {
    let (r, a) = s.split_once(':').ok_or_else(|| Error::Parse(format!("delta `{s}`: expected rho:a")))?;
    let a = a.trim().parse().map_err(|_| Error::Parse(format!("delta `{s}`: bad a")))?;
    Delta::new(&cat.rho(r.trim())?, a)
}

fn tensor_output(t: &RTensor) -> Output {
    let mut text = String::new();
    let mut terms = Vec::new();
    for ((a, b), c) in t.iter() {
        text.push_str(&format!("{c} {a} (x) {b}\n"));
        terms.push(json!({"coeff": c, "left": a.to_string(), "right": b.to_string()}));
    }
    Output::ok(text, json!({ "terms": terms }))
}

fn rs_output(e: &RSElement) -> Output {
    let mut text = String::new();
    let mut terms = Vec::new();
    for ((m, s), c) in e.iter() {
        text.push_str(&format!("{c} {m} (x) {s}\n"));
        terms.push(json!({"coeff": c, "gl": m.to_string(), "classical": s.to_string()}));
    }
    text.push_str(&format!("{} terms\n", e.len()));
    Output::ok(text, json!({ "terms": terms, "count": e.len() }))
}

fn triple_output(t: &AdmissibleTriple) -> Output {
    Output::ok(format!("{t}\n"), t.to_json())
}

fn violations_output(v: Vec<String>, ok_json: Value) -> Output {
    if v.is_empty() {
        return Output::ok("valid\n".into(), json!({"valid": true, "violations": [], "triple": ok_json}));
    }
    let text = v.iter().map(|x| format!("violation: {x}\n")).collect();
    Output { text, json: json!({"valid": false, "violations": v}), negative: true }
}

fn report_json(r: &LemmaReport, chain: &ConstructionChain) -> Value {
    json!({
        "lemma": r.lemma.to_string(),
        "chain": chain.to_json(),
        "gl": r.key.0.to_string(),
        "classical": r.key.1.to_string(),
        "multiplicity": r.multiplicity,
        "expected": r.expected,
        "support_matches": r.support_matches.len(),
        "holds": r.holds(),
    })
}

struct Instance {
    chain: ConstructionChain,
    rho: Option<Rho>,
    b: i64,
    deltas: Vec<Delta>,
}

fn check_instance(kind: LemmaKind, i: &Instance, limit: usize) -> Result<LemmaReport> {
    let need_rho = || i.rho.clone().ok_or_else(|| Error::Precondition("--rho and --b are required".into()));
    match kind {
        LemmaKind::DefMain => check_def_main(&i.chain, &need_rho()?, i.b, limit),
        LemmaKind::DefEven => check_def_even(&i.chain, &need_rho()?, i.b, limit),
        LemmaKind::DefOdd2 => check_def_odd2(&i.chain, &need_rho()?, i.b, limit),
        LemmaKind::PrDefT => check_pr_def_t(&i.chain, &i.deltas, limit),
    }
}

fn seed() -> Result<u64> {
    match std::env::var("TEMPERA_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Error::Parse(format!("TEMPERA_SEED `{s}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn random_instances(kind: LemmaKind, n: usize, cat: &Catalog) -> Result<Vec<Instance>> {
    let mut r = rng(seed()?);
    let caps = gen::LEMMA;
    Ok((0..n)
        .map(|_| match kind {
            LemmaKind::DefMain | LemmaKind::DefEven => {
                let (chain, rho, b) = gen::random_def_instance(&mut r, cat, matches!(kind, LemmaKind::DefMain), caps);
                Instance { chain, rho: Some(rho), b, deltas: vec![] }
            }
            LemmaKind::DefOdd2 => {
                let (chain, rho, b) = gen::random_def_odd2_instance(&mut r, cat, caps);
                Instance { chain, rho: Some(rho), b, deltas: vec![] }
            }
            LemmaKind::PrDefT => {
                let (chain, deltas) = gen::random_pr_def_t_instance(&mut r, cat, caps, 3);
                Instance { chain, rho: None, b: 0, deltas }
            }
        })
        .collect())
}

#[derive(Deserialize)]
struct DecomposeInput {
    core: TripleWire,
    deltas: Vec<DeltaWire>,
}

fn run(cli: &Cli) -> Result<Output> {
    let cat = match &cli.catalog {
        Some(p) => Catalog::from_json_str(&read(p)?)?,
        None => Catalog::sample(),
    };
    let limit = cli.max_terms;
    match &cli.cmd {
        Cmd::Mstar { multiseg, untwisted } => {
            let m = Multisegment::parse(multiseg, &cat)?;
            Ok(tensor_output(&if *untwisted { m_star(&m) } else { m_star_twisted(&m)? }))
        }
        Cmd::MuBound { chain, filter, depth } => {
            let c = load_chain(chain, &cat)?;
            let c = match depth {
                Some(d) if *d > c.steps.len() => {
                    return Err(Error::Precondition(format!("depth {d} exceeds chain length {}", c.steps.len())))
                }
                Some(d) => c.truncated(*d),
                None => c,
            };
            if *filter {
                Ok(rs_output(&filtered_bound(&c, limit)?.terms))
            } else {
                Ok(rs_output(&mu_star_bound(&c, c.steps.len(), limit)?))
            }
        }
        Cmd::ValidateTriple { file, tempered } => {
            if *tempered {
                let w: TemperedTripleWire = parse_json(file)?;
                let t = TemperedTriple::from_wire_raw(&w, &cat)?;
                let v = validate_tempered_triple(&t);
                let j = serde_json::to_value(t.normalized().to_wire()).expect("serializes");
                Ok(violations_output(v, j))
            } else {
                let w: TripleWire = parse_json(file)?;
                let t = w.resolve_raw(&cat)?;
                let v = validate_triple(&t);
                let j = if v.is_empty() { t.normalized().to_json() } else { Value::Null };
                Ok(violations_output(v, j))
            }
        }
        Cmd::ValidateChain { file } => {
            let w: ChainWire = parse_json(file)?;
            match ConstructionChain::from_wire(&w, &cat) {
                Ok(c) => {
                    let ts = c.prefixes()?;
                    let mut text = String::new();
                    for (i, t) in ts.iter().enumerate() {
                        match i {
                            0 => text.push_str(&format!("{t}\n")),
                            _ => text.push_str(&format!("{} -> {t}\n", c.steps[i - 1])),
                        }
                    }
                    let triples: Vec<Value> = ts.iter().map(AdmissibleTriple::to_json).collect();
                    Ok(Output::ok(text, json!({"valid": true, "chain": c.to_json(), "triples": triples})))
                }
                Err(e @ Error::Step { .. }) => Ok(Output {
                    text: format!("invalid: {e}\n"),
                    json: json!({"valid": false, "error": e.to_string()}),
                    negative: true,
                }),
                Err(e) => Err(e),
            }
        }
        Cmd::PiDelta { file, rho, b } => {
            let t = load_triple(file, &cat)?;
            let r = cat.rho(rho)?;
            let case = pi_delta_case(&t, &r, *b)?;
            let holds = pi_delta_support_holds(&case, &r, *b)?;
            Ok(Output {
                text: format!("{case}\nsupport equation: {}\n", if holds { "holds" } else { "FAILS" }),
                json: json!({"case": case.to_string(), "support_holds": holds}),
                negative: !holds,
            })
        }
        Cmd::Decompose { file } => {
            let input: DecomposeInput = parse_json(file)?;
            let t = input.core.resolve(&cat)?;
            let ds = input.deltas.iter().map(|d| d.resolve(&cat)).collect::<Result<Vec<_>>>()?;
            let parts = decompose(&ds, &t);
            let mut text = format!("{} constituents\n", parts.len());
            for p in &parts {
                let signs: Vec<String> = p.e_core.signed_deltas.iter().map(|(d, s)| format!("{d}{s}")).collect();
                text.push_str(&format!("({}) {p}\n", signs.join(", ")));
            }
            let j: Vec<TemperedParamWire> = parts.iter().map(TemperedParam::to_wire).collect();
            Ok(Output::ok(text, serde_json::to_value(j).expect("serializes")))
        }
        Cmd::Deform { file, rho, a, down, up } => {
            let t = load_triple(file, &cat)?;
            let r = cat.rho(rho)?;
            let u = match (down, up) {
                (Some(k), _) => deform_down(&t, &r, *a, *k)?,
                (None, Some(to)) => deform_up(&t, &r, *a, *to)?,
                (None, None) => return Err(Error::Precondition("one of --down, --up is required".into())),
            };
            Ok(triple_output(&u))
        }
        Cmd::Reduces { file, rho, alpha } => {
            let t = load_triple(file, &cat)?;
            let x: HalfInt = alpha.parse()?;
            let red = point_reduces(&t, &cat.rho(rho)?, x)? == Reducibility::Reduces;
            let word = if red { "reduces" } else { "irreducible" };
            Ok(Output { text: format!("{word}\n"), json: json!({"reduces": red}), negative: !red })
        }
        Cmd::Equiv { first, second } => {
            let eq = params_equivalent(&load_param(first, &cat)?, &load_param(second, &cat)?)?;
            let word = if eq { "equivalent" } else { "not equivalent" };
            Ok(Output { text: format!("{word}\n"), json: json!({"equivalent": eq}), negative: !eq })
        }
        Cmd::Generic { file } => {
            let g = is_generic(&load_param(file, &cat)?)?;
            let word = if g { "generic" } else { "not generic" };
            Ok(Output { text: format!("{word}\n"), json: json!({"generic": g}), negative: !g })
        }
        Cmd::CheckLemma { lemma, file, random, rho, b, deltas } => {
            let instances = match (file, random) {
                (Some(f), None) => vec![Instance {
                    chain: load_chain(f, &cat)?,
                    rho: rho.as_deref().map(|r| cat.rho(r)).transpose()?,
                    b: b.unwrap_or(0),
                    deltas: deltas.iter().map(|d| parse_delta(d, &cat)).collect::<Result<_>>()?,
                }],
                (None, Some(n)) => random_instances(*lemma, *n, &cat)?,
                _ => return Err(Error::Precondition("give a chain file or --random N".into())),
            };
            let mut text = String::new();
            let mut out = Vec::new();
            let mut held = 0;
            for i in &instances {
                let rep = check_instance(*lemma, i, limit)?;
                held += rep.holds() as usize;
                text.push_str(&format!("{}\n{rep}\n", i.chain));
                out.push(report_json(&rep, &i.chain));
            }
            text.push_str(&format!("{held}/{} hold\n", instances.len()));
            Ok(Output {
                text,
                json: json!({"instances": out, "held": held, "total": instances.len()}),
                negative: held < instances.len(),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&o.json).expect("serializes"));
            } else {
                print!("{}", o.text);
            }
            if o.negative {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

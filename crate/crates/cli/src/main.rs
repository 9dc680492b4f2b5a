//! Command-line driver: analyze polynomial families, factor concrete
//! members, search folding moduli, classify substitutions, and replay
//! certificates.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use num_rational::BigRational;

use lacpoly::bipoly::BiPoly;
use lacpoly::capelli::{classify_capelli, CapelliStatus, ModulusOutcome};
use lacpoly::lacunary::{find_k_bruteforce, find_k_constructive, v_bound, ExponentVector, ReductionConfig};
use lacpoly::parse::parse_poly;
use lacpoly::pipeline::{
    analyze_family, concrete_check, factor_listing, oracle_outcome, Budgets, CellOutcome,
    Certificate, CertificateDocument, CheckRecord, ConcreteFactorization, FamilyInput,
    FamilyInputDoc, ReciprocalRecord, Verdict,
};

#[derive(Parser)]
#[command(name = "lacpoly", version, about = "Irreducibility certificates for sparse polynomial families")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for the check grid (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Largest modulus enumerated in the check grid.
    #[arg(long, global = true, default_value_t = 64)]
    t_max: u64,

    /// Evaluation points offered to each evaluation certificate.
    #[arg(long, global = true, default_value_t = 64)]
    points: usize,

    /// Shuffle seed for the evaluation point order (default: ascending).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a family file and write its certificate.
    Analyze {
        /// Family description (JSON).
        input: PathBuf,
        /// Certificate output path (default: input with .cert.json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Factor a polynomial, or a family member at a concrete exponent.
    Factor {
        /// Polynomial text, e.g. "x^5+x^4+1".
        poly: Option<String>,
        /// Family description (JSON); requires --n.
        #[arg(long)]
        family: Option<PathBuf>,
        /// Specialization exponent for --family.
        #[arg(long)]
        n: Option<i64>,
    },
    /// Find moduli k whose residue window traps a sparse exponent list.
    FindK {
        /// The exponents, strictly increasing.
        v: Vec<u64>,
        /// Window fraction, e.g. "1/4".
        #[arg(long, default_value = "1/4")]
        eps: String,
        /// Least admissible modulus.
        #[arg(long, default_value = "2")]
        k0: String,
        /// How many scanned moduli to list.
        #[arg(long, default_value_t = 25)]
        limit: usize,
    },
    /// Classify for which n the substitution y → yⁿ makes F(x,yⁿ) factor.
    Capelli {
        /// Family description (JSON).
        input: PathBuf,
        /// The exponent to report on.
        #[arg(long)]
        n: u64,
    },
    /// Replay a certificate document and confirm every recorded check.
    Verify {
        /// Certificate document (JSON).
        cert: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let budgets = Budgets {
        t_max: cli.t_max,
        points: cli.points,
        seed: cli.seed,
        ..Budgets::default()
    };
    match &cli.command {
        Command::Analyze { input, out } => cmd_analyze(cli, &budgets, input, out.as_deref()),
        Command::Factor { poly, family, n } => {
            cmd_factor(cli, poly.as_deref(), family.as_deref(), *n)
        }
        Command::FindK { v, eps, k0, limit } => cmd_find_k(cli, v, eps, k0, *limit),
        Command::Capelli { input, n } => cmd_capelli(cli, &budgets, input, *n),
        Command::Verify { cert } => cmd_verify(cli, cert),
    }
}

/// Reads and parses a family description file.
fn load_family(path: &std::path::Path) -> Result<FamilyInput> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read family file {}", path.display()))?;
    let doc: FamilyInputDoc = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a valid family description", path.display()))?;
    FamilyInput::from_doc(&doc).map_err(|e| anyhow!("{e}"))
}

/// Shortens a long decimal for display.
fn short_number(s: &str) -> String {
    if s.len() <= 24 {
        s.to_string()
    } else {
        format!("{}... ({} digits)", &s[..12], s.len())
    }
}

fn describe_check(check: &CheckRecord) -> String {
    match check {
        CheckRecord::EvaluationPoints { counted, required, deg_y, .. } => {
            format!("evaluation certificate, {counted}/{required} points, y-degree {deg_y}")
        }
        CheckRecord::DigitReconstruction { verdict, .. } => {
            format!("digit reconstruction: {verdict}")
        }
    }
}

fn verdict_name(v: Verdict) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|x| x.as_str().map(str::to_string))
        .unwrap_or_else(|| format!("{v:?}"))
}

fn print_certificate_summary(cert: &Certificate) {
    println!("verdict: {}", verdict_name(cert.verdict));
    if let Some(base) = &cert.base {
        println!("base F(x,y): {}", describe_check(&base.check));
    }
    let mut side = 0;
    let mut cong = 0;
    let mut quartic = 0;
    let mut by_square = 0;
    let mut verified = 0;
    let mut factored = 0;
    let mut undecided = 0;
    for cell in &cert.grid {
        match cell.outcome {
            CellOutcome::SideConditionExcluded { .. } => side += 1,
            CellOutcome::CongruenceObstructed { .. } => cong += 1,
            CellOutcome::QuarticRouteExcluded { .. } => quartic += 1,
            CellOutcome::SettledBySquare => by_square += 1,
            CellOutcome::ReducibleBySquare | CellOutcome::FactorizationFound { .. } => {
                factored += 1
            }
            CellOutcome::Verified { .. } => verified += 1,
            CellOutcome::Undecided { .. } => undecided += 1,
        }
    }
    println!(
        "grid: {} cells — {side} side-condition, {cong} congruence, {quartic} parity-filter, \
         {by_square} via square, {verified} verified, {factored} factored, {undecided} undecided",
        cert.grid.len()
    );
    if !cert.skipped_moduli.is_empty() {
        println!("skipped moduli: {:?}", cert.skipped_moduli);
    }
    match &cert.reciprocal {
        ReciprocalRecord::FamilyReciprocal { sign } => {
            println!("reciprocal: every large member equals {} its reversal", if *sign >= 0 { "+" } else { "-" })
        }
        ReciprocalRecord::NoReciprocalFactors { candidates, .. } => println!(
            "reciprocal: no reciprocal factors; {} candidate(s) excluded",
            candidates.len()
        ),
        ReciprocalRecord::Unresolved { reason, .. } => println!("reciprocal: unresolved ({reason})"),
        ReciprocalRecord::NotEvaluated => {}
    }
    if let Some(eff) = &cert.effective_n {
        println!("asserted from: n ≥ {}", short_number(&eff.bound));
    }
    for blocker in &cert.blockers {
        println!("blocker: {blocker}");
    }
}

fn cmd_analyze(cli: &Cli, budgets: &Budgets, input: &PathBuf, out: Option<&std::path::Path>) -> Result<u8> {
    let family = load_family(input)?;
    let t0 = Instant::now();
    let cert = analyze_family(&family, budgets).map_err(|e| anyhow!("{e}"))?;
    let ms = t0.elapsed().as_millis() as u64;
    let doc = CertificateDocument::new(cert, ms, cli.threads);
    let out_path = out
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| input.with_extension("cert.json"));
    let rendered = serde_json::to_string_pretty(&doc)?;
    fs::write(&out_path, rendered.clone() + "\n")
        .with_context(|| format!("cannot write {}", out_path.display()))?;
    if cli.json {
        println!("{rendered}");
    } else {
        print_certificate_summary(&doc.certificate);
        println!("certificate: {}", out_path.display());
    }
    Ok(if doc.certificate.verdict.is_conclusive() { 0 } else { 2 })
}

fn print_factors(listing: &ConcreteFactorization) {
    if let Some(n) = listing.n {
        println!("n = {n}: {}", listing.poly.text);
    } else {
        println!("{}", listing.poly.text);
    }
    if listing.unit != 1 {
        println!("  unit: {}", listing.unit);
    }
    if listing.content != "1" {
        println!("  content: {}", listing.content);
    }
    if listing.factors.len() == 1 && listing.factors[0].multiplicity == 1 {
        println!("  irreducible");
    }
    for entry in &listing.factors {
        let flag = if entry.is_reciprocal { "reciprocal" } else { "non-reciprocal" };
        if entry.multiplicity == 1 {
            println!("  ({})  {flag}", entry.factor.text);
        } else {
            println!("  ({})^{}  {flag}", entry.factor.text, entry.multiplicity);
        }
    }
}

fn cmd_factor(
    cli: &Cli,
    poly: Option<&str>,
    family: Option<&std::path::Path>,
    n: Option<i64>,
) -> Result<u8> {
    let listing = match (poly, family, n) {
        (Some(text), None, None) => {
            let f = parse_poly(text).map_err(|e| anyhow!("{e}"))?;
            factor_listing(&f).map_err(|e| anyhow!("{e}"))?
        }
        (None, Some(path), Some(n)) => {
            let fam = load_family(path)?;
            concrete_check(&fam, n).map_err(|e| anyhow!("{e}"))?
        }
        _ => bail!("pass either a polynomial, or --family FILE with --n N"),
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&listing)?);
    } else {
        print_factors(&listing);
    }
    Ok(0)
}

/// Parses an exact rational like "1/4" or "2".
fn parse_rational(s: &str) -> Result<BigRational> {
    s.parse::<BigRational>()
        .map_err(|e| anyhow!("{s:?} is not an exact rational: {e}"))
}

fn cmd_find_k(cli: &Cli, v: &[u64], eps: &str, k0: &str, limit: usize) -> Result<u8> {
    const SCAN_CAP: u64 = 100_000_000;
    let vector = ExponentVector::new(v.to_vec()).map_err(|e| anyhow!("{e}"))?;
    let cfg = ReductionConfig::new(parse_rational(eps)?, parse_rational(k0)?)
        .map_err(|e| anyhow!("{e}"))?;
    let rho = vector.rho() as u64;
    let threshold = v_bound(rho, &cfg);
    let constructive = match find_k_constructive(&vector, &cfg) {
        Ok(ck) => Some(ck),
        Err(lacpoly::Error::BelowThreshold { .. }) => None,
        Err(e) => return Err(anyhow!("{e}")),
    };
    let scan = if vector.max_exponent() <= SCAN_CAP {
        Some(find_k_bruteforce(&vector, &cfg))
    } else {
        None
    };
    let agreement = match (&constructive, &scan) {
        (Some(ck), Some(list)) => Some(list.binary_search(&ck.k).is_ok()),
        _ => None,
    };

    if cli.json {
        let payload = serde_json::json!({
            "rho": rho,
            "v_max": vector.max_exponent(),
            "threshold": threshold.to_string(),
            "above_threshold": constructive.is_some(),
            "constructive": constructive.as_ref().map(|ck| serde_json::json!({
                "k": ck.k,
                "d": ck.d,
                "collision": ck.collision,
                "w": ck.w,
            })),
            "scan": scan.as_ref().map(|list| serde_json::json!({
                "total": list.len(),
                "first": list.iter().take(limit).collect::<Vec<_>>(),
            })),
            "agreement": agreement,
        });
        println!("{}", serde_json::to_string_pretty(&payload)?);
    } else {
        println!("rho = {rho}, v_max = {}", vector.max_exponent());
        println!("guarantee threshold V(rho) = {}", short_number(&threshold.to_string()));
        match &constructive {
            Some(ck) => {
                println!("constructive k = {} (pigeonhole difference d = {})", ck.k, ck.d);
                if let Some((d1, d2)) = ck.collision {
                    println!("  colliding scan indices: {d1}, {d2}");
                }
            }
            None => println!("v_max is below the guarantee threshold; no constructive k"),
        }
        match &scan {
            Some(list) => {
                let shown: Vec<u64> = list.iter().copied().take(limit).collect();
                println!("scanned moduli: {} total, first {:?}", list.len(), shown);
                if let Some(agree) = agreement {
                    println!(
                        "constructive k {} in the scanned list",
                        if agree { "appears" } else { "does NOT appear" }
                    );
                }
            }
            None => println!("scan skipped: v_max exceeds {SCAN_CAP}"),
        }
    }
    // Inconclusive only when nothing could be asserted either way.
    Ok(if constructive.is_none() && scan.is_none() { 2 } else { 0 })
}

fn modulus_outcome_name(o: ModulusOutcome) -> &'static str {
    match o {
        ModulusOutcome::CongruenceObstructed => "congruence-obstructed",
        ModulusOutcome::QuarticRouteExcluded => "quartic-route-excluded",
        ModulusOutcome::SettledBySquare => "settled-by-square",
        ModulusOutcome::ReducibleBySquare => "reducible-by-square",
        ModulusOutcome::OracleIrreducible => "verified-irreducible",
        ModulusOutcome::OracleReducible => "reducible",
        ModulusOutcome::OracleUndecided => "undecided",
    }
}

fn cmd_capelli(cli: &Cli, budgets: &Budgets, input: &PathBuf, n: u64) -> Result<u8> {
    let family = load_family(input)?;
    let mut oracle = |w: &BiPoly| oracle_outcome(w, budgets);
    let verdict = classify_capelli(&family.spec, n, &mut oracle).map_err(|e| anyhow!("{e}"))?;
    if cli.json {
        let payload = serde_json::json!({
            "n": verdict.n,
            "status": match &verdict.status {
                CapelliStatus::IrreducibleForAllN => serde_json::json!({"kind": "irreducible_for_all_n"}),
                CapelliStatus::ReducibleForNDivisibleBy(ms) =>
                    serde_json::json!({"kind": "reducible_for_n_divisible_by", "moduli": ms}),
                CapelliStatus::Undecided(ms) =>
                    serde_json::json!({"kind": "undecided", "moduli": ms}),
            },
            "reducible_at_n": verdict.reducible_at_n,
            "moduli": verdict.witnesses.iter().map(|w| serde_json::json!({
                "modulus": w.modulus,
                "outcome": modulus_outcome_name(w.outcome),
            })).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&payload)?);
    } else {
        match &verdict.status {
            CapelliStatus::IrreducibleForAllN => {
                println!("F(x,y^n) is irreducible for every positive n")
            }
            CapelliStatus::ReducibleForNDivisibleBy(ms) => {
                println!("F(x,y^n) is reducible exactly when n is divisible by one of {ms:?}")
            }
            CapelliStatus::Undecided(ms) => println!("undecided at moduli {ms:?}"),
        }
        for w in &verdict.witnesses {
            println!("  m = {}: {}", w.modulus, modulus_outcome_name(w.outcome));
        }
        match verdict.reducible_at_n {
            Some(true) => println!("at n = {n}: reducible"),
            Some(false) => println!("at n = {n}: irreducible"),
            None => println!("at n = {n}: depends on an unsettled modulus"),
        }
    }
    Ok(match verdict.status {
        CapelliStatus::Undecided(_) => 2,
        _ => 0,
    })
}

fn cmd_verify(cli: &Cli, cert: &PathBuf) -> Result<u8> {
    let text = fs::read_to_string(cert)
        .with_context(|| format!("cannot read certificate {}", cert.display()))?;
    let doc: CertificateDocument = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a certificate document", cert.display()))?;
    let report = doc.verify().map_err(|e| anyhow!("{e}"))?;
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else if report.pass {
        println!(
            "certificate verifies: replay under the recorded budgets reproduced all {} grid cells and the verdict {}",
            doc.certificate.grid.len(),
            verdict_name(doc.certificate.verdict)
        );
    } else {
        println!("certificate DOES NOT verify:");
        for m in &report.mismatches {
            println!("  {m}");
        }
    }
    Ok(if report.pass { 0 } else { 1 })
}

//! Command-line front end.
//!
//! Reports are `key: value` lines, or one JSON object with the same keys under
//! `--json`. Exit codes: 0 for a definite verdict, 2 for Unknown, 1 for usage,
//! parse and certificate errors.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::avo::{
    avoradius_for_shape, equal_extension_counts, ktep_check, safe_symbol_check, tssm_gap_check, AvoFinding,
    EecVerdict, TssmVerdict,
};
use crate::avofactors::{build_graph_sft, factor_certificate, image_forbidden};
use crate::certificates::{find_certificate, Certificate, CertificateSearch, Family};
use crate::corpus;
use crate::error::{Error, Result};
use crate::format::{load_certificate, parse_shape, parse_spec_document, serialize_certificate, serialize_spec, CERTIFICATE_FORMAT};
use crate::group::{Group, Point};
use crate::languages::{decide_emptiness, decide_inclusion, project_to_subgroup, Emptiness, Inclusion, LanguageEngine, LanguageResult};
use crate::oracles::{Budget, LanguageOracle, ZTransferOracle};
use crate::patterns::SftSpec;
use crate::shapes::Shape;

#[derive(Parser, Debug)]
#[command(name = "avoshift", version, about = "Certificates, exact languages and safe decisions for SFTs on groups")]
struct Cli {
    /// Print the report as one JSON object.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct BudgetArgs {
    /// Preset: small, default or large.
    #[arg(long, default_value = "default")]
    budget: String,
    #[arg(long)]
    radius_cap: Option<u32>,
    #[arg(long)]
    node_cap: Option<u64>,
    #[arg(long)]
    max_patterns: Option<usize>,
    #[arg(long)]
    max_verify_radius: Option<u32>,
    #[arg(long)]
    max_candidate_radius: Option<u32>,
    #[arg(long)]
    max_candidate_patterns: Option<usize>,
    #[arg(long)]
    max_refinements: Option<usize>,
    #[arg(long)]
    max_working_radius: Option<u32>,
    #[arg(long)]
    max_period: Option<i64>,
}

impl BudgetArgs {
    fn resolve(&self) -> Result<Budget> {
        let mut b = Budget::by_name(&self.budget)?;
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { b.$f = v; })* };
        }
        set!(radius_cap, node_cap, max_patterns, max_verify_radius, max_candidate_radius,
             max_candidate_patterns, max_refinements, max_working_radius, max_period);
        Ok(b)
    }
}

#[derive(Args, Debug, Clone)]
struct ShapeArgs {
    /// Cells as JSON, e.g. `[[0,0],[1,0]]` or `["e","a"]`.
    #[arg(long)]
    shape: Option<String>,
    /// The ball of this radius around the identity.
    #[arg(long)]
    ball: Option<u32>,
    /// An interval `a..b` of Z (inclusive).
    #[arg(long)]
    range: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    Avoradius,
    Eec,
    SafeSymbol,
    Ktep,
    Tssm,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a certificate (uniform definition on a shape family).
    Certify {
        spec: PathBuf,
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Write the certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact language on a finite shape.
    Language {
        /// Spec or certificate file.
        input: PathBuf,
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Print every pattern.
        #[arg(long)]
        list: bool,
    },
    /// Decide whether the first shift is contained in the second.
    Compare {
        x: PathBuf,
        y: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Decide emptiness.
    Empty {
        spec: PathBuf,
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Forbidden patterns of the restriction to the subgroup of the first `axis` axes.
    Project {
        input: PathBuf,
        #[arg(long)]
        axis: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forbidden patterns of a factor image.
    Factor {
        spec: PathBuf,
        /// identity, xor or zero; defaults to the spec's local_map.
        #[arg(long)]
        map: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Avo-property checks.
    Analyze {
        spec: PathBuf,
        #[arg(long, value_enum)]
        check: Check,
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long, default_value_t = 4)]
        r_max: u32,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        gap: u32,
        #[arg(long, default_value_t = 1)]
        window: u32,
        /// auto, transfer, certificate, spacetime-f or none.
        #[arg(long, default_value = "auto")]
        oracle: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print a built-in example spec.
    Example {
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Report {
    fields: Vec<(String, String)>,
    code: i32,
}

impl Report {
    fn new(command: &str) -> Self {
        Report {
            fields: vec![("command".into(), command.into())],
            code: 0,
        }
    }

    fn set(&mut self, k: &str, v: impl ToString) {
        self.fields.push((k.into(), v.to_string()));
    }

    fn unknown(&mut self, reason: impl ToString) {
        self.set("verdict", "unknown");
        self.set("reason", reason);
        self.code = 2;
    }

    fn render(&self, json: bool) -> String {
        if json {
            let body: Vec<String> = self
                .fields
                .iter()
                .map(|(k, v)| format!("  {}: {}", serde_json::to_string(k).unwrap(), serde_json::to_string(v).unwrap()))
                .collect();
            format!("{{\n{}\n}}\n", body.join(",\n"))
        } else {
            self.fields
                .iter()
                .map(|(k, v)| format!("{k}: {}\n", v.replace('\n', "\n  ")))
                .collect()
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn digest(texts: &[&str]) -> String {
    let mut h = Sha256::new();
    for t in texts {
        h.update(t.as_bytes());
    }
    hex::encode(h.finalize())[..16].to_string()
}

fn family_for(group: &Group, family: &Option<String>) -> Result<Family> {
    match family {
        Some(f) => Family::from_key(f),
        None => Ok(Family::default_for(group)),
    }
}

fn is_certificate(text: &str) -> bool {
    text.contains(CERTIFICATE_FORMAT)
}

/// A certificate from a certificate file (re-verified) or by search on a spec file.
fn certificate_from(text: &str, family: &Option<String>, budget: &Budget) -> Result<std::result::Result<Certificate, String>> {
    if is_certificate(text) {
        return Ok(Ok(load_certificate(text, budget)?));
    }
    let spec = parse_spec_document(text)?.spec;
    let fam = family_for(&spec.group, family)?;
    Ok(match find_certificate(&spec, fam, budget)? {
        CertificateSearch::Found(c) => Ok(c),
        CertificateSearch::Unknown(m) => Err(m),
    })
}

fn shape_from(group: &Group, args: &ShapeArgs) -> Result<Shape> {
    match (&args.shape, args.ball, &args.range) {
        (Some(s), None, None) => parse_shape(group, s),
        (None, Some(r), None) => Ok(group.ball(r)?.members.into_iter().collect()),
        (None, None, Some(r)) => {
            if group.axes() != 1 || !group.is_polycyclic() {
                return Err(Error::Usage("--range needs the group Z".into()));
            }
            let (a, b) = r
                .split_once("..")
                .and_then(|(a, b)| Some((a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?)))
                .ok_or_else(|| Error::Usage(format!("bad range '{r}' (expected a..b)")))?;
            Ok((a..=b).map(|x| Point(vec![x])).collect())
        }
        (None, None, None) => Err(Error::Usage("give one of --shape, --ball, --range".into())),
        _ => Err(Error::Usage("give only one of --shape, --ball, --range".into())),
    }
}

fn write_or_report(out: &Option<PathBuf>, text: &str, report: &mut Report, key: &str) -> Result<()> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            report.set(key, p.display());
        }
        None => report.set(key, text.trim_end()),
    }
    Ok(())
}

fn exact_oracle(spec: &SftSpec, name: &str, budget: &Budget) -> Result<Option<Box<dyn LanguageOracle>>> {
    let z = spec.group.is_polycyclic() && spec.group.axes() == 1 && spec.group.is_free_abelian();
    let certificate = || -> Result<Option<Box<dyn LanguageOracle>>> {
        Ok(match find_certificate(spec, Family::default_for(&spec.group), budget)? {
            CertificateSearch::Found(c) => Some(Box::new(LanguageEngine::new(c, *budget)?)),
            CertificateSearch::Unknown(_) => None,
        })
    };
    match name {
        "transfer" if z => Ok(Some(Box::new(ZTransferOracle::new(spec, budget.node_cap)?))),
        "transfer" => Err(Error::Usage("the transfer oracle needs the group Z".into())),
        "spacetime-f" => Ok(Some(Box::new(corpus::spacetime_f_oracle()?))),
        "certificate" => certificate(),
        "none" => Ok(None),
        "auto" if z => Ok(Some(Box::new(ZTransferOracle::new(spec, budget.node_cap)?))),
        "auto" => certificate(),
        _ => Err(Error::Usage(format!(
            "unknown oracle '{name}' (auto, transfer, certificate, spacetime-f, none)"
        ))),
    }
}

fn report_certificate(r: &mut Report, c: &Certificate) {
    r.set("verdict", "certificate");
    r.set("family", c.family);
    r.set("radius", c.radius);
    r.set("q_size", c.q.forbidden.len());
    r.set("q", c.q.describe_forbidden().join("\n"));
    r.set("prefixes", c.transcript.len());
    r.set("empty_shift", c.is_empty_shift());
}

fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Certify { spec, family, budget, out } => {
            let text = read(spec)?;
            let b = budget.resolve()?;
            let doc = parse_spec_document(&text)?;
            let mut r = Report::new("certify");
            r.set("input_digest", digest(&[&text]));
            r.set("budget", &budget.budget);
            for w in &doc.warnings {
                r.set("warning", w);
            }
            let fam = family_for(&doc.spec.group, family)?;
            match find_certificate(&doc.spec, fam, &b)? {
                CertificateSearch::Found(c) => {
                    report_certificate(&mut r, &c);
                    if let Some(p) = out {
                        std::fs::write(p, serialize_certificate(&c)).map_err(|e| Error::Io(e.to_string()))?;
                        r.set("certificate", p.display());
                    }
                }
                CertificateSearch::Unknown(m) => r.unknown(m),
            }
            Ok(r)
        }
        Command::Language { input, shape, family, budget, list } => {
            let text = read(input)?;
            let b = budget.resolve()?;
            let mut r = Report::new("language");
            r.set("input_digest", digest(&[&text]));
            r.set("budget", &budget.budget);
            let cert = match certificate_from(&text, family, &b)? {
                Ok(c) => c,
                Err(m) => {
                    r.unknown(m);
                    return Ok(r);
                }
            };
            let d = shape_from(&cert.q.group, shape)?;
            r.set("shape_cells", d.len());
            let engine = LanguageEngine::new(cert, b)?;
            match engine.language_on(&d)? {
                LanguageResult::Exact(set) => {
                    r.set("verdict", "exact");
                    r.set("count", set.len());
                    if *list {
                        let q = &engine.certificate().q;
                        let lines: Vec<String> = set.iter().map(|x| x.describe(&q.group, &q.alphabet)).collect();
                        r.set("patterns", lines.join("\n"));
                    }
                }
                LanguageResult::NotDerived(m) => r.unknown(m),
            }
            Ok(r)
        }
        Command::Compare { x, y, budget } => {
            let (tx, ty) = (read(x)?, read(y)?);
            let b = budget.resolve()?;
            let sx = parse_spec_document(&tx)?.spec;
            let sy = parse_spec_document(&ty)?.spec;
            let mut r = Report::new("compare");
            r.set("input_digest", digest(&[&tx, &ty]));
            r.set("budget", &budget.budget);
            match decide_inclusion(&sx, &sy, &b)? {
                Inclusion::Subset { reason } => {
                    r.set("verdict", "subset");
                    r.set("reason", reason);
                }
                Inclusion::NotSubset { witness } => {
                    r.set("verdict", "not-subset");
                    r.set("witness", witness.describe(&sx.group, &sx.alphabet));
                }
                Inclusion::Unknown(m) => r.unknown(m),
            }
            Ok(r)
        }
        Command::Empty { spec, family, budget } => {
            let text = read(spec)?;
            let b = budget.resolve()?;
            let s = parse_spec_document(&text)?.spec;
            let mut r = Report::new("empty");
            r.set("input_digest", digest(&[&text]));
            r.set("budget", &budget.budget);
            match decide_emptiness(&s, family_for(&s.group, family)?, &b)? {
                Emptiness::Empty { reason } => {
                    r.set("verdict", "empty");
                    r.set("reason", reason);
                }
                Emptiness::Nonempty { reason } => {
                    r.set("verdict", "nonempty");
                    r.set("reason", reason);
                }
                Emptiness::Unknown(m) => r.unknown(m),
            }
            Ok(r)
        }
        Command::Project { input, axis, budget, out } => {
            let text = read(input)?;
            let b = budget.resolve()?;
            let mut r = Report::new("project");
            r.set("input_digest", digest(&[&text]));
            r.set("budget", &budget.budget);
            let cert = match certificate_from(&text, &Some("ii".into()), &b)? {
                Ok(c) => c,
                Err(m) => {
                    r.unknown(m);
                    return Ok(r);
                }
            };
            let h = project_to_subgroup(&cert, *axis)?;
            r.set("verdict", "projected");
            r.set("subgroup", h.group.key());
            r.set("forbidden_count", h.forbidden.len());
            write_or_report(out, &serialize_spec(&h, None), &mut r, "spec")?;
            Ok(r)
        }
        Command::Factor { spec, map, budget, out } => {
            let text = read(spec)?;
            let b = budget.resolve()?;
            let doc = parse_spec_document(&text)?;
            let local = match (map, &doc.local_map) {
                (Some(name), _) => corpus::builtin_map(name, &doc.spec.group, doc.spec.alphabet_size())?,
                (None, Some(m)) => m.clone(),
                (None, None) => return Err(Error::Usage("no local_map in the spec; pass --map".into())),
            };
            let mut r = Report::new("factor");
            r.set("input_digest", digest(&[&text]));
            r.set("budget", &budget.budget);
            let rel = build_graph_sft(&doc.spec, &local)?;
            match factor_certificate(&rel, &b)? {
                CertificateSearch::Found(c) => {
                    let img = image_forbidden(&c)?;
                    r.set("verdict", "image");
                    r.set("radius", c.radius);
                    r.set("forbidden_count", img.forbidden.len());
                    write_or_report(out, &serialize_spec(&img, None), &mut r, "spec")?;
                }
                CertificateSearch::Unknown(m) => r.unknown(m),
            }
            Ok(r)
        }
        Command::Analyze { spec, check, shape, symbol, r_max, k, gap, window, oracle, budget } => {
            let text = read(spec)?;
            let b = budget.resolve()?;
            let s = parse_spec_document(&text)?.spec;
            let mut r = Report::new("analyze");
            r.set("input_digest", digest(&[&text]));
            r.set("budget", &budget.budget);
            r.set("check", check.to_possible_value().map_or(String::new(), |v| v.get_name().to_string()));
            analyze(&mut r, &s, *check, shape, symbol, *r_max, *k, *gap, *window, oracle, &b)?;
            Ok(r)
        }
        Command::Example { .. } => unreachable!("handled in run"),
    }
}

#[allow(clippy::too_many_arguments)]
fn analyze(
    r: &mut Report,
    s: &SftSpec,
    check: Check,
    shape: &ShapeArgs,
    symbol: &Option<String>,
    r_max: u32,
    k: usize,
    gap: u32,
    window: u32,
    oracle: &str,
    b: &Budget,
) -> Result<()> {
    let names = &s.alphabet;
    if check == Check::SafeSymbol {
        let name = symbol.as_ref().ok_or_else(|| Error::Usage("--symbol is required".into()))?;
        let a = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Usage(format!("symbol '{name}' is not in the alphabet")))?;
        r.set("verdict", if safe_symbol_check(s, a as u8)? { "safe" } else { "not-safe" });
        return Ok(());
    }
    let exact = exact_oracle(s, oracle, b)?;
    r.set("oracle", exact.as_ref().map_or("none", |o| o.name()));
    match check {
        Check::Avoradius => {
            let c = shape_from(&s.group, shape)?;
            let rep = avoradius_for_shape(s, &c, r_max, exact.as_deref(), b)?;
            match rep.finding {
                AvoFinding::Established { radius, .. } => {
                    r.set("verdict", "established");
                    r.set("avoradius", radius);
                }
                AvoFinding::NoneUpTo { r_max, .. } => {
                    r.set("verdict", "none-up-to");
                    r.set("r_max", r_max);
                }
                AvoFinding::BudgetedEvidence { radius, caveat } => {
                    r.set("verdict", "unknown");
                    r.set("evidence_radius", radius.map_or("none".into(), |x| x.to_string()));
                    r.set("reason", caveat);
                    r.code = 2;
                }
            }
            for w in &rep.failures {
                let fx: Vec<&str> = w.follower_x.iter().map(|a| names[*a as usize].as_str()).collect();
                let fy: Vec<&str> = w.follower_y.iter().map(|a| names[*a as usize].as_str()).collect();
                r.set(
                    &format!("witness_r{}", w.radius),
                    format!(
                        "{} -> {{{}}} vs {} -> {{{}}}",
                        w.x.describe(&s.group, names),
                        fx.join(","),
                        w.y.describe(&s.group, names),
                        fy.join(",")
                    ),
                );
            }
        }
        Check::Eec => {
            let c = shape_from(&s.group, shape)?;
            let Some(o) = exact else {
                r.unknown("no exact oracle");
                return Ok(());
            };
            match equal_extension_counts(s, &[c], o.as_ref())?.remove(0) {
                EecVerdict::Constant(n) => {
                    r.set("verdict", "constant");
                    r.set("count", n);
                }
                EecVerdict::Varies { x, count_x, y, count_y } => {
                    r.set("verdict", "varies");
                    r.set("x", format!("{} ({count_x})", x.describe(&s.group, names)));
                    r.set("y", format!("{} ({count_y})", y.describe(&s.group, names)));
                }
                EecVerdict::Withheld => r.unknown("language not derived"),
            }
        }
        Check::Ktep => {
            let c = shape_from(&s.group, shape)?;
            let lang = match &exact {
                Some(o) => o.language(&c)?,
                None => None,
            };
            match lang {
                Some(set) => {
                    r.set("patterns", set.len());
                    let holds = ktep_check(&s.group, &set, s.alphabet_size(), k)?;
                    r.set("verdict", if holds { "holds" } else { "fails" });
                }
                None => r.unknown("language not derived"),
            }
        }
        Check::Tssm => {
            let Some(o) = exact else {
                r.unknown("no exact oracle");
                return Ok(());
            };
            match tssm_gap_check(s, gap, window, o.as_ref(), b.max_patterns)? {
                TssmVerdict::HoldsOnWindow => r.set("verdict", "holds-on-window"),
                TssmVerdict::Fails { u, s: mid, v } => {
                    r.set("verdict", "fails");
                    r.set("u", u.describe(&s.group, names));
                    r.set("s", mid.describe(&s.group, names));
                    r.set("v", v.describe(&s.group, names));
                }
                TssmVerdict::Unknown(m) => r.unknown(m),
            }
        }
        Check::SafeSymbol => unreachable!(),
    }
    Ok(())
}

/// Parses `argv` (program name first) and runs one command.
pub fn run(argv: &[String]) -> Outcome {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code: 0,
                },
                _ => Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: 1,
                },
            };
        }
    };
    if let Command::Example { name, list } = &cli.command {
        // The spec itself goes to stdout so it can be redirected into a file.
        return match (name, list) {
            (Some(n), false) => match corpus::builtin_example(n) {
                Ok(text) => Outcome { stdout: text, stderr: String::new(), code: 0 },
                Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: 1 },
            },
            _ => Outcome { stdout: corpus::NAMES.join("\n") + "\n", stderr: String::new(), code: 0 },
        };
    }
    let start = Instant::now();
    match execute(&cli) {
        Ok(mut r) => {
            r.set("elapsed_ms", start.elapsed().as_millis());
            Outcome {
                stdout: r.render(cli.json),
                stderr: String::new(),
                code: r.code,
            }
        }
        Err(Error::Budget(m)) | Err(Error::Resource(m)) => {
            let mut r = Report::new("error");
            r.unknown(m);
            Outcome {
                stdout: r.render(cli.json),
                stderr: String::new(),
                code: 2,
            }
        }
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: 1,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> Outcome {
        let mut v = vec!["avoshift".to_string()];
        v.extend(args.iter().map(|s| s.to_string()));
        run(&v)
    }

    fn example_file(dir: &std::path::Path, name: &str) -> String {
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, call(&["example", name]).stdout).unwrap();
        path.display().to_string()
    }

    fn field<'a>(out: &'a Outcome, key: &str) -> Option<&'a str> {
        out.stdout.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix(": "))
    }

    fn tmp(tag: &str) -> std::path::PathBuf {
        let d = std::env::temp_dir().join(format!("avoshift-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn certify_and_language_through_a_file() {
        let d = tmp("cert");
        let gm = example_file(&d, "goldenmean");
        let cert = d.join("gm.cert").display().to_string();
        let out = call(&["certify", &gm, "--family", "ii", "--out", &cert]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert_eq!(field(&out, "radius"), Some("1"));
        let lang = call(&["language", &cert, "--range", "0..9"]);
        assert_eq!(field(&lang, "count"), Some("144"));
        let keys: Vec<&str> = out.stdout.lines().filter_map(|l| l.split_once(": ").map(|x| x.0)).collect();
        assert_eq!(keys[0], "command");
        assert_eq!(keys[1], "input_digest");
        assert_eq!(*keys.last().unwrap(), "elapsed_ms");
    }

    #[test]
    fn compare_reports_the_witness() {
        let d = tmp("cmp");
        let gm = example_file(&d, "goldenmean");
        let full = d.join("full.json");
        std::fs::write(&full, r#"{"group": "Z", "alphabet": ["0", "1"], "forbidden": []}"#).unwrap();
        let out = call(&["compare", full.to_str().unwrap(), &gm]);
        assert_eq!(out.code, 0);
        assert_eq!(field(&out, "verdict"), Some("not-subset"));
        assert_eq!(field(&out, "witness"), Some("{(0)=1, (1)=1}"));
    }

    #[test]
    fn json_mode_has_the_same_keys() {
        let d = tmp("json");
        let gm = example_file(&d, "goldenmean");
        let text = call(&["empty", &gm]);
        let json = call(&["empty", &gm, "--json"]);
        let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
        let obj = v.as_object().unwrap();
        for line in text.stdout.lines() {
            let (k, _) = line.split_once(": ").unwrap();
            assert!(obj.contains_key(k), "{k}");
        }
        assert_eq!(obj["verdict"], "nonempty");
    }

    #[test]
    fn exit_codes() {
        let d = tmp("codes");
        let st = example_file(&d, "spacetimeF");
        assert_eq!(call(&["certify", &st, "--family", "ii", "--budget", "small"]).code, 2);
        assert_eq!(call(&["certify"]).code, 1);
        assert_eq!(call(&["example", "nope"]).code, 1);
        assert_eq!(call(&["certify", &st, "--budget", "huge"]).code, 1);
        let bad = d.join("bad.json");
        std::fs::write(&bad, "{\"group\": \"Z\"").unwrap();
        let out = call(&["empty", bad.to_str().unwrap()]);
        assert_eq!(out.code, 1);
        assert!(out.stderr.starts_with("error:"));
        assert_eq!(call(&["--help"]).code, 0);
    }

    #[test]
    fn analyze_checks() {
        let d = tmp("analyze");
        let hs = example_file(&d, "hardsquare-safe");
        let out = call(&["analyze", &hs, "--check", "safe-symbol", "--symbol", "0"]);
        assert_eq!(field(&out, "check"), Some("safe-symbol"));
        assert_eq!(field(&out, "verdict"), Some("safe"));
        let out = call(&["analyze", &hs, "--check", "tssm", "--gap", "1"]);
        assert_eq!(field(&out, "verdict"), Some("fails"));
        let led = example_file(&d, "ledrappier");
        let out = call(&["analyze", &led, "--check", "ktep", "--shape", "[[0,0],[1,0],[0,1]]", "--k", "1"]);
        assert_eq!(field(&out, "verdict"), Some("holds"), "{}", out.stdout);
        let out = call(&["project", &led, "--axis", "1"]);
        assert_eq!(field(&out, "forbidden_count"), Some("0"));
        let out = call(&["factor", &led, "--map", "zero"]);
        assert_eq!(field(&out, "forbidden_count"), Some("1"));
    }
}

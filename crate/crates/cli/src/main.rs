use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use unital_core::figueroa::{build_figueroa, point_records, verify_figueroa_theorems};
use unital_core::groups::Permutation;
use unital_core::incidence::{
    isomorphism_search, onan_search, order_from_point_count, parse_unital_text, read_unital,
    unital_text, validate_unital, IsoOutcome, OnanConfiguration, OnanOutcome, ReadError,
};
use unital_core::plane::hermitian_unital;
use unital_core::structure::{
    classify_with_atlas, constant_intersection_check, subunital_analysis, Conclusion,
    IntersectionReport, SubunitalReport,
};
use unital_core::translation::{
    build_atlas, check_lemma_trs_omega_p, orbit_congruence_check, translation_axioms,
    translations_at, AtlasSummary, AxiomReport, CongruenceReport, TrsOmegaReport,
};
use unital_core::Unital;

/// Build unitals and verify their translation structure.
#[derive(Parser)]
#[command(name = "unitals", version)]
struct Cli {
    /// Worker threads for parallel searches; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the hermitian unital of order q.
    BuildHermitian {
        /// Order of the unital; q must be a prime power.
        #[arg(long)]
        q: u32,
        /// Output file; stdout by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the Figueroa polar unital of order q³ and a JSON sidecar of
    /// point coordinates; print the verification report.
    BuildFigueroa {
        /// Order of the base field; the unital has order q³.
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// Unital file; the sidecar goes to `<out>.points.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the unital axioms.
    Validate {
        /// Unital file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Order to validate against; inferred from the point count by default.
        #[arg(long)]
        q: Option<usize>,
        /// Output file; stdout by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List all translations, or those with one center.
    Translations {
        /// Unital file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Only this center.
        #[arg(long)]
        center: Option<u32>,
        /// Output file; stdout by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Centers by translation order, centerless points, and group orders.
    Omega {
        /// Unital file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output file; stdout by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether the unital is hermitian under the translation hypotheses.
    Classify {
        /// Unital file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output file; stdout by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyse the substructure on the centers of p-translations.
    Subunital {
        /// Unital file.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        p: u32,
        /// Output file; stdout by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for an O'Nan configuration.
    Onan {
        /// Unital file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Node cap; 0 searches exhaustively.
        #[arg(long, default_value_t = 0)]
        budget: u64,
        /// Output file; stdout by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for an isomorphism between two unitals (give --in twice).
    Isomorphic {
        /// Unital file; give exactly two.
        #[arg(long = "in", num_args = 1, required = true)]
        input: Vec<PathBuf>,
        /// Node cap; 0 searches exhaustively.
        #[arg(long, default_value_t = 0)]
        budget: u64,
        /// Output file; stdout by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check the translation axioms and the lemmas on Ω_p.
    CheckLemmas {
        /// Unital file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Restrict to one prime; all primes in K by default.
        #[arg(long)]
        p: Option<u32>,
        /// Output file; stdout by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    /// The analysis ran and refuted the expectation.
    Refuted(String),
    Usage(String),
}

type Outcome = Result<bool, Failure>;

#[derive(Serialize)]
struct Input {
    paths: Vec<String>,
    v: usize,
    q: usize,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    input: Input,
    #[serde(flatten)]
    report: T,
}

fn emit<T: Serialize>(
    out: Option<&Path>,
    command: &str,
    input: Input,
    report: T,
) -> Result<(), Failure> {
    let envelope = Envelope {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        input,
        report,
    };
    write_text(out, &to_json(&envelope))
}

/// Indented JSON with keys sorted and scalar arrays kept on one line.
fn to_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("serializable report");
    let mut out = String::new();
    render(&value, 0, &mut out);
    out.push('\n');
    out
}

fn render(value: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match value {
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => {
            let parts: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push('[');
            out.push_str(&parts.join(", "));
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                render(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                render(x, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Unital, Failure> {
    read_unital(path).map_err(|e| match e {
        ReadError::Invalid(report) => Failure::Refuted(format!(
            "{}: not a unital: {}",
            path.display(),
            serde_json::to_string(&report).expect("serializable report")
        )),
        ReadError::BadPointCount { .. } => Failure::Refuted(format!("{}: {e}", path.display())),
        other => Failure::Usage(format!("{}: {other}", path.display())),
    })
}

fn describe(paths: &[&Path], u: &Unital) -> Input {
    Input {
        paths: paths.iter().map(|p| p.display().to_string()).collect(),
        v: u.v(),
        q: u.order(),
    }
}

#[derive(Serialize)]
struct TranslationEntry<'a> {
    order: u64,
    images: &'a Permutation,
}

#[derive(Serialize)]
struct CenterEntry<'a> {
    center: u32,
    translations: Vec<TranslationEntry<'a>>,
}

fn entries(c: u32, group: &[Permutation]) -> CenterEntry<'_> {
    CenterEntry {
        center: c,
        translations: group
            .iter()
            .map(|t| TranslationEntry {
                order: t.order(),
                images: t,
            })
            .collect(),
    }
}

#[derive(Serialize)]
struct LemmaChecks {
    axioms: AxiomReport,
    partition: bool,
    trs_omega: Vec<TrsOmegaReport>,
    congruence: Vec<CongruenceReport>,
    subunitals: Vec<SubunitalReport>,
    intersections: Vec<IntersectionReport>,
    holds: bool,
}

fn run(command: Command) -> Outcome {
    match command {
        Command::BuildHermitian { q, out } => {
            let u = hermitian_unital(q).map_err(|e| Failure::Usage(e.to_string()))?;
            write_text(out.as_deref(), &unital_text(u.incidence()))?;
            Ok(true)
        }
        Command::BuildFigueroa { q, out } => {
            let build = build_figueroa(q).map_err(|e| Failure::Refuted(e.to_string()))?;
            let u = &build.unital.unital;
            write_text(Some(&out), &unital_text(u.incidence()))?;
            let mut sidecar = out.clone().into_os_string();
            sidecar.push(".points.json");
            let records = point_records(&build.plane, &build.unital);
            write_text(Some(Path::new(&sidecar)), &to_json(&records))?;
            let atlas = build_atlas(u);
            let report = verify_figueroa_theorems(&build, &atlas);
            let holds = report.holds;
            #[derive(Serialize)]
            struct Section<T> {
                figueroa: T,
            }
            emit(
                None,
                "build-figueroa",
                describe(&[&out], u),
                Section { figueroa: report },
            )?;
            Ok(holds)
        }
        Command::Validate { input, q, out } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", input.display())))?;
            let inc = parse_unital_text(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
            let q = q.or_else(|| order_from_point_count(inc.v())).unwrap_or(0);
            let report = validate_unital(&inc, q);
            let valid = report.valid;
            let desc = Input {
                paths: vec![input.display().to_string()],
                v: inc.v(),
                q,
            };
            #[derive(Serialize)]
            struct Section<T> {
                validation: T,
            }
            emit(
                out.as_deref(),
                "validate",
                desc,
                Section { validation: report },
            )?;
            Ok(valid)
        }
        Command::Translations { input, center, out } => {
            let u = load(&input)?;
            let desc = describe(&[&input], &u);
            #[derive(Serialize)]
            struct Section<'a> {
                centers: Vec<CenterEntry<'a>>,
                #[serde(skip_serializing_if = "Option::is_none")]
                summary: Option<AtlasSummary>,
            }
            match center {
                Some(c) => {
                    if c as usize >= u.v() {
                        return Err(Failure::Usage(format!("no point {c}")));
                    }
                    let group = translations_at(&u, c);
                    let section = Section {
                        centers: vec![entries(c, &group)],
                        summary: None,
                    };
                    emit(out.as_deref(), "translations", desc, section)?;
                }
                None => {
                    let atlas = build_atlas(&u);
                    let section = Section {
                        centers: (0..u.v() as u32)
                            .map(|c| entries(c, atlas.translations(c)))
                            .collect(),
                        summary: Some(atlas.summary()),
                    };
                    emit(out.as_deref(), "translations", desc, section)?;
                }
            }
            Ok(true)
        }
        Command::Omega { input, out } => {
            let u = load(&input)?;
            let atlas = build_atlas(&u);
            #[derive(Serialize)]
            struct Section {
                summary: AtlasSummary,
                partition: bool,
            }
            let partition = atlas.partition_holds();
            let section = Section {
                summary: atlas.summary(),
                partition,
            };
            emit(out.as_deref(), "omega", describe(&[&input], &u), section)?;
            Ok(partition)
        }
        Command::Classify { input, out } => {
            let u = load(&input)?;
            let report = classify_with_atlas(&u, &build_atlas(&u));
            let decided = report.conclusion != Conclusion::Undetermined;
            emit(out.as_deref(), "classify", describe(&[&input], &u), report)?;
            Ok(decided)
        }
        Command::Subunital { input, p, out } => {
            let u = load(&input)?;
            let atlas = build_atlas(&u);
            let sub =
                subunital_analysis(&u, &atlas, p).map_err(|e| Failure::Refuted(e.to_string()))?;
            let intersection = constant_intersection_check(&u, &atlas, p).ok();
            #[derive(Serialize)]
            struct Section {
                subunital: SubunitalReport,
                intersection: Option<IntersectionReport>,
            }
            let section = Section {
                subunital: sub,
                intersection,
            };
            emit(
                out.as_deref(),
                "subunital",
                describe(&[&input], &u),
                section,
            )?;
            Ok(true)
        }
        Command::Onan { input, budget, out } => {
            let u = load(&input)?;
            #[derive(Serialize)]
            struct Section {
                outcome: &'static str,
                witness: Option<OnanConfiguration>,
                budget: u64,
            }
            let section = match onan_search(&u, budget) {
                OnanOutcome::Found(c) => Section {
                    outcome: "found",
                    witness: Some(c),
                    budget,
                },
                OnanOutcome::Absent => Section {
                    outcome: "absent",
                    witness: None,
                    budget,
                },
                OnanOutcome::BudgetExhausted { .. } => Section {
                    outcome: "budget-exhausted",
                    witness: None,
                    budget,
                },
            };
            emit(out.as_deref(), "onan", describe(&[&input], &u), section)?;
            Ok(true)
        }
        Command::Isomorphic { input, budget, out } => {
            let [a, b] = input.as_slice() else {
                return Err(Failure::Usage(
                    "isomorphic needs exactly two --in files".into(),
                ));
            };
            let (ua, ub) = (load(a)?, load(b)?);
            #[derive(Serialize)]
            struct Section {
                outcome: &'static str,
                map: Option<Vec<u32>>,
                budget: u64,
            }
            let (outcome, map) = match isomorphism_search(ua.incidence(), ub.incidence(), budget) {
                IsoOutcome::Found(map) => ("isomorphic", Some(map)),
                IsoOutcome::NotIsomorphic => ("not-isomorphic", None),
                IsoOutcome::BudgetExhausted { .. } => ("budget-exhausted", None),
            };
            let found = map.is_some();
            let section = Section {
                outcome,
                map,
                budget,
            };
            emit(
                out.as_deref(),
                "isomorphic",
                describe(&[a, b], &ua),
                section,
            )?;
            Ok(found)
        }
        Command::CheckLemmas { input, p, out } => {
            let u = load(&input)?;
            let atlas = build_atlas(&u);
            let primes: Vec<u32> = match p {
                Some(p) => vec![p],
                None => atlas.k().iter().copied().collect(),
            };
            let axioms = translation_axioms(&u, &atlas);
            let trs_omega: Vec<TrsOmegaReport> = primes
                .iter()
                .filter_map(|&p| check_lemma_trs_omega_p(&u, &atlas, p))
                .collect();
            let congruence: Vec<CongruenceReport> = atlas
                .orders()
                .into_iter()
                .filter(|n| p.is_none_or(|p| n % p as u64 == 0))
                .filter_map(|n| orbit_congruence_check(&atlas, n))
                .collect();
            let subunitals: Vec<SubunitalReport> = primes
                .iter()
                .filter_map(|&p| subunital_analysis(&u, &atlas, p).ok())
                .collect();
            let intersections: Vec<IntersectionReport> = primes
                .iter()
                .filter_map(|&p| constant_intersection_check(&u, &atlas, p).ok())
                .collect();
            // with every point a center, U_p must be ideally embedded and faithful
            let embedding_ok = !atlas.mho().is_empty()
                || subunitals.iter().all(|s| s.embedding.ideal && s.faithful);
            let partition = atlas.partition_holds();
            let holds = axioms.verified
                && partition
                && trs_omega.iter().all(|r| r.holds)
                && congruence.iter().all(|r| r.holds)
                && intersections.iter().all(|r| r.consistent)
                && embedding_ok;
            let section = LemmaChecks {
                axioms,
                partition,
                trs_omega,
                congruence,
                subunitals,
                intersections,
                holds,
            };
            emit(
                out.as_deref(),
                "check-lemmas",
                describe(&[&input], &u),
                section,
            )?;
            Ok(holds)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Refuted(msg)) => {
            eprintln!("refuted: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

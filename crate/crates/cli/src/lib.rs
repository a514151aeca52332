//! Command-line surface of the toolkit.  `run_from` is the whole CLI as a
//! function: it returns the exit code and the stdout payload, so tests can
//! drive commands without spawning processes.

pub mod document;
pub mod report;

use bdsk_core::dynamics::RelativeGbds;
use bdsk_core::ideal::{self, IdealError};
use bdsk_core::{k1gen, ktheory, suites};
use clap::{Parser, Subcommand, ValueEnum};
use document::{GraphDocument, SystemDocument};
use serde_json::Value;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Exit statuses: 0 success, 1 validation failure, 2 precondition failure.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "bdsk",
    version,
    about = "K-theory and ideal structure of finite Boolean dynamical systems"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a system document.
    Validate { file: PathBuf },
    /// K-groups of the system.
    KTheory { file: PathBuf },
    /// Coordinates of a projection class in the K0 presentation.
    K0Class {
        file: PathBuf,
        /// Comma-separated atom names; empty for the zero element.
        #[arg(long, default_value = "")]
        element: String,
    },
    /// Symbolic unitary certificates generating K1.
    K1Generators { file: PathBuf },
    /// Condition (K) decision with witness.
    ConditionK { file: PathBuf },
    /// The lattice of admissible pairs (gauge-invariant ideals).
    Ideals { file: PathBuf },
    /// Quotient system by the pair with the given index.
    Quotient {
        file: PathBuf,
        #[arg(long)]
        pair: usize,
    },
    /// K-groups of the ideal at the given pair, its quotient, and the full
    /// system, with the six-term rank identity.
    IdealK {
        file: PathBuf,
        #[arg(long)]
        pair: usize,
    },
    /// Kernel-inclusion liftability check (requires Condition (K)).
    Liftability { file: PathBuf },
    /// Encode a digraph as a system document.
    ImportGraph { file: PathBuf },
    /// Compare pipeline K-groups with the classical graph computation.
    CrossCheck { file: PathBuf },
    /// Run the oracle suites.
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Word-length cap for the embedding facet checks.
        #[arg(long, default_value_t = 3)]
        max_word_len: usize,
    },
}

pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
}

fn failure(code: i32, command: &str, message: String, format: Format) -> Outcome {
    let stdout = match format {
        Format::Text => format!("error: {message}\n"),
        Format::Json => pretty(report::envelope(
            command,
            serde_json::json!({ "error": message }),
        )),
    };
    Outcome {
        exit_code: code,
        stdout,
    }
}

fn pretty(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("reports serialize");
    s.push('\n');
    s
}

fn read_system(path: &Path) -> Result<(RelativeGbds, SystemDocument), (i32, String)> {
    let raw = std::fs::read_to_string(path).map_err(|e| {
        (
            EXIT_VALIDATION,
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    let doc: SystemDocument = serde_json::from_str(&raw)
        .map_err(|e| (EXIT_VALIDATION, format!("malformed document: {e}")))?;
    doc.validate().map_err(|e| (EXIT_VALIDATION, e.to_string()))
}

fn read_graph(path: &Path) -> Result<GraphDocument, (i32, String)> {
    let raw = std::fs::read_to_string(path).map_err(|e| {
        (
            EXIT_VALIDATION,
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    serde_json::from_str(&raw).map_err(|e| (EXIT_VALIDATION, format!("malformed document: {e}")))
}

/// Run the CLI on explicit arguments (the binary name included).
pub fn run_from<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            // Help and version are successful exits; usage errors are not.
            let code = if e.use_stderr() {
                EXIT_PRECONDITION
            } else {
                EXIT_OK
            };
            return Outcome {
                exit_code: code,
                stdout: e.to_string(),
            };
        }
    };
    let format = cli.format;
    match cli.command {
        Command::Validate { file } => validate_cmd(&file, format),
        Command::KTheory { file } => k_theory_cmd(&file, format),
        Command::K0Class { file, element } => k0_class_cmd(&file, &element, format),
        Command::K1Generators { file } => k1_generators_cmd(&file, format),
        Command::ConditionK { file } => condition_k_cmd(&file, format),
        Command::Ideals { file } => ideals_cmd(&file, format),
        Command::Quotient { file, pair } => quotient_cmd(&file, pair, format),
        Command::IdealK { file, pair } => ideal_k_cmd(&file, pair, format),
        Command::Liftability { file } => liftability_cmd(&file, format),
        Command::ImportGraph { file } => import_graph_cmd(&file, format),
        Command::CrossCheck { file } => cross_check_cmd(&file, format),
        Command::Selftest { seed, max_word_len } => selftest_cmd(seed, max_word_len, format),
    }
}

fn validate_cmd(file: &Path, format: Format) -> Outcome {
    match read_system(file) {
        Ok((_, canon)) => {
            let stdout = match format {
                Format::Text => "valid\n".to_string(),
                Format::Json => pretty(report::envelope(
                    "validate",
                    serde_json::json!({
                        "valid": true,
                        "system": serde_json::to_value(&canon).expect("document serializes"),
                    }),
                )),
            };
            Outcome {
                exit_code: EXIT_OK,
                stdout,
            }
        }
        Err((code, msg)) => failure(code, "validate", msg, format),
    }
}

fn k_theory_cmd(file: &Path, format: Format) -> Outcome {
    match read_system(file) {
        Ok((sys, _)) => {
            let kt = ktheory::k_groups(&sys);
            let stdout = match format {
                Format::Text => report::k_theory_text(&kt),
                Format::Json => pretty(report::envelope(
                    "k-theory",
                    serde_json::json!({ "k_theory": report::k_theory_value(&sys, &kt) }),
                )),
            };
            Outcome {
                exit_code: EXIT_OK,
                stdout,
            }
        }
        Err((code, msg)) => failure(code, "k-theory", msg, format),
    }
}

fn k0_class_cmd(file: &Path, element: &str, format: Format) -> Outcome {
    match read_system(file) {
        Ok((sys, _)) => {
            let names: Vec<&str> = element
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            let a = match sys.algebra().element_from_names(names) {
                Ok(a) => a,
                Err(e) => return failure(EXIT_VALIDATION, "k0-class", e.to_string(), format),
            };
            let kt = ktheory::k_groups(&sys);
            let cls = ktheory::k0_class(&kt, &a);
            let stdout = match format {
                Format::Text => {
                    let mut s = format!(
                        "element {{{}}} in K0 = {}\n",
                        a.atom_names().join(","),
                        kt.k0
                    );
                    let _ = writeln!(
                        s,
                        "torsion coordinates: [{}]",
                        cls.torsion_coords
                            .iter()
                            .map(|(m, r)| format!("{r} mod {m}"))
                            .collect::<Vec<_>>()
                            .join(", ")
                    );
                    let _ = writeln!(
                        s,
                        "free coordinates: [{}] (basis-dependent)",
                        cls.free_coords
                            .iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    );
                    s
                }
                Format::Json => pretty(report::envelope(
                    "k0-class",
                    serde_json::json!({
                        "element": a.atom_names(),
                        "class": report::k0_class_value(&cls),
                        "k0": report::group_value(kt.k0.free_rank, &kt.k0.torsion),
                    }),
                )),
            };
            Outcome {
                exit_code: EXIT_OK,
                stdout,
            }
        }
        Err((code, msg)) => failure(code, "k0-class", msg, format),
    }
}

fn k1_generators_cmd(file: &Path, format: Format) -> Outcome {
    match read_system(file) {
        Ok((sys, _)) => match k1gen::k1_generators(&sys) {
            Ok(certs) => {
                let stdout = match format {
                    Format::Text => {
                        let mut s = format!("{} K1 generator(s)\n", certs.len());
                        for (i, c) in certs.iter().enumerate() {
                            let _ = writeln!(
                                s,
                                "  [{i}] dim {} {}; U[0][0] = {}",
                                c.u.dim,
                                if c.transcript.all_passed() {
                                    "verified"
                                } else {
                                    "FAILED"
                                },
                                if c.u.dim > 0 {
                                    bdsk_core::star::render_element(&sys, &c.u[(0, 0)])
                                } else {
                                    "1".to_string()
                                }
                            );
                        }
                        s
                    }
                    Format::Json => pretty(report::envelope(
                        "k1-generators",
                        serde_json::json!({
                            "certificates": certs
                                .iter()
                                .map(|c| report::certificate_value(&sys, c))
                                .collect::<Vec<_>>(),
                        }),
                    )),
                };
                Outcome {
                    exit_code: EXIT_OK,
                    stdout,
                }
            }
            Err(e) => failure(EXIT_VALIDATION, "k1-generators", e.to_string(), format),
        },
        Err((code, msg)) => failure(code, "k1-generators", msg, format),
    }
}

fn condition_k_cmd(file: &Path, format: Format) -> Outcome {
    match read_system(file) {
        Ok((sys, _)) => {
            let ck = sys.condition_k();
            let stdout = match format {
                Format::Text => report::condition_k_text(&sys, &ck),
                Format::Json => pretty(report::envelope(
                    "condition-k",
                    report::condition_k_value(&sys, &ck),
                )),
            };
            Outcome {
                exit_code: EXIT_OK,
                stdout,
            }
        }
        Err((code, msg)) => failure(code, "condition-k", msg, format),
    }
}

fn ideals_cmd(file: &Path, format: Format) -> Outcome {
    match read_system(file) {
        Ok((sys, _)) => {
            let lattice = sys.enumerate_admissible_pairs();
            let stdout = match format {
                Format::Text => report::pairs_text(&lattice),
                Format::Json => pretty(report::envelope(
                    "ideals",
                    report::pairs_value(&sys, &lattice),
                )),
            };
            Outcome {
                exit_code: EXIT_OK,
                stdout,
            }
        }
        Err((code, msg)) => failure(code, "ideals", msg, format),
    }
}

fn pair_at(
    sys: &RelativeGbds,
    index: usize,
) -> Result<bdsk_core::dynamics::AdmissiblePair, String> {
    let lattice = sys.enumerate_admissible_pairs();
    lattice.pairs.get(index).cloned().ok_or_else(|| {
        format!(
            "pair index {index} out of range (have {})",
            lattice.pairs.len()
        )
    })
}

fn quotient_cmd(file: &Path, pair: usize, format: Format) -> Outcome {
    match read_system(file) {
        Ok((sys, _)) => {
            let p = match pair_at(&sys, pair) {
                Ok(p) => p,
                Err(msg) => return failure(EXIT_VALIDATION, "quotient", msg, format),
            };
            let q = sys
                .quotient_system(&p)
                .expect("enumerated pair is admissible");
            let doc = document::system_to_document(&q);
            let stdout = match format {
                Format::Text => doc.to_json(),
                Format::Json => pretty(report::envelope(
                    "quotient",
                    serde_json::json!({
                        "pair": { "h": p.h_top.atom_names(), "s": p.s_top.atom_names() },
                        "system": serde_json::to_value(&doc).expect("document serializes"),
                    }),
                )),
            };
            Outcome {
                exit_code: EXIT_OK,
                stdout,
            }
        }
        Err((code, msg)) => failure(code, "quotient", msg, format),
    }
}

fn ideal_k_cmd(file: &Path, pair: usize, format: Format) -> Outcome {
    match read_system(file) {
        Ok((sys, _)) => {
            let p = match pair_at(&sys, pair) {
                Ok(p) => p,
                Err(msg) => return failure(EXIT_VALIDATION, "ideal-k", msg, format),
            };
            match ideal::ideal_k_groups(&sys, &p) {
                Ok(rep) => {
                    let six = ideal::six_term_rank_check(&rep);
                    let stdout = match format {
                        Format::Text => format!(
                            "ideal:    K0 = {}, K1 = {}\nquotient: K0 = {}, K1 = {}\nfull:     K0 = {}, K1 = {}\nsix-term rank identity: {}\n",
                            rep.ideal_k.k0,
                            rep.ideal_k.k1(),
                            rep.quotient_k.k0,
                            rep.quotient_k.k1(),
                            rep.full_k.k0,
                            rep.full_k.k1(),
                            six
                        ),
                        Format::Json => pretty(report::envelope(
                            "ideal-k",
                            report::ideal_k_value(&sys, &rep, six),
                        )),
                    };
                    Outcome {
                        exit_code: EXIT_OK,
                        stdout,
                    }
                }
                Err(e) => failure(EXIT_VALIDATION, "ideal-k", e.to_string(), format),
            }
        }
        Err((code, msg)) => failure(code, "ideal-k", msg, format),
    }
}

fn liftability_cmd(file: &Path, format: Format) -> Outcome {
    match read_system(file) {
        Ok((sys, _)) => match ideal::liftability_report(&sys) {
            Ok(rep) => {
                let stdout = match format {
                    Format::Text => {
                        let mut s = format!(
                            "Condition (K) holds; {} admissible pair(s)\n",
                            rep.pairs.len()
                        );
                        for p in &rep.pairs {
                            let _ = writeln!(
                                s,
                                "  H = {{{}}}, S = {{{}}}: kernel rank {}, {}",
                                p.pair.h_top.atom_names().join(","),
                                p.pair.s_top.atom_names().join(","),
                                p.kernel_rank,
                                if p.passed() { "ok" } else { "FAIL" }
                            );
                        }
                        let _ = writeln!(s, "liftable: {}", rep.liftable);
                        s
                    }
                    Format::Json => pretty(report::envelope(
                        "liftability",
                        report::liftability_value(&sys, &rep),
                    )),
                };
                Outcome {
                    exit_code: EXIT_OK,
                    stdout,
                }
            }
            Err(e @ IdealError::ConditionKFails { .. }) => {
                failure(EXIT_PRECONDITION, "liftability", e.to_string(), format)
            }
            Err(e) => failure(EXIT_VALIDATION, "liftability", e.to_string(), format),
        },
        Err((code, msg)) => failure(code, "liftability", msg, format),
    }
}

fn import_graph_cmd(file: &Path, format: Format) -> Outcome {
    match read_graph(file) {
        Ok(doc) => match doc.to_digraph() {
            Ok(g) => {
                let sys = bdsk_core::dynamics::import_graph(&g);
                let out = document::system_to_document(&sys);
                let stdout = match format {
                    Format::Text => out.to_json(),
                    Format::Json => pretty(report::envelope(
                        "import-graph",
                        serde_json::json!({
                            "system": serde_json::to_value(&out).expect("document serializes"),
                        }),
                    )),
                };
                Outcome {
                    exit_code: EXIT_OK,
                    stdout,
                }
            }
            Err(e) => failure(EXIT_VALIDATION, "import-graph", e.to_string(), format),
        },
        Err((code, msg)) => failure(code, "import-graph", msg, format),
    }
}

fn cross_check_cmd(file: &Path, format: Format) -> Outcome {
    match read_graph(file) {
        Ok(doc) => match doc.to_digraph() {
            Ok(g) => {
                let check = ktheory::graph_cross_check(&g);
                let stdout = match format {
                    Format::Text => format!(
                        "pipeline:  K0 = {}, K1 = {}\nclassical: K0 = {}, K1 = {}\nmatch: {}\n",
                        check.pipeline_k0,
                        check.pipeline_k1,
                        check.classical_k0,
                        check.classical_k1,
                        check.matches
                    ),
                    Format::Json => pretty(report::envelope(
                        "cross-check",
                        report::cross_check_value(&check),
                    )),
                };
                Outcome {
                    exit_code: if check.matches {
                        EXIT_OK
                    } else {
                        EXIT_VALIDATION
                    },
                    stdout,
                }
            }
            Err(e) => failure(EXIT_VALIDATION, "cross-check", e.to_string(), format),
        },
        Err((code, msg)) => failure(code, "cross-check", msg, format),
    }
}

fn selftest_cmd(seed: u64, max_word_len: usize, format: Format) -> Outcome {
    let outcomes = suites::run_all(seed, max_word_len);
    let all = outcomes.iter().all(|o| o.passed);
    let stdout = match format {
        Format::Text => {
            let mut s = String::new();
            for o in &outcomes {
                let _ = writeln!(s, "{o}");
            }
            let _ = writeln!(s, "selftest: {}", if all { "pass" } else { "FAIL" });
            s
        }
        Format::Json => pretty(report::envelope(
            "selftest",
            report::suites_value(&outcomes),
        )),
    };
    Outcome {
        exit_code: if all { EXIT_OK } else { EXIT_VALIDATION },
        stdout,
    }
}

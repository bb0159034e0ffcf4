//! Command-line front end: channel analysis, generation, the example
//! regression table, peripheral spectra, and code extraction.
//!
//! Exit codes: 0 success, 1 regression-table mismatch, 2 bad input or
//! violated precondition, 3 internal consistency failure.

mod wire;

use clap::{Parser, Subcommand, ValueEnum};
use multdom::analysis::{analyze, reproduce, AnalysisReport};
use multdom::linalg::Tolerance;
use multdom::qec::{ucc_codes, uns_codes, ucs_vs_uns};
use multdom::spectral::{cyclic_group_check, is_irreducible, peripheral_eigenpairs};
use multdom::{Error, Tolerance64};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "multdom",
    about = "Multiplicative-domain and spectral analysis of quantum channels",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Relative singular-value cutoff for rank decisions
    /// [env: RANK_EPS, default 1e-10]
    #[arg(long, global = true)]
    rank_eps: Option<f64>,

    /// Eigenvalue comparison tolerance [env: EIG_EPS, default 1e-8]
    #[arg(long, global = true)]
    eig_eps: Option<f64>,

    /// Residual tolerance for identity checks
    /// [env: RESIDUAL_EPS, default 1e-9]
    #[arg(long, global = true)]
    residual_eps: Option<f64>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis of a channel (chain, kappa, spectra, verdicts, codes)
    Analyze {
        /// Channel JSON file or builtin:<name>[/<params>]
        input: String,
    },
    /// Emit the Kraus data of a channel family instance
    Gen {
        /// ChannelSpec JSON or builtin:<name>[/<params>]
        spec: String,
        /// Write to a file instead of stdout
        #[arg(long, short)]
        out: Option<std::path::PathBuf>,
    },
    /// Run the regression table over the documented example families
    Reproduce {
        /// Keep only rows whose name contains this substring
        #[arg(long)]
        filter: Option<String>,
    },
    /// Peripheral eigendata only
    Spectrum { input: String },
    /// Code structure only (UCC / UNS blocks)
    Qec { input: String },
}

fn main() {
    let cli = Cli::parse();
    let code = run(cli);
    std::process::exit(code);
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Shape(_) | Error::Precondition(_) | Error::NotCompletelyPositive(_) => 2,
        Error::Numeric(_) | Error::Consistency(_) => 3,
    }
}

fn tolerance_from(cli: &Cli) -> Result<Tolerance64, Error> {
    let pick = |flag: Option<f64>, env: &str, default: f64| -> Result<f64, Error> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match std::env::var(env) {
            Ok(s) => s
                .parse::<f64>()
                .map_err(|_| Error::Precondition(format!("cannot parse {env}='{s}'"))),
            Err(_) => Ok(default),
        }
    };
    Tolerance::new(
        pick(cli.rank_eps, "RANK_EPS", 1e-10)?,
        pick(cli.eig_eps, "EIG_EPS", 1e-8)?,
        pick(cli.residual_eps, "RESIDUAL_EPS", 1e-9)?,
    )
}

fn run(cli: Cli) -> i32 {
    let tol = match tolerance_from(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let result = match &cli.command {
        Command::Analyze { input } => cmd_analyze(input, cli.format, &tol),
        Command::Gen { spec, out } => cmd_gen(spec, out.as_deref(), &tol),
        Command::Reproduce { filter } => return cmd_reproduce(filter.as_deref(), cli.format, &tol),
        Command::Spectrum { input } => cmd_spectrum(input, cli.format, &tol),
        Command::Qec { input } => cmd_qec(input, cli.format, &tol),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn cmd_analyze(input: &str, format: Format, tol: &Tolerance64) -> Result<(), Error> {
    let (ch, echo) = wire::load_channel(input, tol)?;
    let report = analyze(&ch, echo, tol)?;
    match format {
        Format::Json => println!("{}", to_json(&report)?),
        Format::Table => print_report_table(&report),
    }
    Ok(())
}

fn cmd_gen(spec: &str, out: Option<&std::path::Path>, tol: &Tolerance64) -> Result<(), Error> {
    let (ch, _) = wire::parse_spec(spec, tol)?;
    let file = wire::ChannelFile::from_channel(&ch);
    let json = to_json(&file)?;
    match out {
        Some(path) => std::fs::write(path, json.as_bytes())
            .map_err(|e| Error::Precondition(format!("cannot write '{}': {e}", path.display())))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_reproduce(filter: Option<&str>, format: Format, tol: &Tolerance64) -> i32 {
    let rows = reproduce(filter, tol);
    let failed = rows.iter().filter(|r| !r.pass).count();
    match format {
        Format::Json => match to_json(&rows) {
            Ok(j) => println!("{j}"),
            Err(e) => {
                eprintln!("error: {e}");
                return 3;
            }
        },
        Format::Table => {
            let name_w = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
            let exp_w = rows.iter().map(|r| r.expected.len()).max().unwrap_or(8).max(8);
            println!("{:name_w$}  {:exp_w$}  computed", "name", "expected");
            for r in &rows {
                println!(
                    "{:name_w$}  {:exp_w$}  {} [{}]",
                    r.name,
                    r.expected,
                    r.computed,
                    if r.pass { "PASS" } else { "FAIL" }
                );
            }
            println!("{} rows, {} failed", rows.len(), failed);
        }
    }
    if rows.is_empty() {
        eprintln!("error: no rows matched the filter");
        return 2;
    }
    if failed > 0 {
        1
    } else {
        0
    }
}

#[derive(Serialize)]
struct SpectrumReport {
    eigenvalues: Vec<SpectrumRow>,
    cutoff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cyclic_group_order: Option<usize>,
}

#[derive(Serialize)]
struct SpectrumRow {
    re: f64,
    im: f64,
    modulus: f64,
    multiplicity: usize,
}

fn cmd_spectrum(input: &str, format: Format, tol: &Tolerance64) -> Result<(), Error> {
    let (ch, _) = wire::load_channel(input, tol)?;
    let pd = peripheral_eigenpairs(&ch, tol)?;
    let order = if is_irreducible(&ch, tol)?.irreducible {
        Some(cyclic_group_check(&pd, tol)?.order)
    } else {
        None
    };
    let report = SpectrumReport {
        eigenvalues: pd
            .clusters()
            .iter()
            .map(|&(v, m)| SpectrumRow { re: v.re, im: v.im, modulus: v.norm(), multiplicity: m })
            .collect(),
        cutoff: 1.0 - tol.eig_eps,
        cyclic_group_order: order,
    };
    match format {
        Format::Json => println!("{}", to_json(&report)?),
        Format::Table => {
            println!("peripheral eigenvalues (|λ| ≥ {:.10}):", report.cutoff);
            for row in &report.eigenvalues {
                println!(
                    "  {:+.12} {:+.12}i  |λ| = {:.12}  multiplicity {}",
                    row.re, row.im, row.modulus, row.multiplicity
                );
            }
            if let Some(m) = report.cyclic_group_order {
                println!("cyclic group order: {m}");
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct QecCliReport {
    ucc_blocks: Vec<(usize, usize)>,
    uns_blocks: Vec<(usize, usize)>,
    kappa: usize,
    ucc_equals_uns: bool,
    nontrivial_uns_code: bool,
}

fn cmd_qec(input: &str, format: Format, tol: &Tolerance64) -> Result<(), Error> {
    let (ch, _) = wire::load_channel(input, tol)?;
    let ucc = ucc_codes(&ch, tol)?;
    let uns = uns_codes(&ch, tol)?;
    let verdict = ucs_vs_uns(&ch, tol)?;
    let report = QecCliReport {
        ucc_blocks: ucc.structure.blocks.clone(),
        uns_blocks: uns.structure.blocks.clone(),
        kappa: verdict.kappa,
        ucc_equals_uns: verdict.equal,
        nontrivial_uns_code: uns.has_nontrivial_code(),
    };
    match format {
        Format::Json => println!("{}", to_json(&report)?),
        Format::Table => {
            println!("kappa: {}", report.kappa);
            println!("UCC blocks (n_k, m_k): {:?}", report.ucc_blocks);
            println!("UNS blocks (n_k, m_k): {:?}", report.uns_blocks);
            println!("UCC = UNS: {}", report.ucc_equals_uns);
            println!("nontrivial UNS code: {}", report.nontrivial_uns_code);
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(format!("serialisation: {e}")))
}

fn print_report_table(r: &AnalysisReport) {
    println!("dim: {}", r.dim);
    println!("kraus operators: {}", r.kraus_count);
    println!(
        "flags: cp {} | tp {} (residual {:.3e}) | unital {} (residual {:.3e})",
        r.flags.cp, r.flags.tp, r.flags.tp_residual, r.flags.unital, r.flags.unital_residual
    );
    if let Some(chain) = &r.chain {
        println!("chain dims: {:?}", chain.dims);
        println!("kappa: {}", chain.kappa);
    }
    if let Some(dim) = r.mult_domain_dim {
        println!("dim M_E: {dim}");
    }
    if let Some(dim) = r.stabilizing_dim {
        println!("dim M_E^inf: {dim}");
    }
    if let Some(auto) = &r.automorphism {
        println!(
            "automorphism residuals: invariance {:.3e}, inverses {:.3e}/{:.3e}, \
             multiplicativity {:.3e}, restricted unitarity {:.3e} → {}",
            auto.invariance,
            auto.left_inverse,
            auto.right_inverse,
            auto.multiplicativity,
            auto.restricted_unitarity,
            if auto.passed { "pass" } else { "FAIL" }
        );
    }
    if let Some(p) = &r.peripheral {
        println!("peripheral eigenvalues (cutoff {:.10}):", p.cutoff);
        for e in &p.eigenvalues {
            println!("  {:+.9} {:+.9}i  multiplicity {}", e.re, e.im, e.multiplicity);
        }
    }
    if let Some(v) = &r.verdicts {
        println!(
            "verdicts: irreducible {} | primitive {} | normal {} (normality {:.3e})",
            v.irreducible, v.primitive, v.normal, v.normality_residual
        );
        if let Some(m) = v.cyclic_group_order {
            println!("cyclic peripheral group order: {m}");
        }
    }
    if let Some(q) = &r.qec {
        println!("UCC blocks: {:?}", q.ucc_blocks);
        println!("UNS blocks: {:?}", q.uns_blocks);
        println!("UCC = UNS (kappa = 1): {}", q.ucc_equals_uns);
    }
    if let Some(u) = &r.ucp {
        println!(
            "heisenberg-picture domain: dim {} with blocks {:?}",
            u.mult_domain_dim, u.blocks
        );
    }
    for w in &r.warnings {
        println!("warning: {w}");
    }
}

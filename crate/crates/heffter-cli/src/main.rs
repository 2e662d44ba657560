//! Command-line surface over the heffter library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse or parameter
//! error, 3 exhaustive search found nothing (a result, not an error).

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use heffter::cert::{Certificate, Payload};
use heffter::construct::{
    builtin, develop_packing, extend_with_cosets, net_ag2_11, net_via_roots, partial_partition_space,
    NetSeed,
};
use heffter::cycles::{base_cycles, develop_cycle_system, systems_orthogonal_base, Cycle};
use heffter::designs::verify_heffter_space;
use heffter::field::{Elem, FieldCtx};
use heffter::search::{
    enumerate_inequivalent_rulers, search_net_seed, search_packing, search_rulers,
    DifferencePacking, NetSeedStrategy, PackingMode, Ruler, SearchMode,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_FOUND: u8 = 3;

#[derive(Parser)]
#[command(name = "heffter", version, about = "Heffter systems, spaces, and difference packings")]
struct Cli {
    /// Worker threads for parallel checks (default: machine parallelism).
    /// Output is byte-identical for every thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a certificate file and run the matching verifier.
    Verify(VerifyArgs),
    /// Build an object and write its certificate.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Run a search; certificates are written on success.
    #[command(subcommand)]
    Search(SearchCmd),
    /// Base-cycle derivation and cycle-system orthogonality.
    #[command(subcommand)]
    Cycles(CyclesCmd),
    /// Verify every certificate in the golden corpus directory.
    Golden { dir: Option<PathBuf> },
}

#[derive(Args)]
struct VerifyArgs {
    path: PathBuf,
    /// Require the certificate to have this kind.
    #[arg(long)]
    kind: Option<String>,
    /// Print the flat key=value report block only.
    #[arg(long)]
    machine: bool,
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Coset space from pairwise coprime odd sizes with product (q-1)/2.
    PartialPartition {
        #[arg(long)]
        q: u64,
        /// Comma-separated block sizes, e.g. 3,5,7
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<u64>,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        no_check: bool,
    },
    /// Develop a difference packing into a Heffter space.
    Develop {
        #[arg(long)]
        q: u64,
        /// Ruler element codes, comma-separated; repeat for a packing.
        #[arg(long, value_delimiter = ',', action = clap::ArgAction::Append)]
        ruler: Vec<u64>,
        /// Number of rulers the codes split into.
        #[arg(long, default_value_t = 1)]
        rulers: usize,
        /// Also append the coset parallel class.
        #[arg(long)]
        extend: bool,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        no_check: bool,
    },
    /// Root-of-unity net from an explicit seed.
    Net {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        x: u64,
        #[arg(long, value_delimiter = ',')]
        y: Vec<u64>,
        #[arg(short, long)]
        out: PathBuf,
        /// Write the labeling matrix (element codes) to this file.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        no_check: bool,
    },
    /// The published (81,9;4) net over Z_163.
    Net163 {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// The published (441,21;4) net over Z_883.
    Net883 {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// The published (729,27;4) net over Z_1459.
    Net1459 {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// The published (121,11;9) net over GF(3^5).
    Ag211 {
        #[arg(short, long)]
        out: PathBuf,
        /// Write the matrix in coefficient-vector display.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Heffter rulers: backtracking, normalized to contain 1.
    Ruler {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: usize,
        /// Return every normalized ruler instead of the first.
        #[arg(long)]
        all: bool,
        /// Write the first result here.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Heffter difference packings.
    Packing {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Count pairwise inequivalent rulers per admissible q.
    Inequivalent {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        qmax: Option<u64>,
    },
    /// Net seeds over GF(18n^2+1).
    Netseed {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value = "backtrack")]
        strategy: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        max_iters: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CyclesCmd {
    /// Emit base-cycle certificates, one per parallel class of a space.
    Derive {
        space: PathBuf,
        /// Output prefix: class NAME goes to <prefix><NAME>.hc
        #[arg(short, long)]
        out: PathBuf,
        /// Also write every translate of each class to <prefix><NAME>.txt
        #[arg(long)]
        materialize: bool,
    },
    /// Check pairwise orthogonality of base-cycle certificates.
    Orthogonal { certs: Vec<PathBuf> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized");
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Verify(args) => cmd_verify(args),
        Command::Construct(c) => cmd_construct(c),
        Command::Search(s) => cmd_search(s),
        Command::Cycles(c) => cmd_cycles(c),
        Command::Golden { dir } => cmd_golden(dir),
    }
}

fn read_cert(path: &Path) -> Result<Certificate, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(ExitCode::from(EXIT_USAGE));
        }
    };
    match Certificate::parse(&text) {
        Ok(c) => Ok(c),
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            Err(ExitCode::from(EXIT_USAGE))
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let cert = match read_cert(&args.path) {
        Ok(c) => c,
        Err(code) => return Ok(code),
    };
    if let Some(kind) = &args.kind {
        if cert.payload.kind() != kind {
            eprintln!(
                "error: expected kind {kind}, certificate has kind {}",
                cert.payload.kind()
            );
            return Ok(ExitCode::from(EXIT_USAGE));
        }
    }
    let outcome = cert.verify()?;
    if args.machine {
        print!("{}", outcome.summary);
    } else if outcome.valid {
        println!("OK {} {}", cert.payload.kind(), args.path.display());
    } else {
        println!("INVALID {} {}", cert.payload.kind(), args.path.display());
        print!("{}", outcome.summary);
    }
    Ok(if outcome.valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INVALID)
    })
}

fn write_cert(path: &Path, cert: &Certificate, check: bool) -> Result<()> {
    if check {
        let outcome = cert.verify()?;
        if !outcome.valid {
            return Err(anyhow!(
                "refusing to write an invalid certificate:\n{}",
                outcome.summary
            ));
        }
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, cert.serialize()).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn split_rulers(codes: &[u64], rulers: usize) -> Result<Vec<Ruler>> {
    if rulers == 0 || codes.len() % rulers != 0 {
        return Err(anyhow!(
            "{} codes do not split into {} rulers",
            codes.len(),
            rulers
        ));
    }
    let k = codes.len() / rulers;
    Ok(codes.chunks(k).map(Ruler::from_codes).collect())
}

fn cmd_construct(cmd: ConstructCmd) -> Result<ExitCode> {
    match cmd {
        ConstructCmd::PartialPartition {
            q,
            sizes,
            out,
            no_check,
        } => {
            let ctx = FieldCtx::build(q, 1, None, None)?;
            let space = partial_partition_space(&ctx, &sizes)?;
            let report = verify_heffter_space(&ctx, &space);
            println!("constructed ({}, {{{:?}}}) space", report.v, sizes);
            write_cert(&out, &Certificate::for_space(&ctx, &space), !no_check)?;
        }
        ConstructCmd::Develop {
            q,
            ruler,
            rulers,
            extend,
            out,
            no_check,
        } => {
            let ctx = FieldCtx::build(q, 1, None, None)?;
            let packing = DifferencePacking {
                rulers: split_rulers(&ruler, rulers)?,
            };
            let mut space = develop_packing(&ctx, &packing)?;
            if extend {
                space = extend_with_cosets(&ctx, &space)?;
            }
            let report = verify_heffter_space(&ctx, &space);
            println!("constructed space: v={} r={}", report.v, report.r);
            write_cert(&out, &Certificate::for_space(&ctx, &space), !no_check)?;
        }
        ConstructCmd::Net {
            q,
            x,
            y,
            out,
            matrix,
            no_check,
        } => {
            let ctx = FieldCtx::build(q, 1, None, None)?;
            let seed = NetSeed {
                x: Elem(x),
                y: y.into_iter().map(Elem).collect(),
            };
            construct_net(&ctx, &seed, &out, matrix.as_deref(), !no_check)?;
        }
        ConstructCmd::Net163 { out, matrix } => {
            let ctx = FieldCtx::build(163, 1, None, None)?;
            let seed = builtin::net_seed_163(&ctx);
            construct_net(&ctx, &seed, &out, matrix.as_deref(), true)?;
        }
        ConstructCmd::Net883 { out, matrix } => {
            let ctx = FieldCtx::build(883, 1, None, None)?;
            let seed = builtin::net_seed_883(&ctx);
            construct_net(&ctx, &seed, &out, matrix.as_deref(), true)?;
        }
        ConstructCmd::Net1459 { out, matrix } => {
            let ctx = FieldCtx::build(1459, 1, None, None)?;
            let seed = builtin::net_seed_1459(&ctx);
            construct_net(&ctx, &seed, &out, matrix.as_deref(), true)?;
        }
        ConstructCmd::Ag211 { out, matrix } => {
            let ctx = builtin::gf243();
            let labeling = builtin::ag211_labeling(&ctx);
            let (space, m) = net_ag2_11(&ctx, &labeling)?;
            let report = verify_heffter_space(&ctx, &space);
            println!(
                "constructed ({}, {}; {}) net, density {}",
                report.v,
                report.class_sizes().unwrap()[0],
                report.r,
                report
                    .density
                    .map(|d| format!("{}/{}", d.numer(), d.denom()))
                    .unwrap_or_default()
            );
            if let Some(mp) = matrix {
                std::fs::write(&mp, m.to_coeff_text(&ctx))?;
                println!("wrote {}", mp.display());
            }
            write_cert(&out, &Certificate::for_space(&ctx, &space), true)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn construct_net(
    ctx: &FieldCtx,
    seed: &NetSeed,
    out: &Path,
    matrix: Option<&Path>,
    check: bool,
) -> Result<()> {
    let (space, m) = net_via_roots(ctx, seed)?;
    let report = verify_heffter_space(ctx, &space);
    println!(
        "constructed ({}, {}; 4) net over GF({})",
        report.v,
        report.class_sizes().unwrap()[0],
        ctx.q()
    );
    if let Some(mp) = matrix {
        std::fs::write(mp, m.to_text())?;
        println!("wrote {}", mp.display());
    }
    write_cert(out, &Certificate::for_space(ctx, &space), check)
}

fn cmd_search(cmd: SearchCmd) -> Result<ExitCode> {
    match cmd {
        SearchCmd::Ruler {
            q,
            k,
            all,
            out,
            limit,
        } => {
            let ctx = FieldCtx::build(q, 1, None, None)?;
            let mode = if all { SearchMode::All } else { SearchMode::First };
            let mut found = search_rulers(&ctx, k, mode)?;
            if let Some(l) = limit {
                found.truncate(l);
            }
            if found.is_empty() {
                println!("NOT-FOUND: no (F_{q}, {k}) Heffter ruler exists");
                return Ok(ExitCode::from(EXIT_NOT_FOUND));
            }
            let classes = enumerate_inequivalent_rulers(&ctx, k)?;
            println!(
                "found {} normalized rulers in {} equivalence classes",
                found.len(),
                classes.count()
            );
            for r in &found {
                let codes: Vec<String> =
                    r.elements().iter().map(|e| e.0.to_string()).collect();
                println!("ruler {}", codes.join(" "));
            }
            if let Some(path) = out {
                write_cert(&path, &Certificate::for_ruler(&ctx, &found[0]), true)?;
            }
        }
        SearchCmd::Packing {
            q,
            k,
            n,
            mode,
            seed,
            out,
        } => {
            let ctx = FieldCtx::build(q, 1, None, None)?;
            let mode = match mode.as_str() {
                "exhaustive" => PackingMode::Exhaustive,
                "greedy" => PackingMode::Greedy { seed },
                other => return Err(anyhow!("unknown mode {other:?}")),
            };
            match search_packing(&ctx, k, n, mode)? {
                Some(packing) => {
                    println!("found a (F_{q}, {k}; {n}) Heffter difference packing");
                    for r in &packing.rulers {
                        let codes: Vec<String> =
                            r.elements().iter().map(|e| e.0.to_string()).collect();
                        println!("ruler {}", codes.join(" "));
                    }
                    if let Some(path) = out {
                        write_cert(&path, &Certificate::for_packing(&ctx, &packing), true)?;
                    }
                }
                None => {
                    println!("NOT-FOUND: no (F_{q}, {k}; {n}) Heffter difference packing");
                    return Ok(ExitCode::from(EXIT_NOT_FOUND));
                }
            }
        }
        SearchCmd::Inequivalent { k, q, qmax } => {
            let qs: Vec<u64> = match (q, qmax) {
                (Some(q), None) => vec![q],
                (None, Some(qmax)) => admissible_prime_powers(k as u64, qmax),
                _ => return Err(anyhow!("give exactly one of --q or --qmax")),
            };
            for q in qs {
                let (p, n) = prime_power_split(q)
                    .ok_or_else(|| anyhow!("{q} is not a prime power"))?;
                let ctx = FieldCtx::build(p, n, None, None)?;
                let count = enumerate_inequivalent_rulers(&ctx, k)?.count();
                println!("q={q} r={count}");
            }
        }
        SearchCmd::Netseed {
            q,
            strategy,
            seed,
            max_iters,
            out,
        } => {
            let ctx = FieldCtx::build(q, 1, None, None)?;
            let strategy = match strategy.as_str() {
                "backtrack" => NetSeedStrategy::Backtrack,
                "randomized" => NetSeedStrategy::Randomized {
                    seed: seed.ok_or_else(|| anyhow!("randomized strategy requires --seed"))?,
                    max_iters,
                },
                other => return Err(anyhow!("unknown strategy {other:?}")),
            };
            match search_net_seed(&ctx, strategy)? {
                Some(found) => {
                    let codes: Vec<String> = found.y.iter().map(|e| e.0.to_string()).collect();
                    println!("x {}", found.x.0);
                    println!("y {}", codes.join(" "));
                    if let Some(path) = out {
                        write_cert(&path, &Certificate::for_net_seed(&ctx, &found), true)?;
                    }
                }
                None => {
                    println!("NOT-FOUND: no net seed over GF({q})");
                    return Ok(ExitCode::from(EXIT_NOT_FOUND));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn admissible_prime_powers(k: u64, qmax: u64) -> Vec<u64> {
    (7..qmax)
        .filter(|&q| q % (4 * k) == 2 * k + 1 && prime_power_split(q).is_some())
        .collect()
}

fn prime_power_split(q: u64) -> Option<(u64, u32)> {
    for p in 2..=q {
        if p * p > q {
            break;
        }
        if q % p == 0 {
            let mut m = q;
            let mut n = 0;
            while m % p == 0 {
                m /= p;
                n += 1;
            }
            return (m == 1 && heffter::field::is_prime(p)).then_some((p, n));
        }
    }
    heffter::field::is_prime(q).then_some((q, 1))
}

fn cmd_cycles(cmd: CyclesCmd) -> Result<ExitCode> {
    match cmd {
        CyclesCmd::Derive {
            space,
            out,
            materialize,
        } => {
            let cert = match read_cert(&space) {
                Ok(c) => c,
                Err(code) => return Ok(code),
            };
            let ctx = cert.field_ctx()?;
            let space = cert.to_space(&ctx)?;
            let report = verify_heffter_space(&ctx, &space);
            if !report.valid() {
                eprintln!("input space is invalid:\n{}", report.summary());
                return Ok(ExitCode::from(EXIT_INVALID));
            }
            let prefix = out.to_string_lossy().to_string();
            for (i, class) in space.classes.iter().enumerate() {
                let system = space.class_system(i);
                let cycles = match base_cycles(&ctx, &system) {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("class {}: {e}", class.name);
                        return Ok(ExitCode::from(EXIT_INVALID));
                    }
                };
                let path = PathBuf::from(format!("{prefix}{}.hc", class.name));
                write_cert(&path, &Certificate::for_base_cycles(&ctx, &cycles), true)?;
                if materialize {
                    let full = develop_cycle_system(&ctx, &cycles)?;
                    let mut text = String::new();
                    for c in &full {
                        let row: Vec<String> =
                            c.vertices().iter().map(|e| e.0.to_string()).collect();
                        text.push_str(&row.join(" "));
                        text.push('\n');
                    }
                    let tpath = PathBuf::from(format!("{prefix}{}.txt", class.name));
                    std::fs::write(&tpath, text)?;
                    println!("wrote {}", tpath.display());
                }
            }
        }
        CyclesCmd::Orthogonal { certs } => {
            if certs.len() < 2 {
                return Err(anyhow!("need at least two base-cycle certificates"));
            }
            let mut systems: Vec<(String, FieldCtx, Vec<Cycle>)> = Vec::new();
            for path in &certs {
                let cert = match read_cert(path) {
                    Ok(c) => c,
                    Err(code) => return Ok(code),
                };
                let ctx = cert.field_ctx()?;
                let cycles = match &cert.payload {
                    Payload::BaseCycles { cycles } => cycles
                        .iter()
                        .map(|c| Cycle::new(c.iter().map(|&v| Elem(v)).collect()))
                        .collect::<Result<Vec<_>, _>>()?,
                    other => {
                        return Err(anyhow!(
                            "{} has kind {}, expected basecycles",
                            path.display(),
                            other.kind()
                        ))
                    }
                };
                systems.push((path.display().to_string(), ctx, cycles));
            }
            let mut all_ok = true;
            for i in 0..systems.len() {
                for j in i + 1..systems.len() {
                    if systems[i].1.q() != systems[j].1.q() {
                        return Err(anyhow!("certificates live over different fields"));
                    }
                    let w = systems_orthogonal_base(&systems[i].1, &systems[i].2, &systems[j].2)?;
                    let verdict = if w.orthogonal { "orthogonal" } else { "NOT orthogonal" };
                    println!("{} x {}: {verdict}", systems[i].0, systems[j].0);
                    all_ok &= w.orthogonal;
                }
            }
            if !all_ok {
                return Ok(ExitCode::from(EXIT_INVALID));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_golden(dir: Option<PathBuf>) -> Result<ExitCode> {
    let dir = dir
        .or_else(|| std::env::var_os("HEFFTER_DATA").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data/golden"));
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "hc").unwrap_or(false))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(anyhow!("no .hc certificates under {}", dir.display()));
    }
    let mut all_ok = true;
    for path in paths {
        let cert = match read_cert(&path) {
            Ok(c) => c,
            Err(code) => return Ok(code),
        };
        let outcome = cert.verify()?;
        println!(
            "{} {} {}",
            if outcome.valid { "OK" } else { "INVALID" },
            cert.payload.kind(),
            path.display()
        );
        all_ok &= outcome.valid;
    }
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INVALID)
    })
}

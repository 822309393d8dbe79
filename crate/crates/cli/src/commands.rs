use std::path::{Path, PathBuf};

use mcfin::cex::{beta_bits, bits_to_string, pattern_stats, refute_period, verify_phi_bijection, PhiTable};
use mcfin::modeng::{brent_cycle, eval_mod, prs_trace, verify_cycle, PRSSystem};
use mcfin::oeisio::{
    crosscheck, crosscheck_fixture, default_cache_dir, fetch_bfile, list_fixtures, parse_bfile, spec_from_flags,
    CrosscheckReport,
};
use mcfin::oracle::{
    count_by_blocks, count_e_r_structures, count_partitions, count_relations, PartitionConstraint, RelationKind,
    SpecialPlacement,
};
use mcfin::witness::{
    find_integer_recurrence, find_recurrence_mod, growth_refutation, mc_report, period_witness,
    RecurrenceWitness, ReportOptions,
};
use mcfin::{eval_exact, eval_exact_range, Error, Family, SequenceSpec, SizeSet};
use num_bigint::BigUint;
use serde_json::json;

use crate::args::{CexCommand, Format, ModSearchArgs, OracleCommand, Placement, PrsCommand, SpecArgs, SystemArgs};
use crate::output::{csv_field, Out};

pub enum Failure {
    /// Bad input; exit code 2.
    Usage(String),
    /// A check ran and failed; exit code 1.
    Check(String),
    /// Anything else; exit code 1.
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::InvalidSpec(_)
            | Error::CapExceeded { .. }
            | Error::Domain(_)
            | Error::CoprimalityViolation { .. }
            | Error::MalformedANumber(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

pub type CmdResult = Result<(), Failure>;

pub fn build_spec(a: &SpecArgs) -> Result<SequenceSpec, Failure> {
    let family: Family = a.family.parse()?;
    let mut spec = SequenceSpec::new(family).with_r(a.r);
    if let Some(k) = a.k {
        spec = spec.with_k(k);
    }
    if let Some(s) = &a.sizes {
        spec = spec.with_sizes(s.parse::<SizeSet>()?);
    }
    if let Some(rc) = &a.residue_class {
        let parse = |v: &str| v.trim().parse::<u64>().ok();
        let (c, m) = rc
            .split_once(',')
            .and_then(|(c, m)| Some((parse(c)?, parse(m)?)))
            .ok_or_else(|| Failure::Usage(format!("--residue-class expects C,M, got {rc:?}")))?;
        spec = spec.with_residue_class(c, m);
    }
    spec.validate()?;
    Ok(spec)
}

pub fn gen(out: &Out, spec: &SpecArgs, n: Option<u64>, n_max: Option<u64>) -> CmdResult {
    let spec = build_spec(spec)?;
    if let Some(n) = n {
        let v = eval_exact(&spec, n)?;
        match out.format {
            Format::Text => out.lines([v.to_string()]),
            Format::Csv => out.lines(["n,value".to_string(), format!("{n},{v}")]),
            Format::Json => out.json(&json!({ "spec": spec, "n": n, "value": v.to_string() })),
        }
        return Ok(());
    }
    let n_max = n_max.expect("clap requires --n or --n-max");
    let values = eval_exact_range(&spec, n_max)?;
    match out.format {
        Format::Text => out.lines(values.iter().enumerate().map(|(n, v)| format!("{n} {v}"))),
        Format::Csv => out.lines(
            std::iter::once("n,value".to_string()).chain(values.iter().enumerate().map(|(n, v)| format!("{n},{v}"))),
        ),
        Format::Json => {
            let vals: Vec<String> = values.iter().map(ToString::to_string).collect();
            out.json(&json!({ "spec": spec, "values": vals }))
        }
    }
    Ok(())
}

pub fn residues(out: &Out, spec: &SpecArgs, modulus: u64, n_max: u64) -> CmdResult {
    let spec = build_spec(spec)?;
    let trace = eval_mod(&spec, modulus, n_max)?;
    match out.format {
        Format::Text => out.lines(trace.values.iter().enumerate().map(|(n, v)| format!("{n} {v}"))),
        Format::Csv => out.lines(
            std::iter::once("n,residue".to_string())
                .chain(trace.values.iter().enumerate().map(|(n, v)| format!("{n},{v}"))),
        ),
        Format::Json => out.json(&trace),
    }
    Ok(())
}

fn describe_recurrence(w: &RecurrenceWitness) -> String {
    let terms: Vec<String> = w
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, c)| if i == 0 { format!("{c}*s(n)") } else { format!("{c}*s(n+{i})") })
        .collect();
    let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
    format!(
        "s(n+{}) = {rhs} (mod {}) for n >= {}, verified to n = {}",
        w.order, w.modulus, w.start, w.verified_up_to
    )
}

fn search_recurrence(spec: &SequenceSpec, s: &ModSearchArgs) -> Result<(mcfin::modeng::ResidueTrace, Option<RecurrenceWitness>), Failure> {
    let trace = eval_mod(spec, s.modulus, s.n_max)?;
    let rec = match find_recurrence_mod(&trace, s.max_order, s.min_margin) {
        Ok(w) => w,
        Err(Error::InsufficientData(_)) => None,
        Err(e) => return Err(e.into()),
    };
    Ok((trace, rec))
}

pub fn recur(out: &Out, spec: &SpecArgs, s: &ModSearchArgs) -> CmdResult {
    let spec = build_spec(spec)?;
    let (_, rec) = search_recurrence(&spec, s)?;
    match out.format {
        Format::Text => out.lines([match &rec {
            Some(w) => describe_recurrence(w),
            None => format!("no recurrence up to order {} (n_max {})", s.max_order, s.n_max),
        }]),
        Format::Csv => {
            let row = match &rec {
                Some(w) => {
                    let c: Vec<String> = w.coeffs.iter().map(ToString::to_string).collect();
                    format!("{},{},{},{},{}", w.order, w.start, c.join(" "), w.verified_up_to, "found")
                }
                None => ",,,,none".to_string(),
            };
            out.lines([
                "spec,modulus,order,start,coeffs,verified_up_to,status".to_string(),
                format!("{},{},{row}", csv_field(&spec.to_string()), s.modulus),
            ])
        }
        Format::Json => out.json(&json!({ "spec": spec, "modulus": s.modulus, "recurrence": rec })),
    }
    Ok(())
}

pub fn period(out: &Out, spec: &SpecArgs, s: &ModSearchArgs) -> CmdResult {
    let spec = build_spec(spec)?;
    let (trace, rec) = search_recurrence(&spec, s)?;
    let per = period_witness(&trace, rec.as_ref())?;
    match out.format {
        Format::Text => {
            let line = match &per {
                Some(p) => format!(
                    "q = {}, p = {} ({}), verified to n = {}",
                    p.q,
                    p.p,
                    if p.sound { "backed by a recurrence" } else { "empirical" },
                    p.verified_up_to
                ),
                None => format!("no period found (n_max {})", s.n_max),
            };
            out.lines([line])
        }
        Format::Csv => {
            let row = per
                .as_ref()
                .map_or(",,".to_string(), |p| format!("{},{},{}", p.q, p.p, p.sound));
            out.lines([
                "spec,modulus,q,p,sound".to_string(),
                format!("{},{},{row}", csv_field(&spec.to_string()), s.modulus),
            ])
        }
        Format::Json => out.json(&json!({
            "spec": spec,
            "modulus": s.modulus,
            "recurrence": rec,
            "period": per,
        })),
    }
    Ok(())
}

pub fn cfinite(out: &Out, spec: &SpecArgs, n_max: u64, max_order: usize) -> CmdResult {
    let spec = build_spec(spec)?;
    let values = eval_exact_range(&spec, n_max)?;
    let w = find_integer_recurrence(&values, max_order)?;
    let growth = growth_refutation(&values).ok();
    match out.format {
        Format::Text => {
            let mut lines = vec![match &w {
                Some(w) => {
                    let c: Vec<String> = w.coeffs.iter().map(ToString::to_string).collect();
                    format!(
                        "C-finite: order {}, start {}, coeffs [{}] (s(n+{}) = sum c_i s(n+i)), verified to n = {}",
                        w.order,
                        w.start,
                        c.join(", "),
                        w.order,
                        w.verified_up_to
                    )
                }
                None => format!("C-finite: no integer recurrence up to order {max_order} on n <= {n_max}"),
            }];
            if let Some(g) = &growth {
                lines.push(format!(
                    "growth: {} (tail increment {:.3} bits vs head {:.3} bits, margin {}; {})",
                    if g.escape { "escape" } else { "no escape" },
                    g.increment_tail_min,
                    g.increment_first_half_max,
                    g.margin_bits,
                    g.note
                ));
            }
            out.lines(lines)
        }
        Format::Csv => {
            let (order, start) = w.as_ref().map_or((String::new(), String::new()), |w| {
                (w.order.to_string(), w.start.to_string())
            });
            let escape = growth.as_ref().map_or(String::new(), |g| g.escape.to_string());
            out.lines([
                "spec,order,start,escape".to_string(),
                format!("{},{order},{start},{escape}", csv_field(&spec.to_string())),
            ])
        }
        Format::Json => out.json(&json!({ "spec": spec, "cfinite": w, "growth": growth })),
    }
    Ok(())
}

pub fn oracle(out: &Out, cmd: &OracleCommand) -> CmdResult {
    match cmd {
        OracleCommand::Partitions {
            n,
            r,
            sizes,
            blocks,
            internal_order,
            external_order,
            non_crossing,
            non_overlapping,
            by_blocks,
        } => {
            let mut c = PartitionConstraint::new(*n).with_r(*r);
            if let Some(s) = sizes {
                c = c.with_sizes(s.parse()?);
            }
            if let Some(b) = blocks {
                c = c.with_blocks(*b);
            }
            if let Some(p) = internal_order {
                c = c.internally_ordered(match p {
                    Placement::Free => SpecialPlacement::Free,
                    Placement::Head => SpecialPlacement::Head,
                });
            }
            if *external_order {
                c = c.externally_ordered();
            }
            if *non_crossing {
                c = c.non_crossing();
            }
            if *non_overlapping {
                c = c.non_overlapping();
            }
            if *by_blocks {
                let buckets = count_by_blocks(&c)?;
                match out.format {
                    Format::Text => out.lines(buckets.iter().enumerate().map(|(k, v)| format!("{k} {v}"))),
                    Format::Csv => out.lines(
                        std::iter::once("blocks,count".to_string())
                            .chain(buckets.iter().enumerate().map(|(k, v)| format!("{k},{v}"))),
                    ),
                    Format::Json => {
                        let b: Vec<String> = buckets.iter().map(ToString::to_string).collect();
                        out.json(&json!({ "n": n, "r": r, "by_blocks": b }))
                    }
                }
            } else {
                let v = count_partitions(&c)?;
                match out.format {
                    Format::Text => out.lines([v.to_string()]),
                    Format::Csv => out.lines(["n,r,count".to_string(), format!("{n},{r},{v}")]),
                    Format::Json => out.json(&json!({ "n": n, "r": r, "count": v.to_string() })),
                }
            }
        }
        OracleCommand::Relations { n, kind, allow_slow } => {
            let kinds: Vec<RelationKind> = match kind {
                Some(k) => vec![k.parse()?],
                None => RelationKind::ALL.to_vec(),
            };
            let rows: Vec<(RelationKind, String)> = kinds
                .into_iter()
                .map(|k| Ok((k, count_relations(*n, k, *allow_slow)?.to_string())))
                .collect::<Result<_, Error>>()?;
            match out.format {
                Format::Text => out.lines(rows.iter().map(|(k, v)| format!("{} {v}", k.name()))),
                Format::Csv => out.lines(
                    std::iter::once("kind,n,count".to_string())
                        .chain(rows.iter().map(|(k, v)| format!("{},{n},{v}", k.name()))),
                ),
                Format::Json => {
                    let map: serde_json::Map<String, serde_json::Value> =
                        rows.iter().map(|(k, v)| (k.name().to_string(), json!(v))).collect();
                    out.json(&json!({ "n": n, "counts": map }))
                }
            }
        }
        OracleCommand::Er { n, r } => {
            let v = count_e_r_structures(*n, *r)?;
            match out.format {
                Format::Text => out.lines([v.to_string()]),
                Format::Csv => out.lines(["n,r,count".to_string(), format!("{n},{r},{v}")]),
                Format::Json => out.json(&json!({ "n": n, "r": r, "count": v.to_string() })),
            }
        }
    }
    Ok(())
}

pub fn default_fixtures() -> PathBuf {
    std::env::var_os("MCFIN_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/oeis"))
}

pub struct CrosscheckArgs<'a> {
    pub a: Option<&'a str>,
    pub all: bool,
    pub fixtures: Option<PathBuf>,
    pub online: bool,
    pub cache_dir: Option<PathBuf>,
    pub generator: Option<&'a str>,
    pub offset: i64,
    pub count: u64,
}

pub fn crosscheck_cmd(out: &Out, args: CrosscheckArgs<'_>) -> CmdResult {
    let dir = args.fixtures.unwrap_or_else(default_fixtures);
    let reports: Vec<CrosscheckReport> = if args.all {
        list_fixtures(&dir)?
            .iter()
            .map(|a| crosscheck_fixture(&dir, a))
            .collect::<Result<_, Error>>()?
    } else {
        let a = args.a.expect("clap requires --a or --all");
        match args.generator {
            None => vec![crosscheck_fixture(&dir, a)?],
            Some(generator) => {
                let spec = spec_from_flags(generator)?;
                let digits = mcfin::oeisio::check_a_number(a)?;
                let local = dir.join(format!("b{digits}.txt"));
                let bfile = if local.exists() {
                    let text = std::fs::read_to_string(&local).map_err(Error::from)?;
                    parse_bfile(&text)?
                } else {
                    let cache = args.cache_dir.unwrap_or_else(default_cache_dir);
                    fetch_bfile(a, &cache, args.online)?
                };
                vec![crosscheck(&spec, &bfile, args.offset, args.count)?]
            }
        }
    };
    match out.format {
        Format::Text => out.lines(reports.iter().map(|r| match &r.first_mismatch {
            None => format!("{} pass ({} terms from index {}, {})", r.a_number, r.count, r.offset, r.source),
            Some(m) => format!(
                "{} FAIL at n = {} (b-file index {}): expected {}, got {} ({})",
                r.a_number, m.n, m.bfile_index, m.expected, m.got, r.source
            ),
        })),
        Format::Csv => out.lines(std::iter::once("a_number,source,offset,count,pass,mismatch_n,expected,got".to_string()).chain(
            reports.iter().map(|r| {
                let (n, e, g) = r.first_mismatch.as_ref().map_or((String::new(), String::new(), String::new()), |m| {
                    (m.n.to_string(), m.expected.clone(), m.got.clone())
                });
                format!("{},{},{},{},{},{n},{e},{g}", r.a_number, csv_field(&r.source), r.offset, r.count, r.pass)
            }),
        )),
        Format::Json => out.json(&reports),
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.a_number.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("cross-check failed for {}", failed.join(", "))))
    }
}

pub fn cex(out: &Out, cmd: &CexCommand) -> CmdResult {
    match cmd {
        CexCommand::Beta { start, count } => {
            let bits = bits_to_string(&beta_bits(&BigUint::from(*start), *count));
            match out.format {
                Format::Text => out.lines([bits]),
                Format::Csv => out.lines(["start,count,bits".to_string(), format!("{start},{count},{bits}")]),
                Format::Json => out.json(&json!({ "start": start, "count": count, "bits": bits })),
            }
        }
        CexCommand::Phi { k, verify: true } => {
            let check = verify_phi_bijection(*k)?;
            match out.format {
                Format::Json => out.json(&check),
                _ => out.lines([format!(
                    "phi_{k}: {}, first bit {} the parity",
                    if check.bijective { "bijective" } else { "NOT bijective" },
                    if check.first_bit_is_parity { "is" } else { "is NOT" }
                )]),
            }
            if !(check.bijective && check.first_bit_is_parity) {
                return Err(Failure::Check(format!(
                    "phi_{k} check failed: collision {:?}, parity failure {:?}",
                    check.collision, check.parity_failure
                )));
            }
        }
        CexCommand::Phi { k, verify: false } => {
            let table = PhiTable::new(*k)?;
            let rows: Vec<(u64, String)> =
                (0..1u64 << k).map(|r| (r, bits_to_string(&table.forward(r)))).collect();
            match out.format {
                Format::Text => out.lines(rows.iter().map(|(r, b)| format!("phi_{k}({r}) = {b}"))),
                Format::Csv => out.lines(
                    std::iter::once("r,bits".to_string()).chain(rows.iter().map(|(r, b)| format!("{r},{b}"))),
                ),
                Format::Json => {
                    let t: Vec<_> = rows.iter().map(|(r, b)| json!({ "r": r, "bits": b })).collect();
                    out.json(&json!({ "k": k, "table": t }))
                }
            }
        }
        CexCommand::Certify { start, period, max_total } => {
            let pairs: Vec<(u64, u64)> = match (start, period, max_total) {
                (Some(s), Some(p), _) => vec![(*s, *p)],
                (_, _, Some(t)) => (1..=*t).flat_map(|tot| (1..=tot).map(move |p| (tot - p, p))).collect(),
                _ => return Err(Failure::Usage("give --start and --period, or --max-total".into())),
            };
            let certs = pairs
                .into_iter()
                .map(|(s, p)| refute_period(s, p))
                .collect::<Result<Vec<_>, Error>>()?;
            match out.format {
                Format::Text => out.lines(certs.iter().map(|c| {
                    format!(
                        "start {}, period {}: beta({}) = {} but beta({}) = {}",
                        c.start,
                        c.period,
                        c.start + c.mismatch_index,
                        c.bit_at_start,
                        c.start + c.period + c.mismatch_index,
                        c.bit_at_shift
                    )
                })),
                Format::Csv => out.lines(std::iter::once("start,period,mismatch_index,bit_at_start,bit_at_shift".to_string()).chain(
                    certs.iter().map(|c| {
                        format!("{},{},{},{},{}", c.start, c.period, c.mismatch_index, c.bit_at_start, c.bit_at_shift)
                    }),
                )),
                Format::Json => out.json(&certs),
            }
        }
        CexCommand::Stats { start, count, chunk } => {
            let bits = beta_bits(&BigUint::from(*start), *count);
            let stats = pattern_stats(&bits, *chunk)?;
            match out.format {
                Format::Json => out.json(&stats),
                Format::Csv => out.lines(
                    std::iter::once("pattern,count,frequency".to_string()).chain(
                        stats.patterns.iter().map(|p| format!("{},{},{:.6}", p.pattern, p.count, p.frequency)),
                    ),
                ),
                Format::Text => out.lines(
                    stats
                        .patterns
                        .iter()
                        .map(|p| format!("{} {} {:.6}", p.pattern, p.count, p.frequency))
                        .chain(std::iter::once(format!(
                            "max deviation from 2^-{} over {} windows: {:.6}",
                            stats.chunk_len, stats.windows, stats.max_deviation
                        ))),
                ),
            }
        }
    }
    Ok(())
}

fn load_system(s: &SystemArgs) -> Result<PRSSystem, Failure> {
    if let Some(path) = &s.file {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        return Ok(PRSSystem::parse(&text)?);
    }
    match s.preset.as_deref() {
        Some("a086714") => Ok(PRSSystem::a086714()),
        Some("fibonacci") => Ok(PRSSystem::fibonacci()),
        Some("squaring") => Ok(PRSSystem::squaring(s.a0)),
        Some(other) => Err(Failure::Usage(format!(
            "unknown preset {other:?}; expected a086714, fibonacci or squaring"
        ))),
        None => Err(Failure::Usage("give --file or --preset".into())),
    }
}

pub fn prs(out: &Out, cmd: &PrsCommand) -> CmdResult {
    match cmd {
        PrsCommand::Trace { system, modulus, n_max } => {
            let sys = load_system(system)?;
            let trace = prs_trace(&sys, *modulus, *n_max)?;
            match out.format {
                Format::Text => out.lines(trace.values.iter().enumerate().map(|(n, v)| format!("{n} {v}"))),
                Format::Csv => out.lines(
                    std::iter::once("n,residue".to_string())
                        .chain(trace.values.iter().enumerate().map(|(n, v)| format!("{n},{v}"))),
                ),
                Format::Json => out.json(&trace),
            }
        }
        PrsCommand::Cycle { system, modulus } => {
            let sys = load_system(system)?;
            let (q, p) = brent_cycle(&sys, *modulus)?;
            const EXTRA: u64 = 3;
            let ok = verify_cycle(&sys, *modulus, q, p, EXTRA)?;
            match out.format {
                Format::Text => out.lines([format!(
                    "q = {q}, p = {p} (mod {modulus}), {} over {EXTRA} further periods",
                    if ok { "re-verified" } else { "NOT re-verified" }
                )]),
                Format::Csv => out.lines(["modulus,q,p,verified".to_string(), format!("{modulus},{q},{p},{ok}")]),
                Format::Json => out.json(&json!({ "modulus": modulus, "q": q, "p": p, "verified": ok })),
            }
            if !ok {
                return Err(Failure::Check(format!("cycle ({q}, {p}) failed re-verification")));
            }
        }
    }
    Ok(())
}

pub struct ReportArgs<'a> {
    pub spec: &'a SpecArgs,
    pub moduli: &'a [u64],
    pub n_max: u64,
    pub opts: ReportOptions,
}

pub fn report(out: &Out, args: ReportArgs<'_>) -> CmdResult {
    let spec = build_spec(args.spec)?;
    let entries = mc_report(&spec, args.moduli, args.n_max, &args.opts)?;
    match out.format {
        Format::Json => out.json(&entries),
        Format::Csv => out.lines(
            std::iter::once("spec,modulus,order,coeffs,start,q,p,sound,cfinite_order,growth_escape,status".to_string())
                .chain(entries.iter().map(|e| {
                    let (order, coeffs, start) = e.recurrence.as_ref().map_or(Default::default(), |r| {
                        let c: Vec<String> = r.coeffs.iter().map(ToString::to_string).collect();
                        (r.order.to_string(), c.join(" "), r.start.to_string())
                    });
                    let (q, p, sound) = e.period.as_ref().map_or(Default::default(), |p| {
                        (p.q.to_string(), p.p.to_string(), p.sound.to_string())
                    });
                    let cf = e.cfinite.as_ref().map_or(String::new(), |c| c.order.to_string());
                    let esc = e.growth.as_ref().map_or(String::new(), |g| g.escape.to_string());
                    format!(
                        "{},{},{order},{coeffs},{start},{q},{p},{sound},{cf},{esc},{}",
                        csv_field(&e.spec),
                        e.modulus,
                        csv_field(&e.status)
                    )
                })),
        ),
        Format::Text => {
            let mut lines: Vec<String> = entries
                .iter()
                .map(|e| {
                    let rec = e.recurrence.as_ref().map_or("no recurrence".to_string(), |r| {
                        format!("recurrence order {} start {} coeffs {:?}", r.order, r.start, r.coeffs)
                    });
                    let per = e.period.as_ref().map_or("no period".to_string(), |p| {
                        format!("period (q={}, p={}){}", p.q, p.p, if p.sound { "" } else { " empirical" })
                    });
                    format!("{} mod {}: {rec}; {per}; {}", e.spec, e.modulus, e.status)
                })
                .collect();
            if let Some(e) = entries.first() {
                lines.push(match &e.cfinite {
                    Some(c) => format!("C-finite: order {} start {}", c.order, c.start),
                    None => format!("C-finite: none up to order {}", args.opts.cfinite_max_order),
                });
                if let Some(g) = &e.growth {
                    lines.push(format!(
                        "growth: {} ({})",
                        if g.escape { "escape" } else { "no escape" },
                        g.note
                    ));
                }
            }
            out.lines(lines)
        }
    }
    Ok(())
}

//! OEIS b-files: parsing, cross-checking and an opt-in cached download.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::{eval_exact_range, SequenceSpec};

/// Environment variable overriding the download cache directory.
pub const CACHE_ENV: &str = "MCFIN_OEIS_CACHE";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BFile {
    /// `A` followed by six digits, or empty when unknown.
    pub a_number: String,
    pub entries: Vec<(i64, BigInt)>,
}

impl BFile {
    pub fn get(&self, index: i64) -> Option<&BigInt> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|pos| &self.entries[pos].1)
    }

    pub fn first_index(&self) -> Option<i64> {
        self.entries.first().map(|e| e.0)
    }
}

/// Validates `A` + six digits and returns the digits.
pub fn check_a_number(a: &str) -> Result<&str> {
    let digits = a
        .strip_prefix('A')
        .filter(|d| d.len() == 6 && d.bytes().all(|b| b.is_ascii_digit()))
        .ok_or_else(|| Error::MalformedANumber(a.to_string()))?;
    Ok(digits)
}

/// Parses `index value` lines; `#` lines and blank lines are skipped. A
/// leading comment of the form `# A000110...` sets the A-number.
pub fn parse_bfile(text: &str) -> Result<BFile> {
    let mut a_number = String::new();
    let mut entries: Vec<(i64, BigInt)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if a_number.is_empty() && entries.is_empty() {
                let word: String = comment
                    .trim()
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric())
                    .collect();
                if check_a_number(&word).is_ok() {
                    a_number = word;
                }
            }
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let mut parts = line.split_whitespace();
        let (Some(idx), Some(val), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("expected `index value`, found {line:?}")));
        };
        let idx: i64 = idx.parse().map_err(|_| err(format!("bad index {idx:?}")))?;
        let val: BigInt = val.parse().map_err(|_| err(format!("bad value {val:?}")))?;
        if let Some(&(prev, _)) = entries.last() {
            if idx <= prev {
                return Err(err(format!("index {idx} does not increase past {prev}")));
            }
        }
        entries.push((idx, val));
    }
    Ok(BFile { a_number, entries })
}

pub fn format_bfile(b: &BFile) -> String {
    let mut out = String::new();
    if !b.a_number.is_empty() {
        writeln!(out, "# {}", b.a_number).unwrap();
    }
    for (i, v) in &b.entries {
        writeln!(out, "{i} {v}").unwrap();
    }
    out
}

/// Metadata stored next to each vendored b-file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub a_number: String,
    pub title: String,
    /// b-file index of the first generated term.
    pub offset: i64,
    /// Number of terms (or triangle entries) to compare.
    pub count: u64,
    pub layout: Layout,
    /// CLI-style description of the generating spec.
    pub generator: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Sequence,
    /// Rows `n = 0, 1, ...`, each listing `k = 0..=n`.
    Triangle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    /// Generator index (`n`, or the flat triangle position).
    pub n: u64,
    pub bfile_index: i64,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    pub a_number: String,
    pub source: String,
    pub offset: i64,
    pub count: u64,
    pub first_mismatch: Option<Mismatch>,
    pub pass: bool,
}

/// Compares `generated[n]` with the b-file entry at `n + offset` for
/// `n < count`.
pub fn crosscheck_values(
    source: &str,
    generated: &[BigInt],
    bfile: &BFile,
    offset: i64,
    count: u64,
) -> Result<CrosscheckReport> {
    if (generated.len() as u64) < count {
        return Err(Error::InsufficientData(format!(
            "{} generated terms, {count} requested",
            generated.len()
        )));
    }
    let mut first_mismatch = None;
    for n in 0..count {
        let idx = n as i64 + offset;
        let expected = bfile.get(idx).ok_or_else(|| {
            Error::InsufficientData(format!("{} has no entry at index {idx}", bfile.a_number))
        })?;
        if first_mismatch.is_none() && *expected != generated[n as usize] {
            first_mismatch = Some(Mismatch {
                n,
                bfile_index: idx,
                expected: expected.to_string(),
                got: generated[n as usize].to_string(),
            });
        }
    }
    Ok(CrosscheckReport {
        a_number: bfile.a_number.clone(),
        source: source.to_string(),
        offset,
        count,
        pass: first_mismatch.is_none(),
        first_mismatch,
    })
}

/// Compares `eval_exact(spec, n)` with entry `n + offset` for `n < count`.
pub fn crosscheck(spec: &SequenceSpec, bfile: &BFile, offset: i64, count: u64) -> Result<CrosscheckReport> {
    if count == 0 {
        return crosscheck_values(&spec.to_string(), &[], bfile, offset, 0);
    }
    let values = eval_exact_range(spec, count - 1)?;
    crosscheck_values(&spec.to_string(), &values, bfile, offset, count)
}

/// Flattens rows `0..` of a triangle, `k = 0..=n` per row, to `count` entries.
pub fn flatten_triangle(mut row: impl FnMut(u64) -> Result<Vec<BigInt>>, count: u64) -> Result<Vec<BigInt>> {
    let mut out = Vec::with_capacity(count as usize);
    let mut n = 0;
    while (out.len() as u64) < count {
        let r = row(n)?;
        out.extend(r.into_iter().take(n as usize + 1));
        n += 1;
    }
    out.truncate(count as usize);
    Ok(out)
}

/// How the terms of a fixture are produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    Spec(SequenceSpec),
    /// Brute-force count of non-overlapping partitions of `[n]`.
    NonOverlapping,
}

/// Reads CLI-style spec flags: `--family F [--r R] [--k K | --sum-k]
/// [--sizes GRAMMAR] [--residue-class C,M]`.
pub fn spec_from_flags(text: &str) -> Result<SequenceSpec> {
    let bad = |msg: String| Error::InvalidSpec(msg);
    let mut spec: Option<SequenceSpec> = None;
    let mut pending: Vec<(String, String)> = Vec::new();
    for chunk in text.split("--").map(str::trim).filter(|c| !c.is_empty()) {
        let (flag, value) = chunk.split_once(char::is_whitespace).unwrap_or((chunk, ""));
        let value = value.trim().trim_matches('"').to_string();
        if flag == "family" {
            spec = Some(SequenceSpec::new(value.parse()?));
        } else {
            pending.push((flag.to_string(), value));
        }
    }
    let mut spec = spec.ok_or_else(|| bad(format!("no --family in {text:?}")))?;
    for (flag, value) in pending {
        let num = |v: &str| v.parse::<u64>().map_err(|_| bad(format!("--{flag} expects a natural, got {v:?}")));
        match flag.as_str() {
            "r" => spec = spec.with_r(num(&value)?),
            "k" => spec = spec.with_k(num(&value)?),
            "sum-k" => spec.k_mode = crate::seqcore::KMode::SumOverK,
            "sizes" => spec = spec.with_sizes(value.parse()?),
            "residue-class" => {
                let (c, m) = value
                    .split_once(',')
                    .ok_or_else(|| bad(format!("--residue-class expects C,M, got {value:?}")))?;
                spec = spec.with_residue_class(num(c.trim())?, num(m.trim())?);
            }
            other => return Err(bad(format!("unknown flag --{other}"))),
        }
    }
    spec.validate()?;
    Ok(spec)
}

pub fn parse_generator(text: &str) -> Result<Generator> {
    match text.trim() {
        "oracle:non-overlapping" => Ok(Generator::NonOverlapping),
        other => spec_from_flags(other).map(Generator::Spec),
    }
}

/// The first `count` terms (or flattened triangle entries) of `gen`.
pub fn generate(gen: &Generator, layout: Layout, count: u64) -> Result<Vec<BigInt>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    match (gen, layout) {
        (Generator::Spec(spec), Layout::Sequence) => eval_exact_range(spec, count - 1),
        (Generator::Spec(spec), Layout::Triangle) => flatten_triangle(
            |n| {
                (0..=n)
                    .map(|k| crate::seqcore::eval_exact(&spec.clone().with_k(k), n))
                    .collect()
            },
            count,
        ),
        (Generator::NonOverlapping, Layout::Sequence) => (0..count)
            .map(|n| {
                crate::oracle::count_partitions(&crate::oracle::PartitionConstraint::new(n).non_overlapping())
            })
            .collect(),
        (Generator::NonOverlapping, Layout::Triangle) => {
            Err(Error::Domain("oracle generators only produce sequences".into()))
        }
    }
}

/// Cross-checks a vendored fixture against its documented generator.
pub fn crosscheck_fixture(dir: &Path, a_number: &str) -> Result<CrosscheckReport> {
    let (bfile, meta) = load_fixture(dir, a_number)?;
    let gen = parse_generator(&meta.generator)?;
    let values = generate(&gen, meta.layout, meta.count)?;
    crosscheck_values(&meta.generator, &values, &bfile, meta.offset, meta.count)
}

/// Reads `bNNNNNN.txt` and its `bNNNNNN.json` sidecar from `dir`.
pub fn load_fixture(dir: &Path, a_number: &str) -> Result<(BFile, Sidecar)> {
    let digits = check_a_number(a_number)?;
    let text = std::fs::read_to_string(dir.join(format!("b{digits}.txt")))?;
    let mut bfile = parse_bfile(&text)?;
    if bfile.a_number.is_empty() {
        bfile.a_number = a_number.to_string();
    }
    let meta = std::fs::read_to_string(dir.join(format!("b{digits}.json")))?;
    let sidecar: Sidecar =
        serde_json::from_str(&meta).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    Ok((bfile, sidecar))
}

/// Fixture A-numbers present in `dir`, sorted.
pub fn list_fixtures(dir: &Path) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if let Some(d) = name.strip_prefix('b').and_then(|s| s.strip_suffix(".json")) {
            let a = format!("A{d}");
            if check_a_number(&a).is_ok() {
                out.push(a);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The cache directory: `$MCFIN_OEIS_CACHE`, else `<system cache>/mcfin/oeis`.
pub fn default_cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(dir);
    }
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
        .unwrap_or_else(std::env::temp_dir);
    base.join("mcfin").join("oeis")
}

pub fn cache_path(cache_dir: &Path, a_number: &str) -> Result<PathBuf> {
    let digits = check_a_number(a_number)?;
    Ok(cache_dir.join(format!("b{digits}.txt")))
}

/// Returns the b-file from `cache_dir`, downloading it first when `online`
/// and not yet cached.
pub fn fetch_bfile(a_number: &str, cache_dir: &Path, online: bool) -> Result<BFile> {
    let digits = check_a_number(a_number)?;
    let path = cache_path(cache_dir, a_number)?;
    if path.exists() {
        let mut b = parse_bfile(&std::fs::read_to_string(&path)?)?;
        if b.a_number.is_empty() {
            b.a_number = a_number.to_string();
        }
        return Ok(b);
    }
    if !online {
        return Err(Error::NetworkDisabled(a_number.to_string()));
    }
    let url = format!("https://oeis.org/{a_number}/b{digits}.txt");
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(30)))
        .build()
        .into();
    let body = agent
        .get(&url)
        .call()
        .map_err(|e| Error::Http(format!("{url}: {e}")))?
        .body_mut()
        .read_to_string()
        .map_err(|e| Error::Http(format!("{url}: {e}")))?;
    let mut b = parse_bfile(&body)?;
    if b.a_number.is_empty() {
        b.a_number = a_number.to_string();
    }
    std::fs::create_dir_all(cache_dir)?;
    let tmp = cache_dir.join(format!(".b{digits}.txt.{}.tmp", std::process::id()));
    std::fs::write(&tmp, &body)?;
    std::fs::rename(&tmp, &path)?;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::Family;
    use proptest::prelude::*;

    fn fixtures() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/oeis")
    }

    #[test]
    fn parse_examples() {
        let b = parse_bfile("0 1\n1 1\n2 2\n3 5").unwrap();
        let vals: Vec<i64> = b.entries.iter().map(|(_, v)| v.try_into().unwrap()).collect();
        assert_eq!(vals, vec![1, 1, 2, 5]);
        let b = parse_bfile("# comment\n1 4\n2 6").unwrap();
        assert_eq!(b.entries.len(), 2);
        assert!(matches!(parse_bfile("0 1\n1 x"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_bfile("1 x"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_bfile("2 1\n2 3"), Err(Error::Parse { line: 2, .. })));
        let big = parse_bfile("0 123456789012345678901234567890").unwrap();
        assert_eq!(big.entries[0].1.to_string(), "123456789012345678901234567890");
        assert_eq!(parse_bfile("# A000110 Bell\n0 1").unwrap().a_number, "A000110");
    }

    #[test]
    fn a_numbers() {
        assert_eq!(check_a_number("A000110").unwrap(), "000110");
        for bad in ["A00011", "a000110", "A0001100", "B000110", "A00011x"] {
            assert!(matches!(check_a_number(bad), Err(Error::MalformedANumber(_))), "{bad}");
        }
    }

    #[test]
    fn bell_fixture_and_negative_control() {
        let (b, meta) = load_fixture(&fixtures(), "A000110").unwrap();
        let bell = SequenceSpec::new(Family::Bell);
        assert!(crosscheck(&bell, &b, meta.offset, meta.count).unwrap().pass);
        let (cat, meta) = load_fixture(&fixtures(), "A000108").unwrap();
        let r = crosscheck(&bell, &cat, meta.offset, meta.count).unwrap();
        let m = r.first_mismatch.unwrap();
        assert_eq!((m.n, m.got.as_str(), m.expected.as_str()), (4, "15", "14"));
        assert!(crosscheck(&bell, &b, 0, 1000).is_err());
    }

    #[test]
    fn fetch_is_offline_by_default() {
        let dir = std::env::temp_dir().join(format!("mcfin-oeis-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("b000110.txt"), "0 1\n1 1\n2 2\n").unwrap();
        let warm = fetch_bfile("A000110", &dir, false).unwrap();
        assert_eq!(warm.entries.len(), 3);
        assert!(matches!(fetch_bfile("A000111", &dir, false), Err(Error::NetworkDisabled(_))));
        assert!(matches!(fetch_bfile("A00011", &dir, true), Err(Error::MalformedANumber(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn generator_strings() {
        let s = spec_from_flags("--family bell --r 2").unwrap();
        assert_eq!(s, SequenceSpec::new(Family::Bell).with_r(2));
        let s = spec_from_flags("--family stirling --k 3 --sizes \"mod 3 in {0} from 3 except {1}\"").unwrap();
        assert_eq!(s.k_mode, crate::seqcore::KMode::Fixed(3));
        assert!(spec_from_flags("--r 2").is_err());
        assert!(spec_from_flags("--family bell --q 2").is_err());
        assert_eq!(parse_generator("oracle:non-overlapping").unwrap(), Generator::NonOverlapping);
    }

    #[test]
    fn every_fixture_passes() {
        for a in list_fixtures(&fixtures()).unwrap() {
            if a == "A000108" {
                continue;
            }
            let r = crosscheck_fixture(&fixtures(), &a).unwrap();
            assert!(r.pass, "{a}: {:?}", r.first_mismatch);
        }
    }

    #[test]
    fn triangle_flattening() {
        let flat = flatten_triangle(|n| Ok((0..=n).map(BigInt::from).collect()), 6).unwrap();
        let v: Vec<i64> = flat.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(v, vec![0, 0, 1, 0, 1, 2]);
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(
            start in -5i64..5,
            gaps in prop::collection::vec(1i64..4, 0..20),
            vals in prop::collection::vec(any::<i128>(), 20),
        ) {
            let mut idx = start;
            let mut entries = Vec::new();
            for (g, v) in gaps.iter().zip(&vals) {
                entries.push((idx, BigInt::from(*v)));
                idx += g;
            }
            let b = BFile { a_number: "A000042".into(), entries };
            prop_assert_eq!(parse_bfile(&format_bfile(&b)).unwrap(), b);
        }
    }
}

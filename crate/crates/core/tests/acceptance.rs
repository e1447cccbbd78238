//! Acceptance criteria. Runs without the libtest harness so each criterion
//! prints exactly one PASS/FAIL line.

use std::net::TcpListener;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rust_decimal::Decimal;
use styleplus::augment::{
    parse_response, remote_request_count, render, OfflineProvider, Provider, ReplayProvider, SpyProvider,
};
use styleplus::cli::{self, check_with, load_allowlist, load_lexicon, Pipeline, SourceFile, ToolConfig};
use styleplus::extractor::tokenize;
use styleplus::finding::{first_quoted, Descriptor, Finding, Origin, Section, Severity};
use styleplus::harness::{compute_metrics, estimate_cost, similarity_ratio, CostModel};
use styleplus::naming::{classify_case, to_camel_case, CamelStyle, CaseStyle, ProseName};
use styleplus::report::OutputFormat;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Corpus files reported as `corpus/<name>`, matching the replay fixtures.
fn corpus() -> Vec<SourceFile> {
    let mut files: Vec<SourceFile> = std::fs::read_dir(fixtures().join("corpus"))
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let display = format!("corpus/{}", path.file_name().unwrap().to_string_lossy());
            SourceFile { display, path }
        })
        .collect();
    files.sort_by(|a, b| a.display.cmp(&b.display));
    files
}

fn within(started: Instant, limit: Duration) -> Result<String, String> {
    let elapsed = started.elapsed();
    if elapsed < limit {
        Ok(format!("{:.3}s", elapsed.as_secs_f64()))
    } else {
        Err(format!("took {:.3}s, limit {:?}", elapsed.as_secs_f64(), limit))
    }
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

// 1. Camel-case conversions from the style guide's worked examples.
fn camel_case() -> Result<String, String> {
    let started = Instant::now();
    let cases = [
        ("XML HTTP request", CamelStyle::Upper, "XmlHttpRequest"),
        ("new customer ID", CamelStyle::Lower, "newCustomerId"),
        ("inner stopwatch", CamelStyle::Lower, "innerStopwatch"),
        ("supports IPv6 on iOS?", CamelStyle::Lower, "supportsIpv6OnIos"),
        ("YouTube importer", CamelStyle::Upper, "YoutubeImporter"),
        ("Turn on 2SV", CamelStyle::Lower, "turnOn2sv"),
        ("Guava 33.4.6", CamelStyle::Lower, "guava33_4_6"),
        ("ID Class", CamelStyle::Upper, "IdClass"),
        ("mod add", CamelStyle::Lower, "modAdd"),
        ("long 2 Array", CamelStyle::Lower, "long2Array"),
        ("hello class", CamelStyle::Upper, "HelloClass"),
    ];
    for (phrase, style, expected) in cases {
        let name = ProseName::parse(phrase).map_err(|e| format!("{phrase}: {e}"))?;
        let got = to_camel_case(&name, style);
        ensure(got == expected, || format!("{phrase}: got {got}, expected {expected}"))?;
    }
    for accepted in ["YouTubeImporter", "YoutubeImporter"] {
        let style = classify_case(accepted);
        ensure(style == CaseStyle::UpperCamelCase, || {
            format!("{accepted} classified {style:?}")
        })?;
    }
    let t = within(started, Duration::from_secs(1))?;
    Ok(format!("11 conversions exact, both YouTube forms accepted, {t}"))
}

struct Expect {
    line: u32,
    descriptor: Descriptor,
    severity: Severity,
    token: &'static str,
    /// Substring the message must contain.
    text: &'static str,
}

const fn e(line: u32, descriptor: Descriptor, severity: Severity, token: &'static str, text: &'static str) -> Expect {
    Expect {
        line,
        descriptor,
        severity,
        token,
        text,
    }
}

fn compare(file: &str, mode: &str, got: &[Finding], want: &[Expect]) -> Result<(), String> {
    let describe = |f: &Finding| format!("{}:{} {:?} {}", f.line, f.column, f.severity, f.message);
    ensure(got.len() == want.len(), || {
        format!(
            "{file} ({mode}): expected {} findings, got {:?}",
            want.len(),
            got.iter().map(describe).collect::<Vec<_>>()
        )
    })?;
    for w in want {
        let hit = got.iter().any(|f| {
            f.line == w.line
                && f.descriptor == w.descriptor
                && f.severity == w.severity
                && first_quoted(&f.message) == Some(w.token)
                && f.message.contains(w.text)
        });
        ensure(hit, || {
            format!(
                "{file} ({mode}): no {:?} {:?} for '{}' at line {} containing {:?}; got {:?}",
                w.severity,
                w.descriptor,
                w.token,
                w.line,
                w.text,
                got.iter().map(describe).collect::<Vec<_>>()
            )
        })?;
    }
    Ok(())
}

// 2. Blind-spot fidelity on one fixture per qualitative case.
fn blind_spots() -> Result<String, String> {
    use Descriptor::*;
    use Severity::{Error, Warning};
    let started = Instant::now();
    let mut disabled = ToolConfig::default();
    disabled.provider.enabled = false;
    let baseline = Pipeline::from_config(&disabled).map_err(|e| e.to_string())?;
    let hybrid = Pipeline::from_config(&ToolConfig::default()).map_err(|e| e.to_string())?;
    let m_message = "Parameter name 'M' must match pattern '^[a-z]([a-z0-9][a-zA-Z0-9]*)?$'";

    let cases: Vec<(&str, Vec<Expect>, Vec<Expect>)> = vec![
        (
            "CheckPerfectSquare.java",
            vec![],
            vec![e(5, MethodName, Error, "checkperfectsquare", "'checkPerfectSquare'")],
        ),
        (
            "Codechef.java",
            vec![],
            vec![e(5, ClassName, Error, "Codechef", "'CodeChef'")],
        ),
        (
            "ByteStream.java",
            vec![],
            vec![e(13, LocalVariableName, Error, "buflen", "'bufLen'")],
        ),
        (
            "MinimumCost.java",
            vec![],
            vec![e(2, MemberName, Error, "minans", "'minAns'")],
        ),
        ("Modulo.java", vec![], vec![e(2, ConstantName, Error, "mod", "'MOD'")]),
        (
            "ModTwo.java",
            vec![],
            vec![e(2, ConstantName, Warning, "MOD2", "'MOD_2'")],
        ),
        (
            "Remainders.java",
            vec![e(2, AbbreviationAsWordInName, Error, "remBNew", "consecutive capital")],
            vec![],
        ),
        (
            "MatrixPower.java",
            vec![e(3, ParameterName, Error, "M", m_message)],
            vec![e(3, ParameterName, Error, "M", "'m'")],
        ),
        (
            "FastReader.java",
            vec![],
            vec![e(10, JavadocRequired, Error, "next", "Javadoc")],
        ),
        (
            "ShortNames.java",
            vec![],
            vec![
                e(1, ClassName, Warning, "A", "single character"),
                e(2, MemberName, Warning, "n", "single character"),
                e(4, MethodName, Warning, "f", "single character"),
                e(4, ParameterName, Warning, "x", "single character"),
                e(5, LocalVariableName, Warning, "y", "single character"),
            ],
        ),
    ];
    for (file, want_baseline, want_hybrid) in &cases {
        let bytes = std::fs::read(fixtures().join("corpus").join(file)).map_err(|e| e.to_string())?;
        let got = baseline.analyze(file, &bytes).map_err(|e| e.to_string())?.findings;
        compare(file, "baseline", &got, want_baseline)?;
        let got = hybrid.analyze(file, &bytes).map_err(|e| e.to_string())?.findings;
        compare(file, "hybrid", &got, want_hybrid)?;
    }
    let m = std::fs::read(fixtures().join("corpus/MatrixPower.java")).unwrap();
    let exact = &baseline.analyze("MatrixPower.java", &m).unwrap().findings[0];
    let column = String::from_utf8_lossy(&m).lines().nth(2).unwrap().find("M)").unwrap() as u32 + 1;
    ensure(exact.message == m_message && exact.column == column, || {
        format!("M finding: {exact:?}")
    })?;
    let t = within(started, Duration::from_secs(5))?;
    Ok(format!(
        "{} cases match in both modes, exact message for 'M', {t}",
        cases.len()
    ))
}

// 3. Metrics from the published raw counts.
fn metrics() -> Result<String, String> {
    for ((tp, fp, fn_), want) in [((1052, 2, 384), "0.99/0.73/0.84"), ((1434, 1, 2), "0.99/0.99/0.99")] {
        let m = compute_metrics(tp, fp, fn_);
        let got = format!("{}/{}/{}", m.precision_display(), m.recall_display(), m.f1_display());
        ensure(got == want, || format!("({tp},{fp},{fn_}): got {got}, expected {want}"))?;
    }
    let rows = [("Checkstyle", 1052, 2, 384), ("Checkstyle+", 1434, 1, 2)].map(|(tool, tp, fp, fn_)| cli::EvalRow {
        tool: tool.into(),
        metrics: compute_metrics(tp, fp, fn_),
    });
    let table = cli::render_table(&rows);
    let cells: Vec<Vec<&str>> = table.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    ensure(
        cells[0] == ["Checkstyle", "1436", "1052", "2", "384", "0.99", "0.73", "0.84"],
        || table.clone(),
    )?;
    ensure(
        cells[1] == ["Checkstyle+", "1436", "1434", "1", "2", "0.99", "0.99", "0.99"],
        || table.clone(),
    )?;
    Ok("0.99/0.73/0.84 and 0.99/0.99/0.99 reproduced exactly".into())
}

// 4. Cost arithmetic.
fn cost() -> Result<String, String> {
    let model = CostModel::default();
    let cases = [
        (1_000_000, 0, Decimal::new(125, 2)),
        (0, 1_000_000, Decimal::new(1000, 2)),
        (4287, 0, Decimal::new(535875, 8)),
    ];
    for (input, output, want) in cases {
        let got = estimate_cost(input, output, &model);
        ensure(got == want, || {
            format!("({input},{output}): got {got}, expected {want}")
        })?;
    }
    let shown = estimate_cost(4287, 0, &model).to_string();
    ensure(shown == "0.00535875", || format!("rendered {shown}"))?;
    Ok("$1.25, $10.00 and $0.00535875 exact".into())
}

/// Indel distance by the textbook dynamic program.
fn indel_dp(a: &[char], b: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for i in 1..=a.len() {
        let mut cur = vec![i; b.len() + 1];
        for j in 1..=b.len() {
            cur[j] = if a[i - 1] == b[j - 1] {
                prev[j - 1]
            } else {
                prev[j].min(cur[j - 1]) + 1
            };
        }
        prev = cur;
    }
    prev[b.len()]
}

fn oracle_ratio(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let total = a.len() + b.len();
    if total == 0 {
        return 100.0;
    }
    100.0 * (1.0 - indel_dp(&a, &b) as f64 / total as f64)
}

fn random_text(rng: &mut StdRng, alphabet: &[char], max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

// 5. Similarity ratio against an independent DP.
fn similarity() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(5);
    let small: Vec<char> = "ab".chars().collect();
    let wide: Vec<char> = "abcdefgh [](). \né✓".chars().collect();
    for i in 0..1000 {
        let (alphabet, max) = match i % 3 {
            0 => (&small, 20),
            1 => (&wide, 90),
            _ => (&wide, 300),
        };
        let a = random_text(&mut rng, alphabet, max);
        let b = if i % 5 == 0 {
            let mut b = a.clone();
            b.push_str(&random_text(&mut rng, alphabet, 5));
            b
        } else {
            random_text(&mut rng, alphabet, max)
        };
        let (got, want) = (similarity_ratio(&a, &b), oracle_ratio(&a, &b));
        ensure(got == want, || format!("pair {i}: {got} vs {want} for {a:?} / {b:?}"))?;
    }
    let r = similarity_ratio("abcd", "abce");
    ensure(r == 75.0, || format!("abcd/abce = {r}"))?;
    Ok("1000 random pairs agree exactly, abcd/abce = 75".into())
}

/// Reads one response line by hand; `None` when it is not a finding.
fn oracle_line(line: &str) -> Option<(Severity, u32, Section, String)> {
    fn lit(s: &str, c: char) -> Option<&str> {
        s.trim_start().strip_prefix(c)
    }
    let s = lit(line, '[')?.trim_start();
    let lower = s.to_ascii_lowercase();
    let (severity, s) = if lower.starts_with("error") {
        (Severity::Error, &s[5..])
    } else if lower.starts_with("warning") {
        (Severity::Warning, &s[7..])
    } else {
        return None;
    };
    let s = lit(s, ']')?;
    let s = lit(s, '(')?.trim_start();
    let digits = s.len() - s.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    let number: u32 = s[..digits].parse().ok().filter(|n| *n > 0)?;
    let s = lit(&s[digits..], ')')?;
    let s = lit(s, '(')?.trim_start();
    let id_len = s.len() - s.trim_start_matches(|c: char| c.is_ascii_digit() || c == '.').len();
    let section = Section::ALL.into_iter().find(|sec| sec.id() == &s[..id_len])?;
    let s = lit(&s[id_len..], ')')?;
    let s = lit(s, '(')?.trim_end();
    let message = s.strip_suffix(')')?;
    Some((severity, number, section, message.trim().to_string()))
}

fn random_finding(rng: &mut StdRng) -> Finding {
    let section = Section::ALL[rng.gen_range(0..Section::ALL.len())];
    let alphabet: Vec<char> = "abcXYZ019 _'()[].,;:/*é✓".chars().collect();
    let mut message;
    loop {
        message = random_text(rng, &alphabet, 60).trim().to_string();
        if !message.is_empty() {
            break;
        }
    }
    Finding {
        severity: if rng.gen_bool(0.5) {
            Severity::Error
        } else {
            Severity::Warning
        },
        line: rng.gen_range(1..=u32::MAX),
        column: 1,
        section,
        message,
        descriptor: section.descriptor(),
        origin: Origin::Llm,
    }
}

fn mutate(rng: &mut StdRng, line: &str) -> String {
    let noise: Vec<char> = "[]()0123456789.  \tErWw'xé".chars().collect();
    let mut chars: Vec<char> = line.chars().collect();
    for _ in 0..rng.gen_range(1..=4) {
        if chars.is_empty() {
            chars.push(noise[0]);
        }
        let at = rng.gen_range(0..chars.len());
        match rng.gen_range(0..5) {
            0 => {
                chars.remove(at);
            }
            1 => chars.insert(at, noise[rng.gen_range(0..noise.len())]),
            2 => chars[at] = noise[rng.gen_range(0..noise.len())],
            3 => chars.truncate(at),
            _ => {
                let other = rng.gen_range(0..chars.len());
                chars.swap(at, other);
            }
        }
    }
    chars.into_iter().collect()
}

// 6. Response grammar round-trip and fuzzing.
fn grammar() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(6);
    let mut lines = Vec::new();
    for i in 0..500 {
        let f = random_finding(&mut rng);
        let text = render(&f);
        let (got, diags) = parse_response(&text);
        ensure(got == vec![f.clone()] && diags.is_empty(), || {
            format!("finding {i}: {text:?} parsed to {got:?} {diags:?}")
        })?;
        lines.push(text);
    }
    let mut accepted = 0;
    for i in 0..1000 {
        let line = mutate(&mut rng, &lines[i % lines.len()]);
        let outcome = panic::catch_unwind(|| parse_response(&line));
        let (got, diags) = outcome.map_err(|_| format!("parser panicked on {line:?}"))?;
        let want = oracle_line(&line);
        let got_tuple = got.first().map(|f| (f.severity, f.line, f.section, f.message.clone()));
        ensure(got.len() <= 1 && got_tuple == want, || {
            format!("mutant {i} {line:?}: parser {got_tuple:?}, oracle {want:?}")
        })?;
        ensure(got.len() + diags.len() == usize::from(!line.trim().is_empty()), || {
            format!("mutant {i} {line:?} not partitioned")
        })?;
        accepted += got.len();
    }
    Ok(format!(
        "500 round-trips equal; 1000 mutants, no panics, no spurious findings ({accepted} still well-formed)"
    ))
}

// 7. Warm-cache determinism with the replay provider.
fn cache_determinism() -> Result<String, String> {
    let cache = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = ToolConfig {
        cache_dir: cache.path().to_path_buf(),
        ..ToolConfig::default()
    };
    let spy = Arc::new(SpyProvider::new(ReplayProvider::new(fixtures().join("replay"))));
    let pipeline = Pipeline::with_provider(&cfg, Some(spy.clone() as Arc<dyn Provider>)).map_err(|e| e.to_string())?;
    let files = corpus();
    ensure(files.len() == 20, || format!("corpus has {} files", files.len()))?;
    let run = || {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        check_with(&pipeline, &files, OutputFormat::Text, &mut out, &mut err).map(|code| (code, out))
    };
    let (code1, first) = run().map_err(|e| e.to_string())?;
    let cold = spy.calls();
    let (code2, second) = run().map_err(|e| e.to_string())?;
    let warm = spy.calls() - cold;
    ensure(cold == 20, || format!("first run made {cold} provider calls"))?;
    ensure(warm == 0, || format!("second run made {warm} provider calls"))?;
    ensure(first == second && code1 == code2, || {
        "outputs differ between runs".into()
    })?;

    let binary = |cache_dir: &Path| {
        std::process::Command::new(env!("CARGO_BIN_EXE_styleplus"))
            .current_dir(fixtures())
            .args(["check", "--replay-dir", "replay", "--cache-dir"])
            .arg(cache_dir)
            .arg("corpus")
            .output()
            .map_err(|e| e.to_string())
    };
    let cli_cache = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = binary(cli_cache.path())?;
    let b = binary(cli_cache.path())?;
    ensure(a.stdout == b.stdout && a.status.code() == Some(1), || {
        "binary outputs differ".into()
    })?;
    ensure(a.stdout == first, || "library and binary outputs differ".into())?;
    Ok(format!(
        "{cold} calls cold, 0 warm, stdout byte-identical ({} bytes)",
        first.len()
    ))
}

// 8. Offline mode never touches the network.
fn offline_isolation() -> Result<String, String> {
    let started = Instant::now();
    let listener = TcpListener::bind("127.0.0.1:0").map_err(|e| e.to_string())?;
    listener.set_nonblocking(true).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg_path = dir.path().join("checks.xml");
    let config = format!(
        r#"<module name="Checker"><module name="LlmStyleCheck">
<property name="endpoint" value="http://{}/v1/chat/completions"/>
<property name="apiKey" value="unused"/>
</module></module>"#,
        listener.local_addr().unwrap()
    );
    std::fs::write(&cfg_path, config).map_err(|e| e.to_string())?;
    let before = remote_request_count();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let args: Vec<std::ffi::OsString> = vec![
        "styleplus".into(),
        "check".into(),
        "--offline".into(),
        "--config".into(),
        cfg_path.into(),
        fixtures().join("corpus").into(),
    ];
    let code = cli::run(args, &mut out, &mut err);
    ensure(code == 1, || format!("exit {code}: {}", String::from_utf8_lossy(&err)))?;
    ensure(remote_request_count() == before, || {
        "remote requests were issued".into()
    })?;
    ensure(listener.accept().is_err(), || {
        "the endpoint received a connection".into()
    })?;

    let cfg = ToolConfig::default();
    let offline = OfflineProvider::new(load_lexicon(&cfg).unwrap(), load_allowlist(&cfg).unwrap());
    let spy = Arc::new(SpyProvider::new(offline));
    let pipeline = Pipeline::with_provider(&cfg, Some(spy.clone() as Arc<dyn Provider>)).map_err(|e| e.to_string())?;
    let (report, _) = pipeline.run(&corpus());
    ensure(report.failures.is_empty(), || format!("{:?}", report.failures))?;
    ensure(spy.calls() == 20, || {
        format!("offline provider called {} times", spy.calls())
    })?;
    ensure(remote_request_count() == before, || {
        "remote requests were issued".into()
    })?;
    let t = within(started, Duration::from_secs(10))?;
    Ok(format!("20 files, 0 remote requests, 0 connections, {t}"))
}

// 9. Tokenizer round-trip on the corpus and mutated variants.
fn tokenizer_round_trip() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(9);
    let sources: Vec<String> = corpus()
        .iter()
        .map(|f| std::fs::read_to_string(&f.path).unwrap())
        .collect();
    let check = |label: &str, text: &str| {
        let joined: String = tokenize(text).iter().map(|t| t.text.as_str()).collect();
        ensure(joined == text, || format!("{label} does not round-trip"))
    };
    for (i, s) in sources.iter().enumerate() {
        check(&format!("fixture {i}"), s)?;
    }
    let noise: Vec<char> = "\"'/*\\\n\r{}()<>;@ \t.0xé✓".chars().collect();
    for i in 0..200 {
        let mut chars: Vec<char> = sources[i % sources.len()].chars().collect();
        for _ in 0..rng.gen_range(1..=8) {
            let at = rng.gen_range(0..=chars.len());
            match rng.gen_range(0..3) {
                0 if at < chars.len() => {
                    chars.remove(at);
                }
                1 if at < chars.len() => chars.truncate(at),
                _ => chars.insert(at, noise[rng.gen_range(0..noise.len())]),
            }
        }
        let text: String = chars.into_iter().collect();
        check(&format!("mutant {i}"), &text)?;
    }
    Ok(format!("{} fixtures and 200 mutants round-trip", sources.len()))
}

type Criterion = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 9] = [
        ("camel-case conversions", camel_case),
        ("blind-spot fidelity", blind_spots),
        ("metrics oracle", metrics),
        ("cost oracle", cost),
        ("similarity metric", similarity),
        ("response grammar round-trip", grammar),
        ("cache determinism", cache_determinism),
        ("offline isolation", offline_isolation),
        ("extractor round-trip", tokenizer_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

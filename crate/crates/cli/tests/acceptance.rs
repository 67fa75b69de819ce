//! Acceptance run: one pass/fail line per criterion, each against a pinned
//! wall-clock limit. Criteria 1 to 6 reuse the core suites; criterion 7
//! drives the binary.

#[allow(dead_code)]
#[path = "../../core/tests/blocks.rs"]
mod blocks;
#[allow(dead_code)]
#[path = "../../core/tests/embeddings.rs"]
mod embeddings;
#[allow(dead_code)]
#[path = "../../core/tests/groups.rs"]
mod groups;
#[allow(dead_code)]
#[path = "../../core/tests/ledger.rs"]
mod ledger;
#[allow(dead_code)]
#[path = "../../core/tests/omega.rs"]
mod omega;
#[allow(dead_code)]
#[path = "../../core/tests/open_blocks.rs"]
mod open_blocks;

use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    /// The limit bounds each command rather than the whole criterion.
    per_command: bool,
    run: fn() -> Result<String, String>,
}

fn suite(parts: &[fn()]) -> Result<String, String> {
    for part in parts {
        part();
    }
    Ok(format!("{} suites", parts.len()))
}

fn group_laws() -> Result<String, String> {
    suite(&[groups::catalog_groups_satisfy_the_axioms, groups::wreath_order_matches_formula, groups::enumeration_returns_each_element_once])
}

fn embeddings() -> Result<String, String> {
    suite(&[
        embeddings::every_small_solvable_group_embeds,
        embeddings::kk_step_projects_to_the_quotient,
        embeddings::s3_transpositions_map_to_the_nontrivial_class,
        embeddings::q8_range_is_all_pairs,
    ])
}

fn omega() -> Result<String, String> {
    suite(&[omega::small_families_build_and_match, omega::shuffled_family_is_refused, omega::noncommuting_factors_are_refused])
}

fn blocks() -> Result<String, String> {
    suite(&[
        blocks::zn_blocks_match_generator_composition,
        blocks::amplification_counts,
        blocks::amplification_creates_a_free_orbit,
        blocks::glued_blocks_are_faithful,
    ])
}

fn ledger() -> Result<String, String> {
    suite(&[ledger::random_round_trips, ledger::exhaustive_small_coordinates, ledger::malformed_labels_are_diagnosed])
}

fn open_blocks() -> Result<String, String> {
    suite(&[
        open_blocks::shift_block_has_exact_p2,
        open_blocks::shift_block_composes_on_a_window,
        open_blocks::glued_open_block_distinguishes_radius_three,
    ])
}

/// Per-command limit for the end-to-end runs.
const COMMAND_LIMIT: Duration = Duration::from_secs(120);
/// Single-byte tampers tried per certificate.
const TAMPERS: usize = 24;

fn corkcalc(args: &[&str]) -> Result<(bool, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_corkcalc")).args(args).output().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if elapsed >= COMMAND_LIMIT {
        return Err(format!("{args:?} took {elapsed:.1?}"));
    }
    Ok((out.status.success(), elapsed))
}

/// Replaces one ASCII byte by a different ASCII byte of the same kind.
fn tamper(text: &[u8], pos: usize) -> Vec<u8> {
    let mut t = text.to_vec();
    t[pos] = match t[pos] {
        b'0'..=b'8' => t[pos] + 1,
        b'9' => b'0',
        b'a' => b'b',
        _ => b'a',
    };
    t
}

fn end_to_end() -> Result<String, String> {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a4d);
    let mut slowest = Duration::ZERO;
    let mut tampers = 0;
    for (name, extra) in [("S3", &[][..]), ("Q8", &["--mode", "weak"][..])] {
        let cert = dir.join(format!("{name}.json"));
        let path = cert.to_str().unwrap();
        let mut args = vec!["cork", "--group", name, "--m", "1", "--ball", "2000"];
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--out", path]);
        let (ok, t) = corkcalc(&args)?;
        slowest = slowest.max(t);
        if !ok {
            return Err(format!("cork {name} exited nonzero"));
        }
        let (ok, t) = corkcalc(&["verify", path])?;
        slowest = slowest.max(t);
        if !ok {
            return Err(format!("verify {name} exited nonzero"));
        }
        let text = std::fs::read(&cert).map_err(|e| e.to_string())?;
        let ascii: Vec<usize> = (0..text.len()).filter(|&i| text[i].is_ascii() && !text[i].is_ascii_whitespace()).collect();
        let mut positions: Vec<usize> = (0..TAMPERS).map(|_| ascii[rng.gen_range(0..ascii.len())]).collect();
        let ts = find(&text, b"\"timestamp\": ").ok_or("no timestamp")? + b"\"timestamp\": ".len();
        positions.push(ts);
        for pos in positions {
            let bad = dir.join(format!("{name}-tampered.json"));
            std::fs::write(&bad, tamper(&text, pos)).map_err(|e| e.to_string())?;
            let (ok, t) = corkcalc(&["verify", bad.to_str().unwrap()])?;
            slowest = slowest.max(t);
            if ok {
                return Err(format!("{name}: tamper at byte {pos} passed verification"));
            }
            tampers += 1;
        }
        remove(&dir.join(format!("{name}-tampered.json")));
    }
    Ok(format!("{tampers} tampers rejected, slowest command {slowest:.1?}"))
}

fn find(hay: &[u8], needle: &[u8]) -> Option<usize> {
    hay.windows(needle.len()).position(|w| w == needle)
}

fn remove(p: &Path) {
    let _ = std::fs::remove_file(p);
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "group laws", limit: Duration::from_secs(10), per_command: false, run: group_laws },
        Criterion { id: 2, name: "wreath embeddings", limit: Duration::from_secs(60), per_command: false, run: embeddings },
        Criterion { id: 3, name: "omega assembly", limit: Duration::from_secs(30), per_command: false, run: omega },
        Criterion { id: 4, name: "blocks", limit: Duration::from_secs(60), per_command: false, run: blocks },
        Criterion { id: 5, name: "ledger", limit: Duration::from_secs(60), per_command: false, run: ledger },
        Criterion { id: 6, name: "open blocks", limit: Duration::from_secs(30), per_command: false, run: open_blocks },
        Criterion { id: 7, name: "end to end", limit: COMMAND_LIMIT, per_command: true, run: end_to_end },
    ];
    let mut failed = 0;
    let mut stdout = std::io::stdout();
    for c in &criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        let elapsed = start.elapsed();
        let (verdict, detail) = match outcome {
            Ok(d) if c.per_command || elapsed < c.limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over the time limit")),
            Err(e) => ("FAIL", e),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        let _ = writeln!(
            stdout,
            "criterion {} [{}]: {verdict} in {:.2}s (limit {}s{}): {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            if c.per_command { " per command" } else { "" }
        );
    }
    let _ = writeln!(stdout, "acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

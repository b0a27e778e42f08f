//! File formats: schedules, level files, removal records, certificates.
//!
//! Level files follow the schema `{level, intervals: [{left, right}],
//! parents: [int]}` with rationals as `{"num": "...", "den": "..."}` decimal
//! strings; schedule files are `{root, branching: [...], budgets:
//! [{m, n, value}]}`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cantor::{BuildOutput, CantorSchedule, LevelCollection, RemovalLedger, RemovedChild};

use super::CliError;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("cannot serialize for {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn read_schedule(path: &Path) -> Result<CantorSchedule, CliError> {
    read_json(path)
}

#[derive(Serialize, Deserialize)]
struct RemovedFile {
    level: u32,
    removed: Vec<RemovedChild>,
}

#[derive(Serialize, Deserialize)]
struct LedgerFile {
    ledgers: Vec<RemovalLedger>,
    empty_from: Option<u32>,
}

fn level_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("level_{n:03}.json"))
}

fn removed_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("removed_{n:03}.json"))
}

/// Writes one level file per level, the removal records and the ledger.
pub fn write_build(dir: &Path, out: &BuildOutput) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    for (n, level) in out.levels.iter().enumerate() {
        write_json(&level_path(dir, n), level)?;
    }
    for (n, removed) in out.removed.iter().enumerate() {
        write_json(
            &removed_path(dir, n + 1),
            &RemovedFile {
                level: n as u32 + 1,
                removed: removed.clone(),
            },
        )?;
    }
    write_json(
        &dir.join("ledger.json"),
        &LedgerFile {
            ledgers: out.ledgers.clone(),
            empty_from: out.empty_from,
        },
    )
}

/// Reads a build directory back; removal records are optional (extraction
/// needs them, plain level consumers do not).
pub fn read_build(dir: &Path) -> Result<BuildOutput, CliError> {
    let mut levels: Vec<LevelCollection> = Vec::new();
    loop {
        let path = level_path(dir, levels.len());
        if !path.exists() {
            break;
        }
        levels.push(read_json(&path)?);
    }
    if levels.is_empty() {
        return Err(CliError::Io(format!(
            "no level files found in {}",
            dir.display()
        )));
    }
    let mut removed: Vec<Vec<RemovedChild>> = Vec::new();
    for n in 1..levels.len() {
        let path = removed_path(dir, n);
        if path.exists() {
            let file: RemovedFile = read_json(&path)?;
            removed.push(file.removed);
        } else {
            removed.push(Vec::new());
        }
    }
    let ledger_file = dir.join("ledger.json");
    let (ledgers, empty_from) = if ledger_file.exists() {
        let file: LedgerFile = read_json(&ledger_file)?;
        (file.ledgers, file.empty_from)
    } else {
        (Vec::new(), None)
    };
    Ok(BuildOutput {
        levels,
        removed,
        ledgers,
        empty_from,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{build, BuildOptions, MiddleChildren};
    use crate::rigor::{CertifiedReal, ClosedInterval, Rat};
    use num_traits::{One, Zero};
    use std::collections::BTreeMap;

    #[test]
    fn build_directory_round_trip() {
        let mut budgets = BTreeMap::new();
        for n in 0..3u32 {
            budgets.insert((n, n), CertifiedReal::exact(Rat::one()));
        }
        let s = CantorSchedule::new(
            ClosedInterval::new(Rat::zero(), Rat::one()),
            vec![3; 3],
            budgets,
        )
        .unwrap();
        let out = build(
            &s,
            &MiddleChildren { count: 1 },
            3,
            &BuildOptions::default(),
        )
        .unwrap();
        let dir = std::env::temp_dir().join(format!("gencantor-io-test-{}", std::process::id()));
        write_build(&dir, &out).unwrap();
        let back = read_build(&dir).unwrap();
        assert_eq!(back.levels.len(), out.levels.len());
        for (a, b) in back.levels.iter().zip(&out.levels) {
            assert_eq!(a, b);
        }
        assert_eq!(back.removed[1].len(), out.removed[1].len());
        assert_eq!(back.removed[1][0].interval, out.removed[1][0].interval);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}

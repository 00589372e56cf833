//! A deterministic stand-in model for tests, examples and demos.
//!
//! [`write_stub_model`] drops a POSIX `sh` + `awk` script into a directory.
//! Invoked as `./stub_model <sim_id>` from that directory it:
//!
//! 1. reads `params_<sim_id>.nml` (exits 1 if it is missing),
//! 2. sums every numeric value found on `name = value` lines, in file order,
//! 3. writes the sum to `results_<sim_id>.txt` as the shortest decimal that
//!    reads back to the same double, always with a `.` or exponent.
//!
//! Environment knobs:
//!
//! * `STUB_SLEEP=<seconds>` sleeps before writing the result.
//! * `STUB_COUNTER_DIR=<dir>` tracks how many stub instances are running at
//!   once. `<dir>/count` holds the live count and `<dir>/high` its maximum;
//!   updates happen under a `mkdir` lock and are published by writing a
//!   temporary file and renaming it over the old one.
//! * `STUB_FAIL_IDS="<id> <id> ..."` makes the listed IDs exit 1 without
//!   writing a result.
//!
//! Non-POSIX hosts have no stub; tests that need it are compiled only on
//! Unix. On such hosts, a model that follows the same file contract can be
//! substituted in the `--command` of a sweep.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const STUB_FILE_NAME: &str = "stub_model";

const STUB_SOURCE: &str = r#"#!/bin/sh
# Stub model: sums numeric parameters of params_<id>.nml into results_<id>.txt.
LC_ALL=C
export LC_ALL
id="$1"
if [ -z "$id" ]; then
    echo "usage: $0 <sim_id>" >&2
    exit 2
fi
config="params_${id}.nml"
if [ ! -f "$config" ]; then
    echo "stub_model: missing $config" >&2
    exit 1
fi

lock() {
    while ! mkdir "$STUB_COUNTER_DIR/lock" 2>/dev/null; do
        sleep 0.005
    done
}

unlock() {
    rmdir "$STUB_COUNTER_DIR/lock"
}

bump() {
    lock
    n=$(cat "$STUB_COUNTER_DIR/count" 2>/dev/null || echo 0)
    n=$((n + $1))
    echo "$n" > "$STUB_COUNTER_DIR/count.tmp.$$"
    mv "$STUB_COUNTER_DIR/count.tmp.$$" "$STUB_COUNTER_DIR/count"
    high=$(cat "$STUB_COUNTER_DIR/high" 2>/dev/null || echo 0)
    if [ "$n" -gt "$high" ]; then
        echo "$n" > "$STUB_COUNTER_DIR/high.tmp.$$"
        mv "$STUB_COUNTER_DIR/high.tmp.$$" "$STUB_COUNTER_DIR/high"
    fi
    unlock
}

if [ -n "$STUB_COUNTER_DIR" ]; then
    bump 1
fi
if [ -n "$STUB_SLEEP" ]; then
    sleep "$STUB_SLEEP"
fi
if [ -n "$STUB_COUNTER_DIR" ]; then
    bump -1
fi

for bad in $STUB_FAIL_IDS; do
    if [ "$bad" = "$id" ]; then
        echo "stub_model: simulated failure for $id" >&2
        exit 1
    fi
done

awk '
/=/ {
    v = substr($0, index($0, "=") + 1)
    gsub(/[ \t,]/, "", v)
    if (v ~ /^[-+]?([0-9]+[.]?[0-9]*|[.][0-9]+)([eE][-+]?[0-9]+)?$/) {
        sum += v + 0
    }
}
END {
    if (sum == int(sum) && sum < 1e15 && sum > -1e15) {
        s = sprintf("%.0f", sum)
    } else {
        for (p = 1; p <= 17; p++) {
            s = sprintf("%." p "g", sum)
            if (s + 0 == sum) break
        }
    }
    if (s !~ /[.eE]/) s = s ".0"
    print s
}
' "$config" > "results_${id}.txt.tmp" && mv "results_${id}.txt.tmp" "results_${id}.txt"
"#;

/// Writes the stub model into `dir` and marks it executable.
pub fn write_stub_model(dir: &Path) -> Result<PathBuf> {
    let path = dir.join(STUB_FILE_NAME);
    std::fs::write(&path, STUB_SOURCE)
        .map_err(|e| Error::io(format!("writing stub model {}", path.display()), e))?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755))
            .map_err(|e| Error::io("making stub model executable", e))?;
    }
    Ok(path)
}

/// Maximum number of concurrent stub instances recorded in `counter_dir`.
pub fn read_high_water(counter_dir: &Path) -> Result<usize> {
    let path = counter_dir.join("high");
    match std::fs::read_to_string(&path) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad counter value in {}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(0),
        Err(e) => Err(Error::io(format!("reading {}", path.display()), e)),
    }
}

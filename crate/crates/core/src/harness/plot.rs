//! Standalone matplotlib script for a harness CSV.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::config::MechanismKind;
use super::row::{format_float, read_rows};
use crate::error::{Error, Result};

/// Writes a Python script that plots the CSV at `csv_path`: rate against the
/// interference cap and against the power cap for sweep CSVs, rate against
/// the swept power for fixed-power CSVs. Series are listed from the CSV
/// content, which is read by column name. The half-duplex rows repeat for
/// every zeta, so that series is drawn once. Swept curves average feasible
/// points only.
pub fn emit_plot_script(csv_path: &Path, out_path: &Path) -> Result<()> {
    let rows = read_rows(csv_path)?;
    let all: BTreeSet<(&str, String)> = rows
        .iter()
        .map(|r| (r.mechanism.name(), format_float(r.zeta)))
        .collect();
    let mut baseline_seen = false;
    let series: Vec<(&str, String)> = all
        .into_iter()
        .filter(|(m, _)| *m != MechanismKind::HalfDuplex.name() || !std::mem::replace(&mut baseline_seen, true))
        .collect();
    let swept = rows
        .iter()
        .find_map(|r| r.fixed.map(|f| f.swept_name()));

    let mut s = String::new();
    let csv_literal = format!("{:?}", csv_path.display().to_string());
    s.push_str("#!/usr/bin/env python3\n");
    let _ = writeln!(s, "# Generated by `fdcrn plot` from {}.", csv_path.display());
    if rows.is_empty() {
        s.push_str("# WARNING: the CSV has no data rows; every figure below is empty.\n");
    }
    s.push_str(
        "import csv\nfrom collections import defaultdict\n\nimport matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\n",
    );
    let _ = writeln!(s, "CSV_PATH = {csv_literal}");
    s.push_str("SERIES = [\n");
    for (m, z) in &series {
        let _ = writeln!(s, "    ({m:?}, {z:?}),");
    }
    s.push_str("]\n");
    let _ = writeln!(s, "SWEPT = {}", swept.map_or("None".to_string(), |v| format!("{v:?}")));
    s.push_str(SCRIPT_BODY);

    std::fs::write(out_path, s).map_err(|e| Error::io(out_path, e))
}

const SCRIPT_BODY: &str = r##"

def load(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(line for line in f if not line.startswith("#")))


def mean_curve(rows, mechanism, zeta, x_col, group_col):
    acc = defaultdict(list)
    for r in rows:
        if SWEPT is not None and r["converged"] != "true":
            continue
        if r["mechanism"] == mechanism and r["zeta"] == zeta:
            acc[(r[group_col], float(r[x_col]))].append(float(r["rate"]))
    curves = defaultdict(list)
    for (group, x), rates in sorted(acc.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        curves[group].append((x, sum(rates) / len(rates)))
    return curves


def label(mechanism, zeta):
    return mechanism if mechanism == "HalfDuplex" else f"{mechanism}, zeta={zeta}"


def figure(rows, x_col, group_col, xlabel, out):
    fig, ax = plt.subplots()
    for mechanism, zeta in SERIES:
        for group, points in mean_curve(rows, mechanism, zeta, x_col, group_col).items():
            xs, ys = zip(*points)
            ax.plot(xs, ys, marker="o", label=f"{label(mechanism, zeta)} ({group_col}={group})")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("mean rate (bits/s/Hz)" if SWEPT is None else "mean rate over feasible trials (bits/s/Hz)")
    ax.grid(True)
    if SERIES:
        ax.legend(fontsize="small")
    fig.savefig(out, dpi=150)
    print("wrote", out)


def main():
    rows = load(CSV_PATH)
    stem = CSV_PATH.rsplit(".", 1)[0]
    if SWEPT is None:
        figure(rows, "I_bar_P_dB", "P_max_dB", "interference cap (dB)", stem + "_rate_vs_ibar.png")
        figure(rows, "P_max_dB", "I_bar_P_dB", "power cap (dB)", stem + "_rate_vs_pmax.png")
    else:
        figure(rows, "sweep_dB", "I_bar_P_dB", SWEPT + " (dB)", stem + "_rate_vs_" + SWEPT + ".png")


if __name__ == "__main__":
    main()
"##;

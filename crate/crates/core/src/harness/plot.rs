use std::path::Path;

use super::campaign::TrialRow;
use super::csvio::write_text;
use crate::error::{Error, Result};

const TEMPLATE: &str = r#"#!/usr/bin/env python3
"""Curves from a campaign CSV: sum-rate and served users against SNR for the
largest array, and sum-rate against array size at the highest SNR.
Solid lines are the spherical-wavefront model, dashed the plane-wave model."""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_PATH = sys.argv[1] if len(sys.argv) > 1 else "@CSV@"
PREFIX = sys.argv[2] if len(sys.argv) > 2 else "@PREFIX@"
STYLE = {"sw": "-", "pw": "--"}
MARKER = {"dbs": "o", "dbs_s": "s", "sus": "^", "mrt": "x"}

acc = defaultdict(lambda: [0.0, 0.0, 0])
with open(CSV_PATH, newline="") as fh:
    for row in csv.DictReader(fh):
        key = (float(row["snr_db"]), int(row["m"]), row["model"], row["method"])
        cell = acc[key]
        cell[0] += float(row["sum_rate_bps_hz"])
        cell[1] += float(row["served_users"])
        cell[2] += 1
mean = {k: (v[0] / v[2], v[1] / v[2]) for k, v in acc.items()}
snrs = sorted({k[0] for k in mean})
ms = sorted({k[1] for k in mean})
series = sorted({(k[2], k[3]) for k in mean})


def figure(xs, key_of, index, xlabel, ylabel, title, name):
    fig, ax = plt.subplots(figsize=(6, 4))
    for model, method in series:
        ys = [mean.get(key_of(x, model, method), (None, None))[index] for x in xs]
        if any(y is None for y in ys):
            continue
        ax.plot(xs, ys, STYLE.get(model, ":"), marker=MARKER.get(method, "."),
                label=f"{method.upper()} ({model.upper()})")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(f"{PREFIX}_{name}.png", dpi=150)
    plt.close(fig)


m_top, snr_top = ms[-1], snrs[-1]
figure(snrs, lambda x, mo, me: (x, m_top, mo, me), 0, "SNR (dB)", "Sum-rate (bps/Hz)",
       f"M = {m_top}", "sum_rate_vs_snr")
figure(snrs, lambda x, mo, me: (x, m_top, mo, me), 1, "SNR (dB)", "Served users",
       f"M = {m_top}", "served_vs_snr")
figure(ms, lambda x, mo, me: (snr_top, x, mo, me), 0, "Antennas M", "Sum-rate (bps/Hz)",
       f"SNR = {snr_top:g} dB", "sum_rate_vs_m")
"#;

/// Writes a Python/matplotlib script that reads `csv_path` and saves three
/// PNG figures named after `prefix`. Both can be overridden on the script's
/// command line.
pub fn emit_plot_script(
    rows: &[TrialRow],
    csv_path: impl AsRef<Path>,
    prefix: &str,
    path: impl AsRef<Path>,
) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Empty("campaign rows"));
    }
    let csv = csv_path.as_ref().to_string_lossy().replace('\\', "\\\\").replace('"', "\\\"");
    let prefix = prefix.replace('\\', "\\\\").replace('"', "\\\"");
    let script = TEMPLATE.replace("@CSV@", &csv).replace("@PREFIX@", &prefix);
    write_text(path, &script)
}

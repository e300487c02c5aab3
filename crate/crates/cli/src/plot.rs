//! Generated matplotlib scripts that redraw a CSV written by `spectrum` or
//! `sweep`. Nothing here runs Python.

use std::path::Path;

pub fn spectrum_script(csv: &Path, theta: f64, with_approx: bool) -> String {
    let approx = if with_approx {
        "ax.plot(d[\"omega\"], d[\"S_approx\"], \"--\", label=\"large-detuning form\")\n"
    } else {
        ""
    };
    format!(
        r##"import csv
import matplotlib.pyplot as plt

with open({path:?}) as f:
    rows = list(csv.DictReader(line for line in f if not line.startswith("#")))
d = {{k: [float(r[k]) for r in rows] for k in rows[0]}}

fig, ax = plt.subplots()
ax.plot(d["omega"], d["S_plus"], label="S (theta = {theta})")
{approx}ax.axhline(1.0, color="gray", lw=0.8)
ax.set_xlabel("omega")
ax.set_ylabel("S")
ax.legend()
fig.savefig({png:?}, dpi=150)
"##,
        path = csv.display().to_string(),
        png = csv.with_extension("png").display().to_string(),
    )
}

pub fn sweep_script(csv: &Path, log_x: bool) -> String {
    let scale = if log_x { "ax.set_xscale(\"log\")\n" } else { "" };
    format!(
        r##"import csv
import matplotlib.pyplot as plt

with open({path:?}) as f:
    rows = list(csv.DictReader(line for line in f if not line.startswith("#")))
x = [float(r["kappa_or_N"]) for r in rows]
y = [float(r["S_min"]) for r in rows]

fig, ax = plt.subplots()
ax.plot(x, y, "o-")
{scale}ax.axhline(1.0, color="gray", lw=0.8)
ax.set_xlabel("kappa" if {kappa} else "N")
ax.set_ylabel("S_min")
fig.savefig({png:?}, dpi=150)
"##,
        path = csv.display().to_string(),
        png = csv.with_extension("png").display().to_string(),
        kappa = if log_x { "False" } else { "True" },
    )
}

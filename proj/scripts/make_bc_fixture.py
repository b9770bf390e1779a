#!/usr/bin/env python3
"""Build data/bc.csv from the flexsurv package's breast-cancer table.

The dataset is the German Breast Cancer Study Group sample (686 patients,
primary node positive) shipped as `bc` in the R package flexsurv on CRAN.
It is not vendored here; export it once and run this script.

Export from R:

    install.packages("flexsurv")   # CRAN
    data(bc, package = "flexsurv")
    write.table(bc, "bc.txt")

or grab data/bc.txt from a flexsurv source tarball. Then:

    python3 scripts/make_bc_fixture.py bc.txt data/bc.csv

Columns produced: time (recurrence-free survival in years, rectime/365),
status (censrec; 1 = recurrence), x_group and z_group (prognostic group:
Good=1, Medium=2, Poor=3) — the layout the paper's application uses.
"""

import csv
import shlex
import sys

GROUPS = {"Good": 1, "Medium": 2, "Poor": 3}


def main() -> None:
    if len(sys.argv) != 3:
        sys.exit(f"usage: {sys.argv[0]} <bc.txt from flexsurv> <out.csv>")
    src, dst = sys.argv[1], sys.argv[2]

    with open(src, encoding="utf-8") as fh:
        header = shlex.split(fh.readline())
        if header[-3:] != ["censrec", "rectime", "group"]:
            sys.exit(f"{src}: expected columns censrec rectime group, got {header}")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            tok = shlex.split(line)
            if len(tok) != 4:  # row name + three values
                sys.exit(f"{src}:{lineno}: expected 4 fields, got {len(tok)}")
            _, censrec, rectime, group = tok
            if group not in GROUPS:
                sys.exit(f"{src}:{lineno}: unknown prognostic group {group!r}")
            years = float(rectime) / 365.0
            if years <= 0:
                sys.exit(f"{src}:{lineno}: nonpositive recurrence time")
            rows.append((years, int(censrec), GROUPS[group]))

    if len(rows) != 686:
        sys.exit(f"{src}: expected 686 patients, got {len(rows)}")

    with open(dst, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["time", "status", "x_group", "z_group"])
        for years, status, group in rows:
            out.writerow([repr(years), status, group, group])
    print(f"{dst}: {len(rows)} rows")


if __name__ == "__main__":
    main()

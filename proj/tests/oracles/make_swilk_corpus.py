"""Regenerates tests/data/swilk_series.csv and tests/data/swilk_reference.csv.

scipy.stats.shapiro wraps the Fortran swilk routine, which serves as the
independent reference for the C++ implementation.
"""
import csv
import pathlib

import numpy as np
from scipy import stats

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"
SIZES = (10, 50, 200, 500)
DRAWS = (
    ("normal", lambda rng, n: rng.normal(3.0, 2.0, n)),
    ("uniform", lambda rng, n: rng.uniform(-1.0, 1.0, n)),
    ("exponential", lambda rng, n: rng.exponential(1.5, n)),
    ("student_t5", lambda rng, n: rng.standard_t(5, n)),
    ("mixture", lambda rng, n: np.where(rng.uniform(size=n) < 0.7, rng.normal(145.0, 14.0, n), rng.normal(230.0, 38.0, n))),
)


def main():
    rng = np.random.default_rng(20240611)
    series_rows, ref_rows = [], []
    sid = 0
    for n in SIZES:
        for name, draw in DRAWS:
            x = draw(rng, n)
            w, p = stats.shapiro(x)
            ref_rows.append((sid, name, n, repr(float(w)), repr(float(p))))
            series_rows.extend((sid, i, repr(float(v))) for i, v in enumerate(x))
            sid += 1
    with open(OUT / "swilk_series.csv", "w", newline="") as f:
        out = csv.writer(f)
        out.writerow(("series", "index", "value"))
        out.writerows(series_rows)
    with open(OUT / "swilk_reference.csv", "w", newline="") as f:
        out = csv.writer(f)
        out.writerow(("series", "distribution", "n", "w", "p"))
        out.writerows(ref_rows)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Regenerate the brute-force threshold fixture used by the acceptance suite.

Scans the erasure probability in steps of 1e-4 around each threshold and
records the last grid point on the convergent (resp. non-negative-potential)
side and the first on the other side. The scan is deliberately independent
of the bisection routines it cross-checks.

Usage: python scripts/gen_threshold_fixtures.py [--out tests/fixtures/thresholds.json]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from scwde.scalar import UncoupledEnsemble, ZERO_LIMIT, de_run, potential

STEP = 1e-4


def scan_bp(ens: UncoupledEnsemble, lo: float, hi: float) -> dict:
    last_pass = first_fail = None
    eps = lo
    while eps <= hi + 1e-12:
        ok = de_run(eps, ens).limit < ZERO_LIMIT
        if ok:
            last_pass = eps
        elif first_fail is None:
            first_fail = eps
        eps = round(eps + STEP, 10)
    return {"last_converges": last_pass, "first_diverges": first_fail, "step": STEP}


def scan_map(ens: UncoupledEnsemble, lo: float, hi: float) -> dict:
    last_nonneg = first_neg = None
    eps = lo
    while eps <= hi + 1e-12:
        limit = de_run(eps, ens).limit
        u = 0.0 if limit < ZERO_LIMIT else potential(limit, eps, ens)
        if u >= 0.0:
            last_nonneg = eps
        elif first_neg is None:
            first_neg = eps
        eps = round(eps + STEP, 10)
    return {"last_nonnegative": last_nonneg, "first_negative": first_neg, "step": STEP}


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parents[1] / "tests/fixtures/thresholds.json",
    )
    args = parser.parse_args()
    fixture = {}
    for label, ens, bp_lo, bp_hi, map_lo, map_hi in (
        ("x3_x6", UncoupledEnsemble.regular(3, 6), 0.425, 0.434, 0.484, 0.493),
        ("x4_x8", UncoupledEnsemble.regular(4, 8), 0.379, 0.388, 0.493, 0.502),
    ):
        fixture[label] = {
            "bp": scan_bp(ens, bp_lo, bp_hi),
            "map": scan_map(ens, map_lo, map_hi),
        }
        print(label, fixture[label])
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(fixture, indent=2) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

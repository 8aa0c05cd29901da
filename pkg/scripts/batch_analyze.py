"""Profile every equation file in a directory and print a one-line summary for each"""
import glob
import os
import sys
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from loguru import logger

from src.equation_io import load_equation
from src.errors import GrowthError
from src.newton_polygon import growth_profile, hull_crosscheck
from src.recurrence import build_system

DEFAULT_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "equations")


def summarize(path):
    eq = load_equation(path)
    profile = growth_profile(eq)
    rs = build_system(eq)
    ok, _ = hull_crosscheck(eq, rs)
    return {
        "file": os.path.basename(path),
        "m": eq.m,
        "d": eq.d,
        "s": profile.sseq.indices,
        "orders": [str(e.rho) for e in profile],
        "types": [e.type.decimal(8) for e in profile],
        "resonances": list(rs.resonances),
        "hull": "OK" if ok else "FAILED",
    }


def batch_analyze(directory=DEFAULT_DIR):
    paths = sorted(glob.glob(os.path.join(directory, "*.json")) + glob.glob(os.path.join(directory, "*.y*ml")))

    print('=' * 80)
    print(f'EQUATION SURVEY ({len(paths)} files in {directory})')
    print('=' * 80)

    failures = 0
    for path in paths:
        try:
            row = summarize(path)
        except GrowthError as e:
            failures += 1
            print(f"  {os.path.basename(path):32} ERROR  {e}")
            continue
        orders = ", ".join(f"rho={r} L={t}" for r, t in zip(row['orders'], row['types'])) or "no order < 1"
        if row["hull"] == "FAILED":
            failures += 1
        print(f"  {row['file']:32} m={row['m']} d={row['d']} s={row['s']}  hull {row['hull']}")
        print(f"  {'':32} {orders}")
        if row['resonances']:
            print(f"  {'':32} resonances at n = {row['resonances']}")

    print()
    print(f'Done: {len(paths) - failures} analyzed, {failures} failed')
    return failures


if __name__ == "__main__":
    logger.remove()
    logger.add(sys.stderr, level="WARNING")
    target = sys.argv[1] if len(sys.argv) > 1 else DEFAULT_DIR
    sys.exit(1 if batch_analyze(target) else 0)

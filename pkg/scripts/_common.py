"""Shared bits for the sweep scripts: argument parsing and CSV output."""
import argparse
import csv
from pathlib import Path


def parser(description: str, trials: int = 1_000_000) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--out", default="results", help="output directory")
    ap.add_argument("--trials", type=int, default=trials, help="Monte Carlo trials per point (0 skips MC)")
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--workers", type=int, default=4)
    return ap


def write(out_dir: str, name: str, header, rows) -> Path:
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return path

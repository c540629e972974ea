"""Recompute the reference tables and write them next to the shipped fixtures.

Output goes to ``--out-dir`` (default ``regenerated/``) as ``<table>.csv`` and
``<table>.json``; the fixtures under ``atdm/data`` are never touched.
"""
import argparse
import os
import time
from pathlib import Path

from atdm import benchmarks as bm


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("tables", nargs="*", default=list(bm.TABLE_IDS))
    ap.add_argument("--out-dir", default="regenerated")
    ap.add_argument("--workers", type=int, default=int(os.environ.get("ATDM_THREADS", 1)))
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for table_id in args.tables:
        t0 = time.perf_counter()
        table = bm.regenerate(table_id, workers=args.workers)
        (out / f"{table_id}.csv").write_text(bm.to_csv(table))
        (out / f"{table_id}.json").write_text(bm.to_json(table))
        n = len(table.rows) or len(table.l2_rows)
        print(f"{table_id}: {n} rows in {time.perf_counter() - t0:.1f} s -> {out}")


if __name__ == "__main__":
    main()

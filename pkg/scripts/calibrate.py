"""Scan truncation orders against each point table's beta = 1 column and
identify which beta the column labelled 0.99 was computed at."""
import argparse

from atdm import benchmarks as bm


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=12)
    ap.add_argument("--candidates", type=float, nargs="+", default=[0.9, 0.95, 0.99])
    args = ap.parse_args()

    for table_id, bid in bm.POINT_TABLES.items():
        b = bm.BENCHMARKS[bid]
        cal = bm.calibrate_N(b, bm.reference_ae(table_id, "ae_beta_1"),
                             n_range=range(2, args.max_n + 1))
        print(f"{table_id} ({bid}): N={cal.N}, beta=1 deviation {cal.deviation:.2e}")
        print("   scan: " + " ".join(f"{N}:{d:.1e}" for N, d in cal.scan.items()))
        for var in ("u", "v"):
            refs = [(t, ae) for v, t, ae in bm.reference_ae(table_id, "ae_beta_0.99") if v == var]
            beta, dev = bm.best_beta_for_column(b, cal.N, var, refs, args.candidates)
            print(f"   column '0.99' ({var}) best matched by beta={beta} (deviation {dev:.1e})")


if __name__ == "__main__":
    main()

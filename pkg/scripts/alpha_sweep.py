"""Outage and delay-limited throughput against the harvesting time fraction."""
import numpy as np

from _common import parser, write
from ehnoma import McConfig, SystemParams, mc_throughput, outage, throughput


def main():
    ap = parser(__doc__, trials=200_000)
    ap.add_argument("--rho-db", type=float, default=20.0)
    args = ap.parse_args()
    mc = McConfig(n_trials=args.trials, seed=args.seed, workers=args.workers) if args.trials else None
    rows = []
    for alpha in np.round(np.arange(0.05, 0.951, 0.025), 3):
        p = SystemParams(alpha=alpha).with_rho_db(args.rho_db)
        sim = mc_throughput(p, None, mc) if mc else None
        rows.append([alpha, repr(outage(p, 1)), repr(outage(p, 2)), repr(throughput(p)),
                     repr(sim.mean) if sim else ""])
    write(args.out, "alpha_sweep.csv", ["alpha", "outage_u1", "outage_u2", "throughput", "throughput_mc"], rows)


if __name__ == "__main__":
    main()

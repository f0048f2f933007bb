"""Ergodic rates and sum rate against SNR, analytic (both methods) and simulated."""
import numpy as np

from _common import parser, write
from ehnoma import McConfig, SystemParams, ergodic_rate, mc_rates


def main():
    args = parser(__doc__).parse_args()
    mc = McConfig(n_trials=args.trials, seed=args.seed, workers=args.workers) if args.trials else None
    rows = []
    for rho_db in np.arange(0.0, 50.5, 5.0):
        p = SystemParams().with_rho_db(rho_db)
        for csi in ("imperfect", "perfect"):
            sims = mc_rates(p, mc, csi) if mc else (None, None)
            for user, est in zip((1, 2), sims):
                rows.append([rho_db, csi, user, repr(ergodic_rate(p, user, csi)),
                             repr(ergodic_rate(p, user, csi, "destination")),
                             repr(est.mean) if est else "", repr(est.half_width) if est else ""])
    write(args.out, "rates_vs_snr.csv",
          ["rho_db", "csi", "user", "exact", "destination", "montecarlo", "mc_ci"], rows)


if __name__ == "__main__":
    main()

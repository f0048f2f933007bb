"""Outage of both users against transmit SNR for two relay counts and both CSI modes."""
import numpy as np

from _common import parser, write
from ehnoma import McConfig, SystemParams, derive_thresholds, mc_outage, outage, outage_asymptotic

TAG = {"imperfect": "icsi", "perfect": "perfect"}


def main():
    ap = parser(__doc__)
    ap.add_argument("--relays", default="2,5")
    args = ap.parse_args()
    mc = McConfig(n_trials=args.trials, seed=args.seed, workers=args.workers) if args.trials else None
    rows = []
    for K in (int(k) for k in args.relays.split(",")):
        for rho_db in np.arange(0.0, 60.5, 2.5):
            p = SystemParams(K=K).with_rho_db(rho_db)
            th = derive_thresholds(p)
            for csi in ("imperfect", "perfect"):
                sims = mc_outage(p, th, mc, csi) if mc else (None, None)
                for user, est in zip((1, 2), sims):
                    asy = outage_asymptotic(p, None, f"u{user}_{TAG[csi]}")
                    rows.append([K, rho_db, csi, user, repr(outage(p, user, csi)), repr(asy),
                                 repr(est.mean) if est else "", repr(est.half_width) if est else ""])
    write(args.out, "outage_vs_snr.csv",
          ["K", "rho_db", "csi", "user", "analytic", "asymptotic", "montecarlo", "mc_ci"], rows)


if __name__ == "__main__":
    main()

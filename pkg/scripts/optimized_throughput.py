"""Throughput with the swarm-optimised time fraction against a fixed one."""
import numpy as np

from _common import parser, write
from ehnoma import PsoConfig, SystemParams, pso_optimize_alpha, throughput


def main():
    ap = parser(__doc__)
    ap.add_argument("--fixed-alpha", type=float, default=0.3)
    args = ap.parse_args()
    rows = []
    for rho_db in np.arange(0.0, 40.5, 2.5):
        for csi in ("imperfect", "perfect"):
            p = SystemParams().with_rho_db(rho_db)
            res = pso_optimize_alpha(p, "analytic", PsoConfig(seed=args.seed), csi)
            fixed = throughput(p.replace(alpha=args.fixed_alpha), csi)
            rows.append([rho_db, csi, repr(res.best_alpha), repr(res.best_objective), repr(fixed)])
    write(args.out, "optimized_throughput.csv",
          ["rho_db", "csi", "best_alpha", "optimized_throughput", "fixed_alpha_throughput"], rows)


if __name__ == "__main__":
    main()

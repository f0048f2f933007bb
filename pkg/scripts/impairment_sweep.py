"""Outage against SNR for several channel-estimation error and residual-SIC levels."""
import numpy as np

from _common import parser, write
from ehnoma import SystemParams, outage


def main():
    args = parser(__doc__).parse_args()
    rows = []
    for sigma_e2 in (0.0, 0.01, 0.05):
        for beta in (0.0, 0.05, 0.1):
            for rho_db in np.arange(0.0, 50.5, 2.5):
                p = SystemParams(sigma_e2=sigma_e2, beta=beta).with_rho_db(rho_db)
                rows.append([sigma_e2, beta, rho_db, repr(outage(p, 1)), repr(outage(p, 2))])
    write(args.out, "impairment_sweep.csv", ["sigma_e2", "beta", "rho_db", "outage_u1", "outage_u2"], rows)


if __name__ == "__main__":
    main()

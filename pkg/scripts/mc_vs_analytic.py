"""Tabulate Monte Carlo against the analytic BER for one scenario.

    python3 scripts/mc_vs_analytic.py --preset fig1b --snr 8 12 16 30 --symbols 10000000
"""

import argparse
import sys

from eepnber.ber import BerMode, BerModelConfig, ber_mpsk
from eepnber.core import noise_budget, snr_db_to_linear
from eepnber.montecarlo import McConfig, simulate
from eepnber.scenario import load_preset, load_scenario


def run():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset")
    src.add_argument("--scenario")
    p.add_argument("--snr", type=float, nargs="+", required=True, metavar="DB")
    p.add_argument("--symbols", type=int, default=10_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--process", choices=["increment_matched", "iid"], default="increment_matched")
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()

    sc = load_preset(args.preset) if args.preset else load_scenario(args.scenario)
    b = noise_budget(sc.link, sc.lasers, sc.mod)
    mc = McConfig(n_symbols=args.symbols, seed=args.seed, eepn_process=args.process, n_workers=args.workers)
    printed = BerModelConfig(mode=BerMode.AS_PRINTED)
    print("snr_db,ber_folded,ber_printed,ber_mc,ci_low,ci_high,bit_errors,mc_over_folded")
    for db in args.snr:
        snr = snr_db_to_linear(db)
        folded = ber_mpsk(snr, sc.mod.level, b.sigma_total, sc.model).ber
        plain = ber_mpsk(snr, sc.mod.level, b.sigma_total, printed).ber
        r = simulate(sc.link, sc.lasers, sc.mod, b, snr, mc)
        ratio = r.ber_hat / folded if folded > 0 else float("nan")
        print(f"{db:g},{folded:.6e},{plain:.6e},{r.ber_hat:.6e},{r.ci95_low:.6e},{r.ci95_high:.6e},"
              f"{r.bit_errors},{ratio:.4f}", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(run())

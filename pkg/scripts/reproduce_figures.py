"""Write one CSV per figure preset (analytic curves plus floors).

    python3 scripts/reproduce_figures.py --out figures/ [--mode as-printed]
"""

import argparse
import sys
from pathlib import Path

from eepnber.cli import main
from eepnber.scenario import PRESET_NAMES


def run():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out", type=Path, default=Path("figures"))
    p.add_argument("--mode", choices=["as-printed", "offset-folded"], default="offset-folded")
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name in PRESET_NAMES:
        csv_path = args.out / f"{name}.csv"
        with csv_path.open("w") as fh:
            code = main(["preset", name, "--mode", args.mode, "--gnuplot", str(args.out / f"{name}.gp")], out=fh)
        if code:
            return code
        print(f"wrote {csv_path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(run())

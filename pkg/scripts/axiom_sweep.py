#!/usr/bin/env python3
"""Time every verification sweep across a range of bounds.

    python3 scripts/axiom_sweep.py --instance fin-surj --max-bound 4
    PITA_THREADS=4 python3 scripts/axiom_sweep.py --instance fin --max-bound 4

Useful for picking CLI defaults: the axiom sweep grows by roughly two
orders of magnitude per bound step on the full map instance, so the
table makes it obvious where the desk-scale ceiling sits.
"""

import argparse
import time

from pita.decomp import verify_decomposition_fibres
from pita.factorisation import verify_eta_identities
from pita.instances import make_instance
from pita.nerve import (
    verify_beta_coherence,
    verify_opfibration,
    verify_strict_identities,
)
from pita.opcat import verify_axioms


def _timed(fn, *args):
    start = time.monotonic()
    rep = fn(*args)
    return rep, time.monotonic() - start


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--instance", default="fin-surj", choices=("fin", "fin-surj", "op")
    )
    parser.add_argument("--max-bound", type=int, default=3)
    parser.add_argument("--maxlen", type=int, default=4)
    args = parser.parse_args(argv)
    if args.max_bound < 1 or args.maxlen < 1:
        parser.error("bounds must be at least 1")

    inst = make_instance(args.instance)
    failures = 0
    for bound in range(1, args.max_bound + 1):
        print(f"-- bound {bound}")
        sweeps = [
            (verify_axioms, (inst, bound)),
            (verify_eta_identities, (inst, bound)),
            (verify_strict_identities, (inst, bound, args.maxlen)),
            (verify_beta_coherence, (inst, bound)),
            (verify_opfibration, (inst, 2, bound)),
        ]
        if inst.name == "fin-surj":
            sweeps.append((verify_decomposition_fibres, (inst, bound)))
        for fn, fnargs in sweeps:
            rep, elapsed = _timed(fn, *fnargs)
            print(f"   {rep.summary()}   {elapsed:6.2f} s")
            failures += not rep.ok
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())

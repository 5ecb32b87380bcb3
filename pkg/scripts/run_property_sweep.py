"""
Property sweep over randomized small instances.

Runs the cross-checks between independent computations (registries against
coloured sums, frame matroids against direct rank counts, amalgam case
analysis against the amalgam rank formula) and stores every outcome in the
check ledger.
"""

import argparse
import logging
import os
import random
import sys
import time

# Add project root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.backend.coloured.analysis import all_systems
from src.backend.coloured.registry import registry, sympathetic
from src.backend.coloured.systems import coloured_sum
from src.backend.graphs.gain import gain_frame_matroid, switch_normalize
from src.backend.logic.formula import Count, Exists, Hyp, Subset
from src.backend.logic.semantics import lambda_bound, satisfies
from src.backend.matroids.matroid import Matroid, dependence_cases, proper_amalgam, validate_matroid
from src.backend.utils.sampling import (
    random_amalgam_pair,
    random_assignment,
    random_complement,
    random_formula,
    random_gaining,
    random_switching,
    random_system,
)
from src.database.ledger_manager import get_ledger_manager

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s [%(levelname)s] %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)

logger = logging.getLogger(__name__)


# ==================== PROPERTIES ====================
# each returns None when the instance passes, otherwise a description of it

def registry_satisfaction(rng: random.Random):
    colours = tuple(f"c{i}" for i in range(1, rng.randint(1, 3) + 1))
    m = random_system(rng, [f"u{i}" for i in range(1, rng.randint(0, 3) + 1)], colours)
    pi = random_complement(rng, [f"w{i}" for i in range(1, rng.randint(0, 3) + 1)], colours)
    delta = rng.randint(1, 2)
    f = random_formula(rng, max_nodes=5, variables=2, delta=delta)
    sigma = random_assignment(rng, sorted(f.free), m.size)
    tau = random_assignment(rng, sorted(f.free), pi.size)
    r = registry(m, f, sigma, f.var, delta)
    theta = {i: sigma[i] | (tau[i] << m.size) for i in f.free}
    if sympathetic(r, f, pi, tau) != satisfies(coloured_sum(m, pi), f, theta):
        return f"{f.render()} on |U|={m.size}, |V|={pi.size}, sigma={sigma}, tau={tau}"
    return None


def frame_soundness(rng: random.Random):
    g = random_gaining(rng)
    m = gain_frame_matroid(g)
    if not isinstance(validate_matroid(m), Matroid):
        return f"frame matroid of {g!r} fails the axioms"
    expected = len(g.graph.vertices_of(g.graph.full_mask)) - g.balanced_components()
    if m.rank() != expected or m.rank() != g.frame_rank():
        return f"rank {m.rank()} != {expected} for {g!r}"
    switched = gain_frame_matroid(switch_normalize(g, random_switching(rng, g)))
    if switched != m:
        return f"switching changed the frame matroid of {g!r}"
    return None


def long_line_law(rng: random.Random):
    g = random_gaining(rng)
    m = gain_frame_matroid(g)
    lines = m.long_lines()
    for i, x in enumerate(m.ground):
        hits = sum(1 for line in lines if line >> i & 1)
        if hits >= 2 and not g.graph.edge(x).is_loop:
            return f"{x} lies on {hits} long lines of {g!r} but is not a loop"
    return None


def amalgam_cases(rng: random.Random):
    m1, m2 = random_amalgam_pair(rng)
    amalgam = proper_amalgam(m1, m2)
    for X in range(amalgam.full_mask + 1):
        labels = amalgam.labels(X)
        verdict = dependence_cases(m1, m2, labels)
        if verdict.dependent == bool(amalgam.table[X]):
            return f"{labels}: case {verdict.case} disagrees with the amalgam"
    return None


SENTENCES = (
    Exists(1, Hyp(1)),
    Exists(1, Count(1, 1, 2)),
    Exists(1, Subset(1, 1)),
)


def registry_count(_rng: random.Random):
    """Exhaustive over |U| <= 2, two colours; ignores the RNG."""
    colours = ("c1", "c2")
    for f in SENTENCES:
        delta = f.min_delta
        bound = lambda_bound(f, len(f.var), len(colours), delta)
        values = set()
        for size in range(3):
            for m in all_systems([f"u{i}" for i in range(1, size + 1)], colours):
                values.add(registry(m, f, {}, f.var, delta))
        if len(values) > bound:
            return f"{f.render()}: {len(values)} registries above the bound {bound}"
    return None


PROPERTIES = {
    "registry_satisfaction": (registry_satisfaction, 500),
    "registry_count": (registry_count, 1),
    "amalgam_cases": (amalgam_cases, 200),
    "frame_soundness": (frame_soundness, 500),
    "long_line_law": (long_line_law, 500),
}


def sweep(name: str, instances: int, seed: int):
    check, _ = PROPERTIES[name]
    rng = random.Random(seed)
    failures = []
    started = time.perf_counter()
    for _ in range(instances):
        outcome = check(rng)
        if outcome is not None:
            failures.append(outcome)
    return failures, time.perf_counter() - started


def main():
    parser = argparse.ArgumentParser(description="Randomized property sweep")
    parser.add_argument("--property", choices=sorted(PROPERTIES) + ["all"], default="all")
    parser.add_argument("--instances", type=int, help="override the per-property instance count")
    parser.add_argument("--seed", type=int, default=20240601)
    parser.add_argument("--no-ledger", action="store_true", help="print only, do not record")
    args = parser.parse_args()

    names = sorted(PROPERTIES) if args.property == "all" else [args.property]
    ledger = None if args.no_ledger else get_ledger_manager()
    failed = 0
    for name in names:
        instances = args.instances or PROPERTIES[name][1]
        failures, elapsed = sweep(name, instances, args.seed)
        print(f"{name}: {instances} instances, {len(failures)} counterexamples, {elapsed:.1f}s")
        for line in failures[:3]:
            print(f"  {line}")
        if ledger is not None:
            ledger.record_sweep(name, instances, len(failures), args.seed, elapsed, failures[0] if failures else None)
        failed += bool(failures)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

"""Per-sample verification rows for the ``verify`` command.

Every row is a pure function of its sample seed, so sweeps can be split
across processes and merged back in seed order.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .entanglement import eof_two_qubit
from .entropy import von_neumann_entropy
from .measurement import classical_correlation
from .monogamy import strictness_row, tradeoff_pure, tripartite_inequality
from .monogamy import _random_two_qubit, near_pure_two_qubit
from .states import Partition, purify, random_density, random_pure

COLUMNS = {
    "tradeoff": ["seed", "s_b", "discord_ab", "classical_eb", "defect", "spread_d", "spread_j"],
    "kw": ["seed", "s_a", "eof_ae", "classical_ab", "defect", "spread_j"],
    "inequality": ["seed", "s_b", "discord_ab", "classical_cb", "slack", "spread_d", "spread_j"],
    "strictness": ["seed", "s_a", "s_b", "discord_ab", "discord_ba", "gap_b", "gap_a", "spread"],
}

DEFAULT_DIMS = {"tradeoff": (2, 2, 2), "kw": (2, 2), "inequality": (2, 2, 2), "strictness": (2, 2)}


class UnsupportedDims(ValueError):
    pass


def check_dims(which, dims):
    dims = tuple(dims) if dims else DEFAULT_DIMS[which]
    if which in ("kw", "strictness") and dims != (2, 2):
        raise UnsupportedDims(f"verify {which} needs dims 2,2")
    if which in ("tradeoff", "inequality"):
        if len(dims) != 3:
            raise UnsupportedDims(f"verify {which} needs three factors")
        if dims[1] > 4:
            raise UnsupportedDims("measured factor B must have dimension <= 4")
        if which == "tradeoff" and dims[1] > 2:
            raise UnsupportedDims("verify tradeoff supports a qubit B only")
    return dims


def tradeoff_row(seed, cfg, dims=(2, 2, 2), **_):
    psi = random_pure(dims, seed)
    rep = tradeoff_pure(psi, Partition.standard(3, "ABE"), replace(cfg, seed=seed))
    return {
        "seed": seed,
        "s_b": rep.s_b,
        "discord_ab": rep.discord_ab,
        "classical_eb": rep.classical_eb,
        "defect": rep.defect,
        "spread_d": rep.spread_d,
        "spread_j": rep.spread_j,
    }


def kw_row(seed, cfg, rank=2, **_):
    """``E_F(A:E)`` by concurrence plus ``J(A|B)`` by the optimizer, against ``S(A)``."""
    rho = random_density((2, 2), rank, seed)
    psi = purify(rho)
    if psi.dims[2] != 2:
        raise UnsupportedDims("Koashi-Winter check needs a qubit environment (rank 2)")
    rho_ae = psi.ptrace([0, 2])
    eof = eof_two_qubit(rho_ae).value
    j = classical_correlation(rho, None, "A", "B", replace(cfg, seed=seed))
    s_a = von_neumann_entropy(rho.ptrace([0]), check=False)
    return {
        "seed": seed,
        "s_a": s_a,
        "eof_ae": eof,
        "classical_ab": j.value,
        "defect": eof + j.value - s_a,
        "spread_j": j.spread,
    }


def inequality_row(seed, cfg, dims=(2, 2, 2), rank=2, **_):
    if rank == 1:
        rho = random_pure(dims, seed).density()
    else:
        rho = random_density(dims, rank, seed)
    rep = tripartite_inequality(rho, Partition.standard(3, "ABC"), replace(cfg, seed=seed))
    return {
        "seed": seed,
        "s_b": rep.s_b,
        "discord_ab": rep.discord_ab,
        "classical_cb": rep.classical_cb,
        "slack": rep.slack,
        "spread_d": rep.spread_d,
        "spread_j": rep.spread_j,
    }


def strictness_sample(seed, cfg, ensemble="full_rank", near_pure_eps=1e-3, **_):
    if ensemble == "near_pure":
        rho = near_pure_two_qubit(seed, near_pure_eps)
    else:
        rho = _random_two_qubit(seed)
        if rho.rank() < 4:
            return None
    return strictness_row(rho, seed, replace(cfg, seed=seed))


ROW_FUNCS = {
    "tradeoff": tradeoff_row,
    "kw": kw_row,
    "inequality": inequality_row,
    "strictness": strictness_sample,
}


def _call(args):
    which, seed, cfg, kwargs = args
    return ROW_FUNCS[which](seed, cfg, **kwargs)


def run_sweep(which, n, seed, cfg, jobs=1, **kwargs):
    """Rows for samples ``seed, seed+1, ..., seed+n-1`` in seed order."""
    tasks = [(which, seed + i, cfg, kwargs) for i in range(n)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_call, tasks))
    else:
        rows = [_call(t) for t in tasks]
    return [r for r in rows if r is not None]


def summarize(which, rows, tol):
    """Summary statistics and the pass/fail flag for a sweep."""
    out = {"samples": len(rows), "tolerance": tol}
    if not rows:
        out["passed"] = True
        return out
    if which in ("tradeoff", "kw"):
        worst = max(abs(r["defect"]) for r in rows)
        out["max_abs_defect"] = worst
        out["passed"] = worst <= tol
    elif which == "inequality":
        least = min(r["slack"] for r in rows)
        out["min_slack"] = least
        out["passed"] = least >= -tol
    else:
        gaps_b = [r["gap_b"] for r in rows]
        gaps_a = [r["gap_a"] for r in rows]
        out["min_gap_b"] = min(gaps_b)
        out["min_gap_a"] = min(gaps_a)
        out["flagged"] = [r["seed"] for r in rows if min(r["gap_a"], r["gap_b"]) < 1e-4]
        counts, edges = np.histogram(np.minimum(gaps_a, gaps_b), bins=10)
        out["histogram"] = {"counts": counts.tolist(), "edges": edges.tolist()}
        out["passed"] = min(out["min_gap_b"], out["min_gap_a"]) > 0
    spreads = [v for r in rows for k, v in r.items() if k.startswith("spread")]
    out["max_spread"] = max(spreads) if spreads else 0.0
    return out

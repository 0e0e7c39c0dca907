"""``qcorr`` command line: analyze, structure, verify, make-example.

Exit codes: 0 success, 1 verification failure, 2 parse error, 3 invalid state.
"""

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__, kernels
from .entanglement import eof_two_qubit
from .entropy import entropy_report
from .io import StateFileError, matrix_to_pairs, read_state, state_to_dict, write_state
from .linalg import DimensionError
from .measurement import OptimizerConfig, classical_correlation, quantum_discord
from .monogamy import TOL_SAT, StructureError, classify_saturation, structure_extract
from .states import (
    DensityMatrix,
    InvalidStateError,
    Partition,
    bell_state,
    constructed_saturating_state,
    paper_example_state,
    subsystem,
)
from .sweeps import COLUMNS, UnsupportedDims, check_dims, run_sweep, summarize

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_INVALID = 0, 1, 2, 3

log = logging.getLogger("qcorr")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# -- partitions -----------------------------------------------------------------


def parse_partition(spec, n_factors):
    """``"1,2|3"`` -> A = factors 1 and 2, B = factor 3 (1-based)."""
    if not spec:
        return Partition.standard(n_factors)
    groups = []
    for chunk in spec.split("|"):
        try:
            groups.append(tuple(int(tok) - 1 for tok in chunk.split(",") if tok.strip()))
        except ValueError as exc:
            raise CliError(f"bad partition spec {spec!r}", EXIT_PARSE) from exc
    labels = "ABCDEFGH"[: len(groups)]
    try:
        part = Partition(tuple(labels), tuple(groups))
        if part.n_factors != n_factors:
            raise ValueError(f"partition covers {part.n_factors} of {n_factors} factors")
    except ValueError as exc:
        raise CliError(f"bad partition spec {spec!r}: {exc}", EXIT_PARSE) from exc
    return part


def format_partition(part):
    return "|".join(",".join(str(i + 1) for i in g) for g in part.groups)


def resolve_label(token, part):
    if token is None:
        return "B"
    if token.isdigit():
        idx = int(token) - 1
        if not 0 <= idx < len(part.labels):
            raise CliError(f"--measure {token} out of range", EXIT_PARSE)
        return part.labels[idx]
    if token not in part.labels:
        raise CliError(f"--measure {token!r} is not one of {part.labels}", EXIT_PARSE)
    return token


def optimizer_config(args):
    return OptimizerConfig(
        restarts=args.opt_restarts,
        max_iter=args.opt_max_iter,
        tol=args.opt_tol,
        seed=args.seed,
        mode="povm" if getattr(args, "povm", False) else "projective",
        structure_shortcut=not getattr(args, "no_shortcut", False),
    )


def load(path):
    try:
        return read_state(path)
    except StateFileError as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc
    except InvalidStateError as exc:
        raise CliError(f"invalid state: {exc}", EXIT_INVALID) from exc
    except DimensionError as exc:
        raise CliError(f"invalid state: {exc}", EXIT_INVALID) from exc


# -- output ------------------------------------------------------------------------


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def render_text(doc, indent=0):
    lines = []
    pad = "  " * indent
    for key, value in doc.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(render_text(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], list):
            lines.append(f"{pad}{key}: <matrix {len(value)}x{len(value[0])}>")
        else:
            lines.append(f"{pad}{key}: {_fmt(value) if not isinstance(value, list) else value}")
    return lines


def emit(doc, as_json, out=None):
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write("\n".join(render_text(doc)) + "\n")


def header(args):
    return {"tool": "qcorr", "version": __version__, "kernel": kernels.BACKEND, "seed": args.seed}


# -- commands ------------------------------------------------------------------


def _correlations(ab, unmeasured, measured, cfg, warnings):
    key = f"{unmeasured}|{measured}"
    if ab.dims[1] > 4:
        warnings.append(f"measured factor {measured} exceeds dimension 4; J/D({key}) skipped")
        return {}
    d = quantum_discord(ab, None, "A", "B", cfg)
    if d.method == "structure":
        mi = entropy_report(ab).mutual_information
        j = {"value": mi - d.value, "spread": 0.0, "method": "structure"}
    else:
        j = classical_correlation(ab, None, "A", "B", cfg).as_dict()
    if not d.consistent:
        warnings.append(f"restart consistency not met for {key} (spread {d.spread:.2e})")
    return {f"J({key})": j, f"D({key})": d.as_dict()}


def cmd_analyze(args):
    rho = load(args.path)
    part = parse_partition(args.partition, len(rho.dims))
    if len(part.labels) != 2:
        raise CliError("analyze needs a bipartition (use --partition)", EXIT_PARSE)
    measured = resolve_label(args.measure, part)
    unmeasured = [lab for lab in part.labels if lab != measured][0]
    cfg = optimizer_config(args)
    t0 = time.perf_counter()
    ab = subsystem(rho, part, ["A", "B"])
    ent = entropy_report(ab)
    warnings = []
    doc = header(args)
    doc["state"] = {"label": rho.label, "dims": list(rho.dims), "partition": format_partition(part)}
    doc["entropies"] = ent.as_dict()
    doc["measured"] = measured
    doc["correlations"] = {}
    pairs = [(unmeasured, measured)]
    if args.both:
        pairs.append((measured, unmeasured))
    for u, m in pairs:
        pair = subsystem(rho, part, [u, m])
        doc["correlations"].update(_correlations(pair, u, m, cfg, warnings))
    if args.compare_povm:
        povm_cfg = replace(cfg, mode="povm")
        for u, m in pairs:
            pair = subsystem(rho, part, [u, m])
            if pair.dims[1] <= 2:
                j = classical_correlation(pair, None, "A", "B", povm_cfg)
                doc["correlations"][f"J_povm({u}|{m})"] = j.as_dict()
    if tuple(ab.dims) == (2, 2):
        doc["eof"] = eof_two_qubit(ab).as_dict()
    verdict = classify_saturation(ab, tol_sat=args.tol_sat)
    doc["verdict"] = verdict.as_dict()
    doc["warnings"] = warnings
    doc["elapsed_s"] = time.perf_counter() - t0
    emit(doc, args.json)
    return EXIT_OK


def witness_doc(witness):
    rho_l = witness.rho_l
    phi = witness.phi
    return {
        "mirrored": witness.mirrored,
        "complete": witness.complete,
        "d_L": witness.d_l,
        "d_R": witness.d_r,
        "reconstruction_error": witness.reconstruction_error,
        "rho_L": state_to_dict(rho_l, "rho_B_R" if witness.mirrored else "rho_A_L"),
        "phi": state_to_dict(phi, "phi_A_BL" if witness.mirrored else "phi_AR_B"),
        "phi_vector": [[float(z.real), float(z.imag)] for z in phi.vec],
        "embedding": matrix_to_pairs(witness.embedding),
        "notes": list(witness.notes),
    }


def cmd_structure(args):
    rho = load(args.path)
    part = parse_partition(args.partition, len(rho.dims))
    if len(part.labels) != 2:
        raise CliError("structure needs a bipartition (use --partition)", EXIT_PARSE)
    ab = subsystem(rho, part, ["A", "B"])
    verdict = classify_saturation(ab, tol_sat=args.tol_sat)
    doc = header(args)
    doc["state"] = {"label": rho.label, "dims": list(rho.dims)}
    doc["verdict"] = verdict.as_dict()
    code = EXIT_OK
    if verdict.case == "neither":
        doc["witness"] = None
    else:
        mirrored = verdict.case == "saturates_a_sufficient"
        try:
            witness = structure_extract(ab, mirrored=mirrored)
        except StructureError as exc:
            doc["witness"] = None
            doc["error"] = f"extraction failed: {exc}"
            code = EXIT_VERIFY
        else:
            doc["witness"] = witness_doc(witness)
            if args.out_dir:
                import os

                os.makedirs(args.out_dir, exist_ok=True)
                write_state(os.path.join(args.out_dir, "rho_L.json"), witness.rho_l)
                write_state(os.path.join(args.out_dir, "phi.json"), witness.phi)
    if args.json:
        emit(doc, True)
    else:
        brief = dict(doc)
        if doc.get("witness"):
            w = doc["witness"]
            brief["witness"] = {
                k: w[k] for k in ("mirrored", "complete", "d_L", "d_R", "reconstruction_error")
            }
            brief["witness"]["rho_L_spectrum"] = np.linalg.eigvalsh(
                np.array([[complex(*z) for z in row] for row in w["rho_L"]["matrix"]])
            )[::-1].round(12).tolist()
            brief["witness"]["phi_vector"] = [complex(*z) for z in w["phi_vector"]]
        emit(brief, False)
    return code


def cmd_verify(args):
    try:
        dims = check_dims(args.which, tuple(args.dims) if args.dims else None)
    except UnsupportedDims as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc
    cfg = optimizer_config(args)
    kwargs = {}
    if args.which in ("tradeoff", "inequality"):
        kwargs["dims"] = dims
    if args.which in ("kw", "inequality"):
        kwargs["rank"] = args.rank
    if args.which == "strictness":
        kwargs["ensemble"] = args.ensemble
    t0 = time.perf_counter()
    try:
        rows = run_sweep(args.which, args.n, args.seed, cfg, jobs=args.jobs, **kwargs)
    except UnsupportedDims as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc
    summary = summarize(args.which, rows, args.tol)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COLUMNS[args.which])
            for r in rows:
                writer.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in COLUMNS[args.which]])
    doc = header(args)
    doc["verify"] = args.which
    doc["dims"] = list(dims)
    doc["summary"] = summary
    doc["elapsed_s"] = time.perf_counter() - t0
    if args.json:
        doc["rows"] = rows
    emit(doc, args.json)
    return EXIT_OK if summary["passed"] else EXIT_VERIFY


def make_example(which, params=()):
    if which == "paper":
        return paper_example_state()
    if which == "bell":
        rho = bell_state().density()
        return DensityMatrix(rho.op, rho.dims, label="bell")
    if which == "product":
        rho_a = np.array([[0.75, 0.25], [0.25, 0.25]], dtype=complex)
        rho_b = np.array([[0.5, 0.25j], [-0.25j, 0.5]], dtype=complex)
        return DensityMatrix(np.kron(rho_a, rho_b), (2, 2), label="product")
    if which == "constructed":
        if len(params) != 4:
            raise CliError("constructed needs d_L d_R d_B seed", EXIT_PARSE)
        d_l, d_r, d_b, seed = params
        rho, _ = constructed_saturating_state(d_l, d_r, d_b, seed)
        return DensityMatrix(rho.op, rho.dims, label=f"constructed-{d_l}-{d_r}-{d_b}-{seed}")
    raise CliError(f"unknown example {which!r}", EXIT_PARSE)


def cmd_make_example(args):
    rho = make_example(args.which, tuple(args.params))
    if args.out in (None, "-"):
        sys.stdout.write(json.dumps(state_to_dict(rho)) + "\n")
    else:
        try:
            write_state(args.out, rho)
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc}", EXIT_VERIFY) from exc
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def _dims(text):
    try:
        dims = [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}") from exc
    if any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"bad dims {text!r}")
    return dims


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-sat", type=float, default=TOL_SAT)
    common.add_argument("--opt-restarts", type=int, default=None)
    common.add_argument("--opt-tol", type=float, default=1e-12)
    common.add_argument("--opt-max-iter", type=int, default=4000)
    common.add_argument("--povm", action="store_true", help="search rank-one POVMs instead of projective measurements")
    common.add_argument("--no-shortcut", action="store_true", help="never use the structure shortcut for D")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qcorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qcorr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="entropies, J, D, EoF and saturation verdict")
    p.add_argument("path")
    p.add_argument("--partition", default="", help='1-based factor groups, e.g. "1|2,3"')
    p.add_argument("--measure", default=None, help="label (A, B) or 1-based index of the measured part")
    p.add_argument("--both", action="store_true", help="also compute the reverse direction")
    p.add_argument("--compare-povm", action="store_true", help="add POVM-search J next to projective J")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("structure", parents=[common], help="saturation verdict and product-form witness")
    p.add_argument("path")
    p.add_argument("--partition", default="")
    p.add_argument("--out-dir", default=None, help="write witness factors as state files")
    p.set_defaults(func=cmd_structure)

    p = sub.add_parser("verify", parents=[common], help="random-state sweeps of the exact identities")
    p.add_argument("which", choices=["tradeoff", "kw", "inequality", "strictness"])
    p.add_argument("-n", type=int, default=100)
    p.add_argument("--dims", type=_dims, default=None)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--ensemble", choices=["full_rank", "near_pure"], default="full_rank")
    p.add_argument("--tol", type=float, default=3e-3)
    p.add_argument("--csv", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("make-example", parents=[common], help="write an example state file")
    p.add_argument("which", choices=["paper", "bell", "product", "constructed"])
    p.add_argument("params", nargs="*", type=int, help="d_L d_R d_B seed for constructed")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=cmd_make_example)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s"
    )
    try:
        return args.func(args)
    except CliError as exc:
        print(f"qcorr: {exc}", file=sys.stderr)
        return exc.code
    except InvalidStateError as exc:
        print(f"qcorr: invalid state: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

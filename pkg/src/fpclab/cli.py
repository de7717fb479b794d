"""Command-line pipeline: graphs, codes, duals, and simulations as files.

Exit codes: 0 success, 1 invariant failure, 2 invalid arguments or input,
3 resource gate refusal.  Every command that writes files also writes a
run manifest (<first output>.manifest.json) recording the command, its
full parameter set, library versions, the master seed, and a sha256
digest per output; `replay` re-runs a manifest into a scratch directory
and verifies the digests match byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .carpet import (CarpetSpec, barrier_closed_form, build_carpet_graph,
                     closed_form_counts, energy_barrier_cut, hausdorff_dimension,
                     save_graph)
from .complexes import (ComplexValidationError, dualize, homology_dim,
                        load_complex, save_complex, toric_complex)
from .css import (CodeValidationError, code_from_complex, load_code,
                  num_logical_qubits, sector_swap_maps, save_code)
from .fpc import build_fpc, fpc_parameters
from .ising import (dual_to_dict, duality_identity_check, fpc_constraint_generators,
                    load_model, merlini_gruber_dual, sector_model, save_model,
                    square_lattice_model, graph_ising_model, BRUTE_FORCE_SPIN_CAP)
from .mc import Schedule, binder_crossing, read_records_csv, run_schedule, write_records_csv
from .product import kunneth_check, middle_code_complex, product

GATE_QUBITS = 50_000
IDENTITY_TOL = 1e-9


class InvariantFailure(Exception):
    """A named invariant did not hold; maps to exit code 1."""


class GateRefusal(Exception):
    """Materialization refused by the resource gate; exit code 3."""


def _gate(n: int, force: bool, what: str) -> None:
    if n > GATE_QUBITS and not force:
        raise GateRefusal(f"{what} needs n = {n} > {GATE_QUBITS} qubits; pass --force to override")


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(doc: dict, path: str) -> str:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


_REPLAY_PATH_KEYS = ("out", "export", "model", "small", "large")


def _write_manifest(command: str, args: argparse.Namespace, outputs: list[str]) -> str:
    params = {k: v for k, v in vars(args).items() if k not in ("handler", "command")}
    manifest = {
        "command": command,
        "params": params,
        "versions": {"fpclab": __version__,
                     "python": "%d.%d.%d" % sys.version_info[:3],
                     "numpy": np.__version__},
        "seed": params.get("seed"),
        "outputs": {os.path.abspath(p): _sha256(p) for p in outputs},
    }
    path = outputs[0] + ".manifest.json"
    return _write_json(manifest, path)


def _spec_from(args) -> CarpetSpec:
    return CarpetSpec(args.b, args.c, args.level)


def cmd_build_graph(args) -> list[str]:
    graph = build_carpet_graph(_spec_from(args))
    nv, ne, npi, npe = graph.counts()
    print(f"SC({args.b},{args.c},{args.level}): {nv} vertices, {ne} edges, "
          f"{npi} interior plaquettes, {npe} exterior boundaries")
    print(f"hausdorff dimension = {hausdorff_dimension(args.b, args.c):.6f}")
    if args.out:
        save_graph(graph, args.out)
        return [args.out]
    return []


def cmd_code_params(args) -> list[str]:
    spec = _spec_from(args)
    n, k = fpc_parameters(args.b, args.c, args.level)
    nv, ne, npi, npe = closed_form_counts(spec)
    print(f"FPC({args.b},{args.c},{args.level}): n = {n}, k = {k}  (closed form; "
          f"|V|={nv} |E|={ne} |P_i|={npi} |P_e|={npe})")
    report = {"b": args.b, "c": args.c, "level": args.level, "n": n, "k": k,
              "counts": {"vertices": nv, "edges": ne,
                         "interior_plaquettes": npi, "exterior_plaquettes": npe},
              "formula_only": bool(args.formula_only)}
    outputs = []
    if not args.formula_only:
        _gate(n, args.force, "materialized verification")
        bundle = build_fpc(spec)
        k_rank = num_logical_qubits(bundle.code)
        report["k_from_ranks"] = k_rank
        report["k_agreement"] = (k_rank == k)
        print(f"k from GF(2) ranks = {k_rank}: "
              + ("agrees with closed form" if k_rank == k else "DISAGREES with closed form"))
        if args.export:
            os.makedirs(args.export, exist_ok=True)
            names = save_complex(bundle.prod.complex, args.export)
            names += save_code(bundle.code, args.export)
            outputs.extend(os.path.join(args.export, nm) for nm in names)
        if k_rank != k:
            raise InvariantFailure(f"rank degeneracy {k_rank} != closed form {k}")
    if args.out:
        _write_json(report, args.out)
        outputs.insert(0, args.out)
    return outputs


def _verify_built(args, checks: list[tuple[str, bool, str]]) -> None:
    spec = _spec_from(args)
    n, k = fpc_parameters(args.b, args.c, args.level)
    _gate(n, args.force, "verification")
    graph = build_carpet_graph(spec)
    nv, ne, npi, npe = graph.counts()
    cf = closed_form_counts(spec)
    checks.append(("counting-closed-forms", (nv, ne, npi, npe) == cf,
                   f"enumerated {(nv, ne, npi, npe)} vs closed form {cf}"))
    checks.append(("euler-identity", ne == npi + nv - 1 + npe,
                   f"|E|={ne} vs |P_i|+|V|-1+|P_e|={npi + nv - 1 + npe}"))
    try:
        toric = toric_complex(graph)
        checks.append(("boundary-squares-to-zero", True, "toric complex"))
    except ComplexValidationError as e:
        checks.append(("boundary-squares-to-zero", False, str(e)))
        return
    h = tuple(homology_dim(toric, i) for i in range(3))
    checks.append(("toric-homology", h == (1, npe, 0), f"{h} vs (1, {npe}, 0)"))
    dual = dualize(toric)
    hd = tuple(homology_dim(dual, i) for i in range(3))
    checks.append(("dual-homology", hd == (0, npe, 1), f"{hd} vs (0, {npe}, 1)"))
    try:
        prod = product(toric, dual)
        checks.append(("product-boundary-squares-to-zero", True, "product complex"))
    except ComplexValidationError as e:
        checks.append(("product-boundary-squares-to-zero", False, str(e)))
        return
    for i in range(5):
        lhs, rhs, equal = kunneth_check(toric, dual, i, prod)
        checks.append((f"kunneth-degree-{i}", equal, f"H_{i}: {lhs} vs {rhs}"))
    try:
        code = code_from_complex(middle_code_complex(prod))
        checks.append(("stabilizer-commutation", True, "hx hz^T = 0"))
    except CodeValidationError as e:
        checks.append(("stabilizer-commutation", False, str(e)))
        return
    k_rank = num_logical_qubits(code)
    checks.append(("degeneracy-closed-form", k_rank == k, f"{k_rank} vs {k}"))
    qubit_perm, link_to_cube = sector_swap_maps(prod)
    x_sup = sorted(tuple(sorted(qubit_perm[q] for q in code.hx.row_indices(i)))
                   for i in range(code.hx.n_rows))
    z_sup = sorted(tuple(code.hz.row_indices(i)) for i in range(code.hz.n_rows))
    checks.append(("sector-isomorphism", x_sup == z_sup,
                   "relabeled X supports equal Z supports as multisets"))


def _verify_files(args, checks: list[tuple[str, bool, str]]) -> None:
    b, c, level = args.b, args.c, args.level
    if None in (b, c, level):
        # exported codes are self-describing; fall back to stored parameters
        with open(os.path.join(args.from_dir, "code.json"), encoding="ascii") as fh:
            prov = json.load(fh).get("provenance") or {}
        try:
            b, c, level = int(prov["b"]), int(prov["c"]), int(prov["l"])
        except KeyError:
            raise ValueError("stored files carry no carpet parameters; "
                             "pass --b, --c, and --level") from None
    n, k = fpc_parameters(b, c, level)
    try:
        c = load_complex(args.from_dir)
        checks.append(("boundary-squares-to-zero", True, "stored complex validates"))
    except (ComplexValidationError, ValueError, OSError) as e:
        checks.append(("boundary-squares-to-zero", False, f"stored complex: {e}"))
        return
    dims_ok = (c.length == 4 and c.dim(2) == n)
    checks.append(("stored-dimensions", dims_ok,
                   f"middle dimension {c.dim(2) if c.length == 4 else '?'} vs n = {n}"))
    try:
        code = load_code(args.from_dir)
        checks.append(("stabilizer-commutation", True, "stored code validates"))
    except (CodeValidationError, ValueError, OSError) as e:
        checks.append(("stabilizer-commutation", False, f"stored code: {e}"))
        return
    checks.append(("code-matches-complex",
                   code.hx == c.boundary(2) and code.hz == c.boundary(3).transpose(),
                   "hx = boundary(2), hz = boundary(3)^T"))
    k_rank = num_logical_qubits(code)
    checks.append(("degeneracy-closed-form", k_rank == k, f"{k_rank} vs {k}"))


def cmd_verify(args) -> list[str]:
    checks: list[tuple[str, bool, str]] = []
    if args.from_dir:
        _verify_files(args, checks)
    elif None in (args.b, args.c, args.level):
        raise ValueError("need --b, --c, and --level (or --from DIR)")
    else:
        _verify_built(args, checks)
    failed = [name for name, ok, _ in checks if not ok]
    for name, ok, detail in checks:
        print(f"[{'pass' if ok else 'FAIL'}] {name}: {detail}")
    outputs = []
    if args.out:
        doc = {"checks": [{"name": n_, "ok": ok, "detail": d}
                          for n_, ok, d in checks],
               "failed": failed}
        if args.from_dir:
            doc["source"] = os.path.abspath(args.from_dir)
        else:
            doc.update(b=args.b, c=args.c, level=args.level)
        _write_json(doc, args.out)
        outputs.append(args.out)
    if failed:
        raise InvariantFailure("failed checks: " + ", ".join(failed))
    return outputs


def cmd_dualize(args) -> list[str]:
    model, gens = load_model(args.model)
    dual = merlini_gruber_dual(model, gens)
    doc = dual_to_dict(dual)
    print(f"dual: {dual.lam_star} spins, {dual.dual_model.num_interactions} interactions, "
          f"max arity {dual.dual_model.max_arity()}, N_S* = {dual.n_s_star}")
    if dual.trivial_constraint_group:
        print("constraint group is trivial: dual has no spins "
              "(constant weight exp(%.6f))" % dual.constant_log_weight)
    rel = None
    if model.num_spins <= BRUTE_FORCE_SPIN_CAP and dual.lam_star <= BRUTE_FORCE_SPIN_CAP:
        lhs, rhs, rel = duality_identity_check(model, gens)
        doc["identity"] = {"lhs": lhs, "rhs": rhs, "relative_error": rel}
        print(f"identity check: lhs = {lhs:.12g}, rhs = {rhs:.12g}, rel err = {rel:.3e}")
    else:
        doc["identity"] = None
        print("identity check skipped: model or dual above the brute-force cap")
    outputs = []
    if args.out:
        _write_json(doc, args.out)
        outputs.append(args.out)
    if rel is not None and rel > IDENTITY_TOL:
        raise InvariantFailure(f"duality identity relative error {rel:.3e} > {IDENTITY_TOL}")
    return outputs


def cmd_sector(args) -> list[str]:
    spec = _spec_from(args)
    n, _ = fpc_parameters(args.b, args.c, args.level)
    _gate(n, args.force, "sector model construction")
    bundle = build_fpc(spec)
    model = sector_model(bundle.code, args.sector, args.beta)
    gens = None
    if args.sector == "Z":
        gens = fpc_constraint_generators(bundle.prod, bundle.graph)
    print(f"{args.sector} sector of FPC({args.b},{args.c},{args.level}) at beta={args.beta}: "
          f"{model.num_spins} spins, {model.num_interactions} interactions"
          + (f", {len(gens.vectors)} constraint generators" if gens else ""))
    save_model(model, args.out, gens)
    return [args.out]


def _parse_betas(args) -> tuple[float, ...]:
    if args.betas:
        try:
            lo, hi, num = args.betas.split(":")
            return tuple(np.linspace(float(lo), float(hi), int(num)))
        except (ValueError, TypeError) as e:
            raise ValueError(f"--betas wants lo:hi:num, got {args.betas!r}") from e
    return tuple(np.linspace(0.2, 1.2, 26))


def cmd_simulate(args) -> list[str]:
    sources = sum(1 for x in (args.model, args.b, args.square) if x is not None)
    if sources != 1:
        raise ValueError("pick exactly one of --model, --b/--c/--level, --square")
    if args.model:
        model, _ = load_model(args.model)
        label = args.model
    elif args.square:
        model = square_lattice_model(args.square, args.square, 1.0)
        label = f"square {args.square}x{args.square}"
    else:
        if args.c is None or args.level is None:
            raise ValueError("carpet simulation needs --b, --c, and --level")
        graph = build_carpet_graph(_spec_from(args))
        model = graph_ising_model(len(graph.vertices), graph.edges, 1.0)
        label = f"carpet SC({args.b},{args.c},{args.level})"
    schedule = Schedule(betas=_parse_betas(args), sweeps=args.sweeps,
                        burn_in=args.burn_in, stride=args.stride,
                        replicas=args.replicas, seed=args.seed,
                        algorithm=args.algorithm)
    print(f"simulating {label}: {model.num_spins} spins, "
          f"{len(schedule.betas)} beta points, {schedule.replicas} replica(s)")
    records = run_schedule(model, schedule)
    main, agg = write_records_csv(records, args.out)
    print(f"wrote {main} and {agg}")
    return [main, agg]


def cmd_barrier(args) -> list[str]:
    spec = _spec_from(args)
    cut = energy_barrier_cut(spec)
    closed = barrier_closed_form(spec)
    flag = "exact minimal straight cut" if cut.exact else "heuristic column scan (even b)"
    print(f"SC({args.b},{args.c},{args.level}) vertical cut through column {cut.column}: "
          f"{cut.count} crossed edges ({flag})")
    if closed is not None:
        print(f"closed form: {closed}" + ("" if closed == cut.count else f" MISMATCH vs {cut.count}"))
    outputs = []
    if args.out:
        _write_json({"b": args.b, "c": args.c, "level": args.level,
                     "count": cut.count, "column": cut.column, "exact": cut.exact,
                     "closed_form": closed,
                     "crossed_edges": [list(map(list, e)) for e in cut.crossed_edges]},
                    args.out)
        outputs.append(args.out)
    if closed is not None and closed != cut.count:
        raise InvariantFailure(f"barrier closed form {closed} != enumerated {cut.count}")
    return outputs


def cmd_crossing(args) -> list[str]:
    rec_small = read_records_csv(args.small)
    rec_large = read_records_csv(args.large)
    result = binder_crossing(rec_small, rec_large)
    if result is None:
        print("no crossing: the Binder curves do not intersect on the shared grid")
        doc = {"crossing_found": False}
    else:
        kind = "degenerate (identical curves)" if result.degenerate else "interpolated"
        print(f"crossing at beta = {result.beta:.6f} +- {result.uncertainty:.6f} ({kind})")
        doc = {"crossing_found": True, "beta": result.beta,
               "uncertainty": result.uncertainty, "degenerate": result.degenerate,
               "bootstrap_hits": result.bootstrap_hits}
    if args.out:
        _write_json(doc, args.out)
        return [args.out]
    return []


def cmd_replay(args) -> list[str]:
    with open(args.manifest, "r", encoding="ascii") as fh:
        manifest = json.load(fh)
    command = manifest["command"]
    if command not in _COMMANDS or command == "replay":
        raise ValueError(f"manifest names unknown or non-replayable command {command!r}")
    params = dict(manifest["params"])
    handler = _COMMANDS[command]
    with tempfile.TemporaryDirectory(prefix="fpclab-replay-") as tmp:
        # Output locations are rewritten into the scratch directory; input
        # paths (model CSVs etc.) are used as recorded and must still exist.
        if params.get("out"):
            params["out"] = os.path.join(tmp, os.path.basename(params["out"]))
        if params.get("export"):
            params["export"] = os.path.join(tmp, "export")
        produced = handler(argparse.Namespace(**params))
        by_base: dict[str, list[str]] = {}
        for p in produced:
            by_base.setdefault(os.path.basename(p), []).append(p)
        mismatches = []
        for orig_path, digest in manifest["outputs"].items():
            base = os.path.basename(orig_path)
            candidates = by_base.get(base, [])
            if len(candidates) != 1:
                mismatches.append(f"{base}: " + ("not produced" if not candidates else "ambiguous"))
                continue
            new_digest = _sha256(candidates[0])
            print(f"[{'identical' if new_digest == digest else 'DIFFERS'}] {base}")
            if new_digest != digest:
                mismatches.append(f"{base}: digest mismatch")
    if mismatches:
        raise InvariantFailure("replay mismatch: " + "; ".join(mismatches))
    print("replay reproduced all outputs byte-identically")
    return []


def _add_spec_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--b", type=int, required=required)
    p.add_argument("--c", type=int, required=required)
    p.add_argument("--level", type=int, required=required)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpclab",
        description="Fractal product codes: graphs, GF(2) certification, duality, simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-graph", help="build a carpet graph and save it as JSON")
    _add_spec_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_build_graph)

    p = sub.add_parser("code-params", help="code parameters from closed forms and GF(2) ranks")
    _add_spec_args(p)
    p.add_argument("--formula-only", action="store_true")
    p.add_argument("--force", action="store_true")
    p.add_argument("--export", default=None, help="directory for complex and code files")
    p.add_argument("--out", default=None, help="JSON report path")
    p.set_defaults(handler=cmd_code_params)

    p = sub.add_parser("verify", help="run the invariant suite for one carpet")
    _add_spec_args(p, required=False)
    p.add_argument("--from", dest="from_dir", default=None,
                   help="verify exported files in this directory instead of rebuilding")
    p.add_argument("--force", action="store_true")
    p.add_argument("--out", default=None, help="JSON report path")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("dualize", help="duality transform of a model JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_dualize)

    p = sub.add_parser("sector", help="classical sector model of an FPC")
    _add_spec_args(p)
    p.add_argument("--sector", choices=("X", "Z"), default="Z")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--force", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_sector)

    p = sub.add_parser("simulate", help="Monte Carlo run writing observable CSVs")
    p.add_argument("--model", default=None, help="model JSON path")
    _add_spec_args(p, required=False)
    p.add_argument("--square", type=int, default=None, help="square lattice side length")
    p.add_argument("--betas", default=None, help="grid as lo:hi:num (default 0.2:1.2:26)")
    p.add_argument("--sweeps", type=int, default=100_000)
    p.add_argument("--burn-in", type=int, default=10_000, dest="burn_in")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--algorithm", choices=("auto", "metropolis", "wolff"), default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("barrier", help="minimal straight-cut energy barrier")
    _add_spec_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_barrier)

    p = sub.add_parser("crossing", help="Binder crossing of two observable CSVs")
    p.add_argument("--small", required=True)
    p.add_argument("--large", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_crossing)

    p = sub.add_parser("replay", help="re-run a manifest and verify byte-identical outputs")
    p.add_argument("--manifest", required=True)
    p.set_defaults(handler=cmd_replay)

    return parser


_COMMANDS = {
    "build-graph": cmd_build_graph,
    "code-params": cmd_code_params,
    "verify": cmd_verify,
    "dualize": cmd_dualize,
    "sector": cmd_sector,
    "simulate": cmd_simulate,
    "barrier": cmd_barrier,
    "crossing": cmd_crossing,
    "replay": cmd_replay,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        outputs = args.handler(args)
        if outputs and args.command != "replay":
            print(f"manifest: {_write_manifest(args.command, args, outputs)}")
        return 0
    except GateRefusal as e:
        print(f"resource gate: {e}", file=sys.stderr)
        return 3
    except InvariantFailure as e:
        print(f"invariant failure: {e}", file=sys.stderr)
        return 1
    except (ValueError, ComplexValidationError, CodeValidationError,
            OSError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Code parameters of fractal products: closed forms vs materialized ranks."""

from __future__ import annotations

from fpclab.carpet import CarpetSpec
from fpclab.css import classify_global, logical_basis, num_logical_qubits
from fpclab.fpc import build_fpc, fpc_parameters


def main() -> None:
    print("closed-form parameters [[n, k]]:")
    for (b, c, l) in [(3, 1, 0), (3, 1, 1), (3, 1, 2), (5, 3, 1),
                      (14, 12, 1), (3, 1, 4)]:
        n, k = fpc_parameters(b, c, l)
        print(f"  ({b:2d},{c:2d}) level {l}: n = {n:>11,}  k = {k:,}")

    # Materialize the level-1 instance and certify k over GF(2).
    spec = CarpetSpec(3, 1, 1)
    bundle = build_fpc(spec)
    n_formula, k_formula = fpc_parameters(spec.b, spec.c, spec.l)
    k_ranks = num_logical_qubits(bundle.code)
    print(f"\nmaterialized ({spec.b},{spec.c}) level {spec.l}: "
          f"n = {bundle.code.n} (formula {n_formula}), "
          f"k from ranks = {k_ranks} (formula {k_formula})")

    basis = logical_basis(bundle.code)
    print(f"symplectic logical basis: {basis.k} X/Z pairs, "
          f"pairing {basis.pairing}")

    # The distinguished global logical: Z support is one full vertex layer.
    glob = classify_global(bundle.code, bundle.prod)
    z_global = glob.z_logicals.vectors()[glob.global_index]
    print(f"global logical Z support: {len(z_global)} qubits "
          f"(vertex count {len(bundle.graph.vertices)})")


if __name__ == "__main__":
    main()

"""Fractal product code assembly: carpet graph to CSS code in one step.

The code is the middle level of the product of the carpet's toric complex
with its own dualization.  Closed forms give the physical and logical
qubit counts without materializing anything:

    n = |V|^2 + |E|^2 + |P_i|^2        k = 1 + |P_e|^2
"""

from __future__ import annotations

from dataclasses import dataclass

from .carpet import CarpetSpec, CarpetGraph, build_carpet_graph, closed_form_counts
from .complexes import ChainComplex, dualize, toric_complex
from .css import CssCode, code_from_complex
from .product import ProductComplex, middle_code_complex, product

__all__ = ["FpcBundle", "fpc_parameters", "build_fpc"]


def fpc_parameters(b: int, c: int, l: int) -> tuple[int, int]:
    """(physical qubits, logical qubits) from the counting closed forms."""
    nv, ne, npi, npe = closed_form_counts(CarpetSpec(b, c, l))
    return nv * nv + ne * ne + npi * npi, 1 + npe * npe


@dataclass
class FpcBundle:
    """Everything the pipeline produces for one carpet spec."""

    spec: CarpetSpec
    graph: CarpetGraph
    toric: ChainComplex
    dual_toric: ChainComplex
    prod: ProductComplex
    code: CssCode


def build_fpc(spec: CarpetSpec) -> FpcBundle:
    """Materialize graph, complexes, product, and middle-level CSS code."""
    graph = build_carpet_graph(spec)
    toric = toric_complex(graph)
    dual_toric = dualize(toric)
    prod = product(toric, dual_toric)
    code = code_from_complex(middle_code_complex(prod),
                             provenance={"construction": "carpet-product",
                                         "b": spec.b, "c": spec.c, "l": spec.l})
    return FpcBundle(spec=spec, graph=graph, toric=toric, dual_toric=dual_toric,
                     prod=prod, code=code)

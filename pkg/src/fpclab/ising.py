"""Generalized Ising models, duality transformations, and exact checks.

A model is a set of ferromagnetic multi-spin couplings K_B >= 0 on subsets
B of the spins.  The partition function is
Z = sum over spin subsets R of exp(sum_B K_B (-1)^(|R cap B|)).

The duality transformation replaces a generating set {C_i} of the
constraint group (interaction subsets whose supports XOR to nothing) by
dual spins, mapping each interaction j to the dual support
B*_j = {i : j in C_i} with coupling exp(-2 K*) = prod tanh K over the
interactions merged into the same dual support.  The identity

Z(K) = sqrt(2)^(|L| - |L*| + N_S - N_S*) . prod_B sqrt(sinh 2K_B) . Z*(K*)

holds for ANY generating set that lies in and spans the constraint group,
dependent generating sets included: the summation overcount 2^(|L*|-rank)
is exactly 2^(N_S*).  Interactions whose dual support is empty contribute
the constant factor exp(K*) to Z*, carried here as constant_log_weight.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .gf2 import BasisSet, BinaryMatrix, kernel_basis, mat_vec, rank

__all__ = [
    "Interaction",
    "IsingModel",
    "SymmetryGroup",
    "ConstraintGroup",
    "GeneratingSet",
    "DualSystem",
    "sector_model",
    "symmetry_group",
    "constraint_group",
    "fpc_constraint_generators",
    "merlini_gruber_dual",
    "brute_force_Z",
    "brute_force_log_Z",
    "brute_force_state_probs",
    "duality_identity_check",
    "gks_check",
    "carpet_slice_extract",
    "chain_model",
    "square_lattice_model",
    "graph_ising_model",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
    "dual_to_dict",
    "BRUTE_FORCE_SPIN_CAP",
]

BRUTE_FORCE_SPIN_CAP = 24


@dataclass(frozen=True)
class Interaction:
    """One ferromagnetic term: a spin subset and its coupling K_B >= 0."""

    support: tuple[int, ...]
    coupling: float


class IsingModel:
    """Spins 0..num_spins-1 with multi-spin ferromagnetic interactions.

    Supports must be non-empty, in range, and pairwise distinct; couplings
    must be non-negative.
    """

    def __init__(self, num_spins: int, interactions):
        if num_spins < 0:
            raise ValueError("negative spin count")
        self.num_spins = int(num_spins)
        terms: list[Interaction] = []
        seen = set()
        for item in interactions:
            if isinstance(item, Interaction):
                support, k = item.support, item.coupling
            else:
                support, k = item
            support = tuple(sorted(int(s) for s in support))
            if not support:
                raise ValueError("empty interaction support")
            if support[0] < 0 or support[-1] >= num_spins:
                raise ValueError(f"support {support} outside 0..{num_spins - 1}")
            if len(set(support)) != len(support):
                raise ValueError(f"repeated spin in support {support}")
            if support in seen:
                raise ValueError(f"duplicate interaction support {support}")
            seen.add(support)
            k = float(k)
            if k < 0:
                raise ValueError(f"negative coupling {k} on {support}")
            terms.append(Interaction(support, k))
        self.interactions = terms

    @property
    def num_interactions(self) -> int:
        return len(self.interactions)

    def support_matrix(self) -> BinaryMatrix:
        """Interactions x spins incidence matrix."""
        return BinaryMatrix(len(self.interactions), self.num_spins,
                            [(i, s) for i, t in enumerate(self.interactions)
                             for s in t.support])

    def couplings(self) -> np.ndarray:
        return np.array([t.coupling for t in self.interactions], dtype=np.float64)

    def max_arity(self) -> int:
        return max((len(t.support) for t in self.interactions), default=0)

    def __repr__(self) -> str:
        return f"IsingModel(spins={self.num_spins}, terms={len(self.interactions)})"


@dataclass
class SymmetryGroup:
    """Spin-flip subsets meeting every interaction evenly; |S| = 2^n_s."""

    generators: BasisSet
    n_s: int


@dataclass
class ConstraintGroup:
    """Echelon kernel basis of interaction subsets whose supports cancel."""

    generators: BasisSet


@dataclass
class GeneratingSet:
    """A (possibly dependent) generating set of the constraint group.

    vectors are interaction index tuples; labels, when present, carry the
    geometric identity of each generator (hypercube or boundary).
    """

    num_interactions: int
    vectors: list[tuple[int, ...]]
    labels: list[tuple] | None = None


@dataclass
class DualSystem:
    """The dual model plus everything the duality identity needs.

    phi maps each original interaction index to its dual support (possibly
    empty).  constant_log_weight is the summed K* of empty-support
    interactions, a constant factor exp(.) on the dual partition function.
    spin_labels, when present, name each dual spin.
    """

    dual_model: IsingModel
    phi: list[tuple[int, ...]]
    lam: int
    lam_star: int
    n_s: int
    n_s_star: int
    constant_log_weight: float
    trivial_constraint_group: bool
    spin_labels: list[tuple] | None = None


def sector_model(code, sector: str, beta: float) -> IsingModel:
    """Classical sector of a CSS code: one spin per qubit, one interaction
    per stabilizer row of the chosen sector, coupling K = beta (unit J)."""
    if beta <= 0:
        raise ValueError("need beta > 0")
    if sector not in ("X", "Z"):
        raise ValueError("sector must be 'X' or 'Z'")
    h = code.hx if sector == "X" else code.hz
    return IsingModel(code.n, [(h.row_indices(i), beta) for i in range(h.n_rows)])


def symmetry_group(m: IsingModel) -> SymmetryGroup:
    """Kernel of the support matrix acting on spin-flip vectors."""
    gens = kernel_basis(m.support_matrix())
    return SymmetryGroup(generators=gens, n_s=len(gens))


def constraint_group(m: IsingModel) -> ConstraintGroup:
    """Kernel basis of the transposed support matrix (interaction subsets
    whose supports XOR to the empty spin set)."""
    gens = kernel_basis(m.support_matrix().transpose())
    return ConstraintGroup(generators=gens)


def fpc_constraint_generators(prod, graph) -> GeneratingSet:
    """The geometric generating set of the Z-sector constraint group.

    One generator per hypercube (top-level product element: the cubes on
    its boundary) and one per exterior boundary of the lattice, the outer
    boundary included: for a boundary cycle gamma, the cubes (e, p*) with
    e in gamma and p* ranging over the whole top space of the right
    factor.  The set is dependent (everything sums to zero) but spans the
    constraint kernel, and every cube lies in exactly two generators,
    which is what makes the dual purely 2-body.
    """
    c = prod.complex
    n_int = c.dim(3)
    right_top = prod.right.dim(2)
    vectors: list[tuple[int, ...]] = []
    labels: list[tuple] = []

    d4 = c.boundary(4)
    by_col: dict[int, list[int]] = {}
    for r, col in d4.entries():
        by_col.setdefault(col, []).append(r)
    for h in range(c.dim(4)):
        vectors.append(tuple(sorted(by_col.get(h, []))))
        _, p, pstar = prod.decode(4, h)
        labels.append(("hypercube", p, pstar))

    hole_edges: set[int] = set()
    for i, cycle in enumerate(graph.exterior_plaquettes):
        vec = tuple(sorted(prod.index(3, 1, e, b)
                           for e in cycle for b in range(right_top)))
        vectors.append(vec)
        labels.append(("boundary", "hole", i))
        hole_edges.update(cycle)

    owners: dict[int, int] = {}
    for plaq in graph.interior_plaquettes:
        for e in plaq:
            owners[e] = owners.get(e, 0) + 1
    outer = [e for e in range(len(graph.edges))
             if owners.get(e, 0) == 1 and e not in hole_edges]
    vec = tuple(sorted(prod.index(3, 1, e, b)
                       for e in outer for b in range(right_top)))
    vectors.append(vec)
    labels.append(("boundary", "outer"))

    return GeneratingSet(num_interactions=n_int, vectors=vectors, labels=labels)


def _generator_rows(m: IsingModel, generators) -> tuple[BinaryMatrix, list | None]:
    """Normalize a ConstraintGroup or GeneratingSet into a generator matrix
    (generators x interactions) and validate it lies in and spans the
    constraint kernel."""
    n_int = m.num_interactions
    if generators is None:
        generators = constraint_group(m)
    if isinstance(generators, ConstraintGroup):
        gmat = generators.generators.as_matrix()
        labels = None
    elif isinstance(generators, GeneratingSet):
        if generators.num_interactions != n_int:
            raise ValueError("generating set sized for a different model")
        gmat = BinaryMatrix.from_rows(n_int, generators.vectors)
        labels = generators.labels
    else:
        raise TypeError("generators must be a ConstraintGroup or GeneratingSet")
    if gmat.n_cols != n_int:
        raise ValueError("generator vectors sized for a different model")
    s_t = m.support_matrix().transpose()
    for i in range(gmat.n_rows):
        if mat_vec(s_t, gmat._words[i]).any():
            raise ValueError(f"generator {i} is not a constraint (supports do not cancel)")
    kernel_dim = n_int - rank(m.support_matrix())
    if rank(gmat) != kernel_dim:
        raise ValueError("generators do not span the constraint group")
    return gmat, labels


def merlini_gruber_dual(m: IsingModel, generators=None) -> DualSystem:
    """Duality transformation over a generating set of the constraint group.

    Args:
        m: model with strictly positive couplings (tanh K must be in
            (0, 1) for finite dual couplings).
        generators: ConstraintGroup or GeneratingSet; defaults to the
            canonical kernel basis.  Must lie in and span the constraint
            kernel; dependence is allowed (the identity absorbs it).

    Returns:
        DualSystem with merged dual interactions (identical dual supports
        combine multiplicatively), the phi map, and the prefactor data.
    """
    for t in m.interactions:
        if t.coupling <= 0:
            raise ValueError(f"coupling on {t.support} must be strictly positive "
                             "(dual coupling diverges at zero)")
    gmat, labels = _generator_rows(m, generators)
    lam_star = gmat.n_rows

    membership = gmat.transpose()  # interactions x generators
    phi = [membership.row_indices(j) for j in range(m.num_interactions)]

    merged: dict[tuple[int, ...], float] = {}
    constant_log_weight = 0.0
    for j, t in enumerate(m.interactions):
        kstar = -0.5 * math.log(math.tanh(t.coupling))
        if phi[j]:
            merged[phi[j]] = merged.get(phi[j], 0.0) + kstar
        else:
            constant_log_weight += kstar
    dual_terms = [(sup, merged[sup]) for sup in sorted(merged)]
    dual_model = IsingModel(lam_star, dual_terms)

    n_s = symmetry_group(m).n_s
    n_s_star = symmetry_group(dual_model).n_s
    return DualSystem(dual_model=dual_model, phi=phi, lam=m.num_spins,
                      lam_star=lam_star, n_s=n_s, n_s_star=n_s_star,
                      constant_log_weight=constant_log_weight,
                      trivial_constraint_group=(lam_star == 0),
                      spin_labels=labels)


def _interaction_masks(m: IsingModel) -> np.ndarray:
    if m.num_spins > 63:
        raise ValueError("state masks need <= 63 spins")
    masks = np.zeros(len(m.interactions), dtype=np.uint64)
    for i, t in enumerate(m.interactions):
        mask = 0
        for s in t.support:
            mask |= 1 << s
        masks[i] = mask
    return masks


def _state_log_weights(m: IsingModel, beta_scale: float) -> np.ndarray:
    """log of unnormalized Gibbs weights for all 2^n states (n <= cap)."""
    n = m.num_spins
    if n > BRUTE_FORCE_SPIN_CAP:
        raise ValueError(f"{n} spins exceed the brute-force cap of {BRUTE_FORCE_SPIN_CAP}")
    states = np.arange(1 << n, dtype=np.uint64)
    masks = _interaction_masks(m)
    ks = m.couplings() * beta_scale
    log_w = np.zeros(1 << n, dtype=np.float64)
    for mask, k in zip(masks, ks):
        parity = (np.bitwise_count(states & mask) & 1).astype(np.float64)
        log_w += k * (1.0 - 2.0 * parity)
    return log_w


def brute_force_log_Z(m: IsingModel, beta_scale: float = 1.0) -> float:
    """log of the exact partition function by enumeration (log-sum-exp)."""
    log_w = _state_log_weights(m, beta_scale)
    peak = float(log_w.max()) if log_w.size else 0.0
    return peak + math.log(float(np.exp(log_w - peak).sum())) if log_w.size else 0.0


def brute_force_Z(m: IsingModel, beta_scale: float = 1.0) -> float:
    """Exact partition function; may overflow to inf for very large K."""
    return math.exp(brute_force_log_Z(m, beta_scale))


def brute_force_state_probs(m: IsingModel, beta_scale: float = 1.0) -> np.ndarray:
    """Exact Gibbs probabilities indexed by the spin bitmask state."""
    log_w = _state_log_weights(m, beta_scale)
    w = np.exp(log_w - log_w.max())
    return w / w.sum()


def duality_identity_check(m: IsingModel, generators=None) -> tuple[float, float, float]:
    """Evaluate both sides of the duality identity.

    Returns (lhs, rhs, relative error), computed in the log domain; both
    the model and its dual must be within the brute-force cap.
    """
    dual = merlini_gruber_dual(m, generators)
    if dual.lam_star > BRUTE_FORCE_SPIN_CAP:
        raise ValueError(f"dual has {dual.lam_star} spins, above the brute-force cap")
    log_lhs = brute_force_log_Z(m)
    log_sinh = sum(0.5 * math.log(math.sinh(2.0 * t.coupling)) for t in m.interactions)
    log_rhs = (0.5 * math.log(2.0) * (dual.lam - dual.lam_star + dual.n_s - dual.n_s_star)
               + log_sinh
               + brute_force_log_Z(dual.dual_model)
               + dual.constant_log_weight)
    rel = abs(math.expm1(log_rhs - log_lhs))
    return math.exp(log_lhs), math.exp(log_rhs), rel


def gks_check(m: IsingModel, set_a, set_b) -> tuple[float, float, bool]:
    """First/second Griffiths inequality by enumeration.

    Returns (<s_A s_B>, <s_A><s_B>, lhs >= rhs - 1e-12).  Empty sets give
    the trivial product 1.
    """
    n = m.num_spins
    for s in list(set_a) + list(set_b):
        if not 0 <= int(s) < n:
            raise ValueError(f"spin {s} out of range")
    probs = brute_force_state_probs(m)
    states = np.arange(probs.size, dtype=np.uint64)

    def sigma(subset) -> np.ndarray:
        mask = np.uint64(0)
        for s in subset:
            mask |= np.uint64(1 << int(s))
        return 1.0 - 2.0 * (np.bitwise_count(states & mask) & 1).astype(np.float64)

    sa, sb = sigma(set_a), sigma(set_b)
    lhs = float((probs * sa * sb).sum())
    rhs = float((probs * sa).sum() * (probs * sb).sum())
    return lhs, rhs, lhs >= rhs - 1e-12


def carpet_slice_extract(dual: DualSystem, prod) -> IsingModel:
    """Restrict an FPC_Z dual to one slice of hypercube spins.

    The slice holds the hypercubes (p0, p*) of the first interior
    plaquette p0, one per top basis element p* of the right factor; dual
    interactions supported entirely inside the slice are kept, relabeled
    so spin p* keeps its right-factor index (for a carpet product this is
    the primal vertex index, making graph comparison direct).
    """
    if dual.spin_labels is None:
        raise ValueError("slice extraction needs labeled dual spins "
                         "(build the dual from fpc_constraint_generators)")
    plaquettes = sorted({lab[1] for lab in dual.spin_labels if lab[0] == "hypercube"})
    if not plaquettes:
        raise ValueError("no hypercube spins found; not an FPC dual")
    p0 = plaquettes[0]
    slice_spins = {}
    for spin, lab in enumerate(dual.spin_labels):
        if lab[0] == "hypercube" and lab[1] == p0:
            slice_spins[spin] = lab[2]
    num = prod.right.dim(2)
    if sorted(slice_spins.values()) != list(range(num)):
        raise ValueError("slice is incomplete; dual labels do not cover the layer")
    bonds = []
    for t in dual.dual_model.interactions:
        if all(s in slice_spins for s in t.support):
            bonds.append((tuple(sorted(slice_spins[s] for s in t.support)), t.coupling))
    return IsingModel(num, bonds)


def chain_model(n: int, coupling: float, periodic: bool = False) -> IsingModel:
    """Nearest-neighbor chain, optionally closed into a cycle."""
    bonds = [((i, i + 1), coupling) for i in range(n - 1)]
    if periodic and n >= 2:
        bonds.append(((0, n - 1), coupling))
    return IsingModel(n, bonds)


def square_lattice_model(lx: int, ly: int, coupling: float,
                         periodic: bool = True) -> IsingModel:
    """Nearest-neighbor square lattice.

    On periodic 2-site directions both wraps land on the same pair; such
    duplicate bonds merge by summing couplings so supports stay distinct.
    """
    def idx(x, y):
        return (y % ly) * lx + (x % lx)

    merged: dict[tuple[int, int], float] = {}
    for y in range(ly):
        for x in range(lx):
            for (nx, ny) in ((x + 1, y), (x, y + 1)):
                if not periodic and (nx >= lx or ny >= ly):
                    continue
                a, b = idx(x, y), idx(nx, ny)
                if a == b:
                    continue
                key = (min(a, b), max(a, b))
                merged[key] = merged.get(key, 0.0) + coupling
    return IsingModel(lx * ly, sorted(merged.items()))


def graph_ising_model(num_spins: int, edges, coupling: float) -> IsingModel:
    """Uniform-coupling Ising model on an explicit edge list."""
    return IsingModel(num_spins, [(tuple(e), coupling) for e in edges])


def model_to_dict(m: IsingModel) -> dict:
    return {"spins": m.num_spins,
            "interactions": [{"support": list(t.support), "k": t.coupling}
                             for t in m.interactions]}


def model_from_dict(d: dict) -> IsingModel:
    return IsingModel(d["spins"],
                      [(tuple(t["support"]), t["k"]) for t in d["interactions"]])


def save_model(m: IsingModel, path, generators: GeneratingSet | None = None) -> None:
    doc = model_to_dict(m)
    if generators is not None:
        doc["constraint_generators"] = {
            "vectors": [list(v) for v in generators.vectors],
            "labels": [list(lab) for lab in generators.labels] if generators.labels else None,
        }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> tuple[IsingModel, GeneratingSet | None]:
    with open(path, "r", encoding="ascii") as fh:
        doc = json.load(fh)
    m = model_from_dict(doc)
    gens = None
    if "constraint_generators" in doc and doc["constraint_generators"] is not None:
        cg = doc["constraint_generators"]
        labels = [tuple(lab) for lab in cg["labels"]] if cg.get("labels") else None
        gens = GeneratingSet(num_interactions=m.num_interactions,
                             vectors=[tuple(v) for v in cg["vectors"]],
                             labels=labels)
    return m, gens


def dual_to_dict(dual: DualSystem) -> dict:
    doc = model_to_dict(dual.dual_model)
    doc["phi"] = [list(p) for p in dual.phi]
    doc["prefactor"] = {
        "lam": dual.lam,
        "lam_star": dual.lam_star,
        "n_s": dual.n_s,
        "n_s_star": dual.n_s_star,
        "constant_log_weight": dual.constant_log_weight,
        "trivial_constraint_group": dual.trivial_constraint_group,
    }
    if dual.spin_labels is not None:
        doc["spin_labels"] = [list(lab) for lab in dual.spin_labels]
    return doc

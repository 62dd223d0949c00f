"""Coefficient-matrix operators, continuity certificates and the partial product.

An operator is stored as a rule producing matrix entries over mode numbers:
diagonal symbol, banded entry function, a sum of rank-one terms, or a dense
generator. Truncation at n means the leading n x n principal submatrix in
coefficient-slot order, so truncations are nested.

``certify`` decides membership in C(E, F) through a three-valued outcome:
certified (analytic-exact or truncation-stabilized), failed (norm grows
without bound across doublings), or inconclusive. A finite truncation can
never prove unboundedness, so the failure rule is an explicit divergence
proxy: growth by ``growth_threshold`` across three doublings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .config import RunConfig, DEFAULT_CONFIG
from .errors import ProductUndefinedError, SpecParseError
from .expressions import compile_expression
from .spaces import (Basis, CoefficientVector, ScaleFamily, ScaleSpace,
                     check_same_basis, dual_space, modes)

CERT_EXACT = "analytic-exact"
CERT_STABILIZED = "truncation-stabilized"
CERT_FAILED = "failed"
CERT_INCONCLUSIVE = "inconclusive"


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True)
class Diagonal:
    values: Callable[[np.ndarray], np.ndarray]
    source: Optional[str] = None


@dataclass(frozen=True)
class Banded:
    bandwidth: int
    entry: Callable[[np.ndarray, np.ndarray], np.ndarray]  # (row modes, col modes)
    source: Optional[str] = None


@dataclass(frozen=True)
class RankSumTerm:
    u: Callable[[np.ndarray], np.ndarray]  # functional vector coefficients
    v: Callable[[np.ndarray], np.ndarray]  # value vector coefficients
    u_source: Optional[str] = None
    v_source: Optional[str] = None


@dataclass(frozen=True)
class RankSum:
    terms: tuple


@dataclass(frozen=True)
class DenseGenerator:
    entry: Callable[[np.ndarray, np.ndarray], np.ndarray]
    source: Optional[str] = None


@dataclass(frozen=True)
class CoefficientOperator:
    basis: Basis
    rep: object
    symmetric: bool = False
    name: str = ""

    # -- structure -----------------------------------------------------

    def position_bandwidth(self) -> Optional[int]:
        """Bandwidth in coefficient-slot order; None means full rows/columns."""
        if isinstance(self.rep, Diagonal):
            return 0
        if isinstance(self.rep, Banded):
            b = self.rep.bandwidth
            return 2 * b + 1 if self.basis is Basis.FOURIER else b
        return None

    def matrix(self, rows: int, cols: Optional[int] = None) -> np.ndarray:
        cols = rows if cols is None else cols
        mr = modes(self.basis, rows).astype(float)
        mc = modes(self.basis, cols).astype(float)
        rep = self.rep
        if isinstance(rep, Diagonal):
            out = np.zeros((rows, cols), dtype=complex)
            d = min(rows, cols)
            out[np.arange(d), np.arange(d)] = np.asarray(rep.values(mr[:d]), dtype=complex)
            return out
        if isinstance(rep, Banded):
            grid_r = mr[:, None]
            grid_c = mc[None, :]
            mask = np.abs(grid_r - grid_c) <= rep.bandwidth
            out = np.zeros((rows, cols), dtype=complex)
            vals = np.asarray(rep.entry(grid_r, grid_c), dtype=complex)
            out[mask] = vals[mask]
            return out
        if isinstance(rep, RankSum):
            out = np.zeros((rows, cols), dtype=complex)
            for term in rep.terms:
                out += np.outer(np.asarray(term.v(mr), dtype=complex),
                                np.conj(np.asarray(term.u(mc), dtype=complex)))
            return out
        if isinstance(rep, DenseGenerator):
            return np.asarray(rep.entry(mr[:, None], mc[None, :]), dtype=complex)
        raise TypeError(f"unknown representation {type(rep).__name__}")

    def row(self, i: int, cols: int) -> np.ndarray:
        return self.matrix(i + 1, cols)[i]

    def column(self, j: int, rows: int) -> np.ndarray:
        return self.matrix(rows, j + 1)[:, j]

    def adjoint(self) -> "CoefficientOperator":
        if self.symmetric:
            return self
        rep = self.rep
        if isinstance(rep, Diagonal):
            new = Diagonal(lambda m, f=rep.values: np.conj(f(m)),
                           source=f"conj({rep.source})" if rep.source else None)
        elif isinstance(rep, Banded):
            new = Banded(rep.bandwidth,
                         lambda mr, mc, f=rep.entry: np.conj(f(mc, mr)),
                         source=f"adj({rep.source})" if rep.source else None)
        elif isinstance(rep, RankSum):
            new = RankSum(tuple(RankSumTerm(t.v, t.u, t.v_source, t.u_source)
                                for t in rep.terms))
        elif isinstance(rep, DenseGenerator):
            new = DenseGenerator(lambda mr, mc, f=rep.entry: np.conj(f(mc, mr)),
                                 source=f"adj({rep.source})" if rep.source else None)
        else:
            raise TypeError(f"unknown representation {type(rep).__name__}")
        label = f"{self.name}^+" if self.name else ""
        return CoefficientOperator(self.basis, new, symmetric=False, name=label)

    def describe(self) -> str:
        kind = type(self.rep).__name__.lower()
        return self.name or f"{kind} operator on {self.basis.value} basis"


def sesq_form(x: CoefficientOperator, xi: CoefficientVector,
              eta: CoefficientVector) -> complex:
    """Sesquilinear form <X xi, eta> at the joint truncation."""
    check_same_basis(x, xi, eta)
    n = max(xi.n, eta.n)
    mat = x.matrix(n)
    return complex(np.conj(eta.padded(n)) @ (mat @ xi.padded(n)))


def apply_truncated(x: CoefficientOperator, v: CoefficientVector, rows: int) -> np.ndarray:
    """Apply the (rows x len(v)) section of X to the stored coefficients."""
    check_same_basis(x, v)
    return x.matrix(rows, v.n) @ v.coeffs


# ---------------------------------------------------------------------------
# continuity certificates


@dataclass(frozen=True)
class ContinuityCertificate:
    operator: str
    e: ScaleSpace
    f: ScaleSpace
    norm_bound: float
    method: str
    witness_n: int
    upper_bound: Optional[float] = None

    @property
    def certified(self) -> bool:
        return self.method in (CERT_EXACT, CERT_STABILIZED)

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "pair": [self.e.label, self.f.label],
            "norm_bound": self.norm_bound,
            "method": self.method,
            "witness_n": self.witness_n,
            "upper_bound": self.upper_bound,
        }


def _sup_with_growth_check(values: np.ndarray, growth_threshold: float):
    """Running max of |values| with a divergence verdict across checkpoints."""
    n = len(values)
    checkpoints = [max(16, n >> 6), max(32, n >> 3), n]
    mags = np.abs(values)
    maxima = [float(np.max(mags[:c])) for c in checkpoints]
    diverged = maxima[-1] >= growth_threshold * max(maxima[0], 1e-300)
    return maxima[-1], diverged


def weighted_norm_series(vec_fn: Callable[[np.ndarray], np.ndarray], space: ScaleSpace,
                         cfg: RunConfig = DEFAULT_CONFIG):
    """Norm of an infinite coefficient vector in ``space`` by partial sums.

    Returns (value, verdict) with verdict in {"converged", "diverged",
    "inconclusive"}. Convergence adds a geometric tail estimate from the
    last two partial-sum increments.
    """
    n = 256
    m = modes(space.basis, n)
    total = float(np.sum(np.abs(vec_fn(m)) ** 2 * space.weight_at(m) ** 2))
    increments = []
    while n < cfg.symbol_probe:
        m_new = modes(space.basis, 2 * n)[n:]
        inc = float(np.sum(np.abs(vec_fn(m_new)) ** 2 * space.weight_at(m_new) ** 2))
        increments.append(inc)
        total += inc
        n *= 2
        if len(increments) >= 2:
            prev, last = increments[-2], increments[-1]
            if last <= 1e-18 * max(total, 1.0):
                return math.sqrt(total), "converged"
            rho = last / prev if prev > 0 else 0.0
            if rho < 0.75:
                tail = last * rho / (1.0 - rho)
                if tail <= cfg.rel_tol * total:
                    return math.sqrt(total + tail), "converged"
            if len(increments) >= 3 and last >= prev and increments[-3] <= prev:
                if total >= cfg.growth_threshold * max(total - prev - last, 1e-300):
                    return float("inf"), "diverged"
    return math.sqrt(total), "inconclusive"


def _weighted_section(x: CoefficientOperator, e: ScaleSpace, f: ScaleSpace,
                      rows: int, cols: int) -> np.ndarray:
    mat = x.matrix(rows, cols)
    wf = f.weights(rows)
    we = e.weights(cols)
    return mat * wf[:, None] / we[None, :]


def truncated_norm_estimates(x: CoefficientOperator, e: ScaleSpace, f: ScaleSpace,
                             n_list: Sequence[int],
                             cfg: RunConfig = DEFAULT_CONFIG) -> list:
    """Largest singular value of the weighted tall section at each truncation."""
    from .sections import operator_norm_estimate
    return [operator_norm_estimate(x, e, f, n, cfg) for n in n_list]


def certify(x: CoefficientOperator, e: ScaleSpace, f: ScaleSpace,
            cfg: RunConfig = DEFAULT_CONFIG) -> ContinuityCertificate:
    """Certify (or refute, or give up on) membership of X in C(E, F)."""
    check_same_basis(x, e, f)
    rep = x.rep

    if isinstance(rep, Diagonal):
        m = modes(x.basis, cfg.symbol_probe)
        vals = np.asarray(rep.values(m), dtype=complex)
        ratio = f.weights(cfg.symbol_probe) / e.weights(cfg.symbol_probe)
        bound, diverged = _sup_with_growth_check(vals * ratio, cfg.growth_threshold)
        if diverged:
            return ContinuityCertificate(x.describe(), e, f, float("inf"),
                                         CERT_FAILED, cfg.symbol_probe)
        return ContinuityCertificate(x.describe(), e, f, bound, CERT_EXACT,
                                     cfg.symbol_probe)

    if isinstance(rep, RankSum):
        e_dual = dual_space(e)
        term_norms = []
        for term in rep.terms:
            nu, verdict_u = weighted_norm_series(term.u, e_dual, cfg)
            nv, verdict_v = weighted_norm_series(term.v, f, cfg)
            if "diverged" in (verdict_u, verdict_v):
                term_norms.append(float("inf"))
            elif "inconclusive" in (verdict_u, verdict_v):
                term_norms.append(float("nan"))
            else:
                term_norms.append(nu * nv)
        if len(rep.terms) == 1:
            value = term_norms[0]
            if math.isinf(value):
                return ContinuityCertificate(x.describe(), e, f, float("inf"),
                                             CERT_FAILED, cfg.symbol_probe)
            if not math.isnan(value):
                return ContinuityCertificate(x.describe(), e, f, value,
                                             CERT_EXACT, cfg.symbol_probe)
        upper = float("inf") if any(math.isinf(t) or math.isnan(t) for t in term_norms) \
            else float(sum(term_norms))
        cert = _certify_by_truncation(x, e, f, cfg)
        return replace(cert, upper_bound=upper)

    return _certify_by_truncation(x, e, f, cfg)


def _certify_by_truncation(x: CoefficientOperator, e: ScaleSpace, f: ScaleSpace,
                           cfg: RunConfig) -> ContinuityCertificate:
    history = []
    n = cfg.n0
    while n <= cfg.n_max:
        history.append((n, truncated_norm_estimates(x, e, f, [n], cfg)[0]))
        if len(history) >= 2:
            (_, prev), (_, last) = history[-2], history[-1]
            if abs(last - prev) <= cfg.rel_tol * max(abs(last), 1e-300):
                return ContinuityCertificate(x.describe(), e, f, last,
                                             CERT_STABILIZED, n)
        if len(history) >= 4 and history[-1][1] >= cfg.growth_threshold * history[-4][1]:
            return ContinuityCertificate(x.describe(), e, f, float("inf"),
                                         CERT_FAILED, n)
        n *= 2
    return ContinuityCertificate(x.describe(), e, f, history[-1][1],
                                 CERT_INCONCLUSIVE, history[-1][0])


# ---------------------------------------------------------------------------
# partial product


def find_product_triple(x: CoefficientOperator, y: CoefficientOperator,
                        family: ScaleFamily, cfg: RunConfig = DEFAULT_CONFIG,
                        certifier=certify):
    """First admissible (E, F, G) with Y in C(E, F) and X in C(F, G)."""
    check_same_basis(x, y, *family.spaces)
    cache = {}

    def cert(op, a, b):
        key = (id(op), a.index, b.index)
        if key not in cache:
            cache[key] = certifier(op, a, b, cfg)
        return cache[key]

    for f_mid in family:
        for e in family:
            if not cert(y, e, f_mid).certified:
                continue
            for g in family:
                if cert(x, f_mid, g).certified:
                    return e, f_mid, g
    return None


def framework_product(x: CoefficientOperator, y: CoefficientOperator,
                      family: ScaleFamily, cfg: RunConfig = DEFAULT_CONFIG) -> CoefficientOperator:
    """Partial product X . Y relative to the family; may be undefined.

    The returned operator generates entries of the truncated matrix product
    with a fixed, deterministic inner cutoff, so the result does not depend
    on which admissible triple was found.
    """
    triple = find_product_triple(x, y, family, cfg)
    if triple is None:
        raise ProductUndefinedError(
            f"product undefined in family: no admissible interspace triple for "
            f"{x.describe()} . {y.describe()}")
    basis = x.basis
    cutoff = cfg.product_cutoff

    def _positions(m_flat: np.ndarray) -> np.ndarray:
        from .spaces import mode_to_position
        return mode_to_position(basis, np.asarray(m_flat).astype(int))

    def entry(mr, mc):
        # entry (i, j) sums over max(cutoff, 2 (max(i, j) + 1)) inner slots,
        # a pure function of (i, j); whole-grid calls become one matmul
        shape = np.broadcast_shapes(np.shape(mr), np.shape(mc))
        i_all = _positions(np.broadcast_to(mr, shape).ravel())
        j_all = _positions(np.broadcast_to(mc, shape).ravel())
        top = int(max(i_all.max(), j_all.max()))
        if 2 * (top + 1) <= cutoff:
            block = x.matrix(top + 1, cutoff) @ y.matrix(cutoff, top + 1)
            return block[i_all, j_all].reshape(shape)
        out = np.empty(i_all.shape, dtype=complex)
        for idx, (i, j) in enumerate(zip(i_all, j_all)):
            k = max(cutoff, 2 * (int(max(i, j)) + 1))
            out[idx] = x.row(int(i), k) @ y.column(int(j), k)
        return out.reshape(shape)

    name = f"({x.describe()}).({y.describe()})"
    return CoefficientOperator(basis, DenseGenerator(entry), symmetric=False, name=name)


# ---------------------------------------------------------------------------
# JSON operator specs


def operator_from_spec(spec: dict) -> CoefficientOperator:
    basis = Basis.parse(spec.get("basis", "hermite"))
    rep_spec = spec.get("rep", {})
    kind = rep_spec.get("type")
    symmetric = bool(spec.get("symmetric", False))
    name = spec.get("name", "")
    if kind == "diagonal":
        source = rep_spec["symbol"]
        fn = compile_expression(source, ("n",))
        rep = Diagonal(lambda m, f=fn: f(np.asarray(m, dtype=float)), source=source)
    elif kind == "banded":
        source = rep_spec["entry"]
        bandwidth = int(rep_spec["bandwidth"])
        fn = compile_expression(source, ("n", "m"))
        rep = Banded(bandwidth, lambda mr, mc, f=fn: f(mr, mc), source=source)
    elif kind == "ranksum":
        terms = []
        for term in rep_spec.get("terms", []):
            terms.append(RankSumTerm(_term_vector(term["u"]), _term_vector(term["v"]),
                                     u_source=str(term["u"]), v_source=str(term["v"])))
        rep = RankSum(tuple(terms))
    elif kind == "dense":
        source = rep_spec["entry"]
        fn = compile_expression(source, ("n", "m"))
        rep = DenseGenerator(lambda mr, mc, f=fn: f(mr, mc), source=source)
    else:
        raise SpecParseError(f"unknown operator rep type {kind!r}")
    return CoefficientOperator(basis, rep, symmetric=symmetric, name=name)


def _term_vector(spec) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(spec, dict) and spec.get("kind") == "ones":
        return lambda m: np.ones_like(np.asarray(m, dtype=float), dtype=complex)
    if isinstance(spec, dict) and spec.get("kind") == "point":
        theta = float(spec["theta"])
        return lambda m: np.exp(-1j * theta * np.asarray(m, dtype=float))
    if isinstance(spec, dict) and spec.get("kind") == "expr":
        fn = compile_expression(spec["source"], ("n",))
        return lambda m, f=fn: np.asarray(f(np.asarray(m, dtype=float)), dtype=complex)
    if isinstance(spec, (list, tuple)):
        values = np.asarray([complex(v) if not isinstance(v, (list, tuple))
                             else complex(v[0], v[1]) for v in spec])

        def coeff_vec(m, vals=values):
            m = np.asarray(m)
            out = np.zeros(m.shape, dtype=complex)
            # stored by coefficient slot, not by mode number
            idx = np.arange(len(out))
            take = idx < len(vals)
            out[take] = vals[idx[take]]
            return out
        return coeff_vec
    raise SpecParseError(f"cannot interpret rank-sum term vector {spec!r}")


def operator_from_json(path: str) -> CoefficientOperator:
    import json
    with open(path, encoding="utf-8") as handle:
        return operator_from_spec(json.load(handle))

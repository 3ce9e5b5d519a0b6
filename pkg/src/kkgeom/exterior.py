"""Alternating multilinear algebra over an N-dimensional coframe.

Forms are stored sparsely: a map from strictly increasing multi-indices to
coefficient arrays.  Scalar-valued forms have coefficient shape ``()``;
vector- and matrix-valued forms carry whatever ``value_shape`` they were
built with.  All operations are pure and the containers are treated as
immutable once constructed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegreeError, StructuralError
from .liealg import LieAlgebraSpec

__all__ = [
    "AlternatingForm",
    "wedge",
    "interior",
    "epsilon_form",
    "top_form",
    "basis_one_form",
    "lie_wedge_1",
    "lie_wedge_2",
    "d_substitute",
    "IdentityReport",
    "check_identities",
]


def _perm_sign_sorting(seq):
    """Sign of the permutation sorting ``seq``; 0 on repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class AlternatingForm:
    """A degree-``p`` alternating form on an ``N``-dimensional frame."""

    __slots__ = ("N", "degree", "value_shape", "coeffs")

    def __init__(self, N, degree, coeffs=None, value_shape=()):
        if not 0 <= degree <= N:
            raise DegreeError(f"degree {degree} outside 0..{N}")
        self.N = N
        self.degree = degree
        self.value_shape = tuple(value_shape)
        self.coeffs = {}
        for idx, value in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(not 0 <= i < N for i in idx):
                raise StructuralError(f"bad multi-index {idx} for degree {degree}, N={N}")
            if list(idx) != sorted(idx) or len(set(idx)) != degree:
                raise StructuralError(f"multi-index {idx} is not strictly increasing")
            value = np.asarray(value, dtype=float)
            if value.shape != self.value_shape:
                raise StructuralError(
                    f"coefficient shape {value.shape} does not match {self.value_shape}"
                )
            if np.any(value != 0.0):
                self.coeffs[idx] = value

    @classmethod
    def zero(cls, N, degree, value_shape=()):
        return cls(N, degree, {}, value_shape)

    def get(self, indices) -> np.ndarray:
        """Coefficient at an arbitrary index tuple, with the permutation sign."""
        sign = _perm_sign_sorting(indices)
        if sign == 0:
            return np.zeros(self.value_shape)
        value = self.coeffs.get(tuple(sorted(indices)))
        if value is None:
            return np.zeros(self.value_shape)
        return sign * value

    def is_zero(self, tol=0.0) -> bool:
        return all(np.all(np.abs(v) <= tol) for v in self.coeffs.values())

    def max_abs(self) -> float:
        if not self.coeffs:
            return 0.0
        return max(float(np.abs(v).max()) for v in self.coeffs.values())

    def __add__(self, other):
        self._check_compatible(other)
        out = {}
        for idx in set(self.coeffs) | set(other.coeffs):
            out[idx] = self.get_sorted(idx) + other.get_sorted(idx)
        return AlternatingForm(self.N, self.degree, out, self.value_shape)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self * (-1.0)

    def __mul__(self, scalar):
        return AlternatingForm(
            self.N,
            self.degree,
            {idx: scalar * v for idx, v in self.coeffs.items()},
            self.value_shape,
        )

    __rmul__ = __mul__

    def get_sorted(self, idx):
        return self.coeffs.get(idx, np.zeros(self.value_shape))

    def _check_compatible(self, other):
        if (
            not isinstance(other, AlternatingForm)
            or other.N != self.N
            or other.degree != self.degree
            or other.value_shape != self.value_shape
        ):
            raise StructuralError("incompatible forms")

    def equal_to(self, other, tol=0.0) -> bool:
        return (self - other).is_zero(tol)

    def component(self, selector) -> "AlternatingForm":
        """Scalar form extracted from a vector-valued one."""
        return AlternatingForm(
            self.N,
            self.degree,
            {idx: v[selector] for idx, v in self.coeffs.items()},
            (),
        )

    def dump(self) -> str:
        """One line per multi-index: "A1 A2 ... Ap : v1 ... vm" (1-based)."""
        lines = []
        for idx in sorted(self.coeffs):
            head = " ".join(str(i + 1) for i in idx)
            vals = " ".join(repr(float(x)) for x in np.atleast_1d(self.coeffs[idx]).ravel())
            lines.append(f"{head} : {vals}")
        return "\n".join(lines)

    def __repr__(self):
        return (
            f"AlternatingForm(N={self.N}, degree={self.degree}, "
            f"terms={len(self.coeffs)}, value_shape={self.value_shape})"
        )


def basis_one_form(N, A, value_shape=()):
    """The coordinate 1-form with index ``A`` (scalar coefficient 1)."""
    if value_shape != ():
        raise StructuralError("basis one-forms are scalar valued")
    return AlternatingForm(N, 1, {(A,): 1.0})


def top_form(N):
    """The volume form, coefficient +1 on (0, ..., N-1)."""
    return AlternatingForm(N, N, {tuple(range(N)): 1.0})


def wedge(alpha: AlternatingForm, beta: AlternatingForm) -> AlternatingForm:
    """Wedge product; one factor may be vector valued, not both."""
    if alpha.N != beta.N:
        raise StructuralError(f"frame dimensions differ: {alpha.N} vs {beta.N}")
    if alpha.value_shape != () and beta.value_shape != ():
        raise StructuralError("cannot wedge two vector-valued forms without a bracket")
    N = alpha.N
    degree = alpha.degree + beta.degree
    value_shape = alpha.value_shape or beta.value_shape
    if degree > N:
        return AlternatingForm.zero(N, N, value_shape)
    out = {}
    for ia, va in alpha.coeffs.items():
        sa = set(ia)
        for ib, vb in beta.coeffs.items():
            if sa & set(ib):
                continue
            merged = ia + ib
            sign = _perm_sign_sorting(merged)
            idx = tuple(sorted(merged))
            term = sign * (va * vb)
            if idx in out:
                out[idx] = out[idx] + term
            else:
                out[idx] = term
    return AlternatingForm(N, degree, out, value_shape)


def interior(v, alpha: AlternatingForm) -> AlternatingForm:
    """Interior product of a frame vector (length-N array) with ``alpha``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (alpha.N,):
        raise StructuralError(f"vector must have length {alpha.N}")
    if alpha.degree == 0:
        raise DegreeError("interior product needs degree >= 1")
    out = {}
    for idx, value in alpha.coeffs.items():
        for pos, A in enumerate(idx):
            if v[A] == 0.0:
                continue
            rest = idx[:pos] + idx[pos + 1 :]
            term = ((-1.0) ** pos) * v[A] * value
            if rest in out:
                out[rest] = out[rest] + term
            else:
                out[rest] = term
    return AlternatingForm(alpha.N, alpha.degree - 1, out, alpha.value_shape)


def frame_vector(N, A):
    v = np.zeros(N)
    v[A] = 1.0
    return v


def epsilon_form(N, fixed_indices) -> AlternatingForm:
    """The (N-k)-form built from the epsilon tensor with ``k`` fixed indices.

    Equals the iterated interior product of the corresponding frame vectors
    with the volume form; coefficients are always -1, 0 or +1.
    """
    fixed = tuple(fixed_indices)
    k = len(fixed)
    if not 1 <= k <= 3:
        raise DegreeError(f"supported numbers of fixed indices are 1..3, got {k}")
    if any(not 0 <= i < N for i in fixed):
        raise StructuralError(f"fixed indices {fixed} outside 0..{N - 1}")
    if len(set(fixed)) != k:
        return AlternatingForm.zero(N, N - k)
    rest = tuple(i for i in range(N) if i not in fixed)
    sign = _perm_sign_sorting(fixed + rest)
    return AlternatingForm(N, N - k, {rest: float(sign)})


def lie_wedge_1(spec: LieAlgebraSpec, theta: AlternatingForm) -> AlternatingForm:
    """Bracket-wedge of an algebra-valued 1-form with itself.

    ``out^A = c^A_BC theta^B /\\ theta^C`` with the algebra index as the
    coefficient vector slot.
    """
    N = spec.N
    if theta.degree != 1 or theta.value_shape != (N,):
        raise StructuralError("theta must be an algebra-valued 1-form")
    if theta.N != N:
        raise StructuralError(f"frame dimension {theta.N} does not match algebra dimension {N}")
    # dense matrix of components: theta[B, i] = coefficient of basis form i
    mat = np.zeros((N, theta.N))
    for (i,), value in theta.coeffs.items():
        mat[:, i] = value
    out = {}
    for i, j in combinations(range(theta.N), 2):
        pair = np.einsum("abc,b,c->a", spec.c, mat[:, i], mat[:, j]) - np.einsum(
            "abc,b,c->a", spec.c, mat[:, j], mat[:, i]
        )
        if np.any(pair != 0.0):
            out[(i, j)] = pair
    return AlternatingForm(theta.N, 2, out, (N,))


def lie_wedge_2(spec: LieAlgebraSpec, phi: AlternatingForm, tol: float = 1e-10) -> AlternatingForm:
    """Bracket-wedge of an so(h)-valued 1-form with itself.

    ``out^{AB} = 2 h_{A'B'} phi^{AA'} /\\ phi^{B'B}``; input and output
    coefficients are antisymmetric matrices in the raised index pair.
    """
    N = spec.N
    if phi.degree != 1 or phi.value_shape != (N, N):
        raise StructuralError("phi must be a matrix-valued 1-form")
    for idx, value in phi.coeffs.items():
        if np.abs(value + value.T).max() > tol:
            raise StructuralError(f"phi coefficient at {idx} is not antisymmetric")
    h = spec.h
    mat = np.zeros((N, N, phi.N))
    for (i,), value in phi.coeffs.items():
        mat[:, :, i] = value
    out = {}
    for i, j in combinations(range(phi.N), 2):
        term = 2.0 * (
            np.einsum("pq,ap,qb->ab", h, mat[:, :, i], mat[:, :, j])
            - np.einsum("pq,ap,qb->ab", h, mat[:, :, j], mat[:, :, i])
        )
        if np.any(term != 0.0):
            out[(i, j)] = term
    return AlternatingForm(phi.N, 2, out, (N, N))


def d_substitute(alpha: AlternatingForm, dtheta) -> AlternatingForm:
    """Exterior derivative of a constant-coefficient form, given ``d`` of each
    basis 1-form as the list of 2-forms ``dtheta``.

    Each basis monomial is differentiated by the Leibniz rule; the 2-form
    substituted for a basis factor commutes past the remaining 1-forms.
    """
    N = alpha.N
    if len(dtheta) != N:
        raise StructuralError(f"need {N} substituted 2-forms, got {len(dtheta)}")
    out = AlternatingForm.zero(N, alpha.degree + 1, alpha.value_shape)
    for idx, value in alpha.coeffs.items():
        for pos, A in enumerate(idx):
            rest = idx[:pos] + idx[pos + 1 :]
            monomial = AlternatingForm(N, alpha.degree - 1, {rest: ((-1.0) ** pos) * value},
                                       alpha.value_shape)
            out = out + wedge(dtheta[A], monomial)
    return out


@dataclass(frozen=True)
class IdentityReport:
    N: int
    trials: int
    residuals: dict  # identity name -> max residual

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    def summary(self) -> str:
        lines = [f"coframe identity suite, N={self.N}, trials={self.trials}"]
        for name, res in self.residuals.items():
            lines.append(f"  {name}: max residual {res:.3e}")
        return "\n".join(lines)


def check_identities(N, trials=200, seed=0, exhaustive_limit=5) -> IdentityReport:
    """Verify the five structural identities tying the epsilon-built forms.

    Index-choice identities are checked exhaustively for ``N`` up to
    ``exhaustive_limit`` and on random draws above it; the two derivative
    identities substitute random integer-coefficient 2-forms for each
    ``d theta^B``.  In exact arithmetic all residuals are zero.
    """
    if N < 3:
        raise DegreeError("identity suite needs N >= 3")
    rng = np.random.default_rng(seed)
    vol = top_form(N)
    th = [basis_one_form(N, A) for A in range(N)]
    e1 = {A: epsilon_form(N, [A]) for A in range(N)}

    res = {name: 0.0 for name in (
        "theta^A /\\ theta^(N-1)",
        "theta^A /\\ theta^(N-2)",
        "theta^A /\\ theta^(N-3)",
        "d theta^(N-1) Leibniz",
        "d theta^(N-2) Leibniz",
    )}

    exhaustive = N <= exhaustive_limit
    if exhaustive:
        singles = [(A, Ap) for A in range(N) for Ap in range(N)]
        pairs = [(A, Ap, Bp) for A in range(N) for Ap in range(N) for Bp in range(N)]
        triples = [
            (A, Ap, Bp, Cp)
            for A in range(N)
            for Ap in range(N)
            for Bp in range(N)
            for Cp in range(N)
        ]
    else:
        singles = [tuple(rng.integers(0, N, 2)) for _ in range(trials)]
        pairs = [tuple(rng.integers(0, N, 3)) for _ in range(trials)]
        triples = [tuple(rng.integers(0, N, 4)) for _ in range(trials)]

    for A, Ap in singles:
        lhs = wedge(th[A], e1[Ap])
        rhs = vol if A == Ap else AlternatingForm.zero(N, N)
        res["theta^A /\\ theta^(N-1)"] = max(
            res["theta^A /\\ theta^(N-1)"], (lhs - rhs).max_abs()
        )

    for A, Ap, Bp in pairs:
        lhs = wedge(th[A], epsilon_form(N, [Ap, Bp]))
        rhs = AlternatingForm.zero(N, N - 1)
        if A == Bp:
            rhs = rhs + e1[Ap]
        if A == Ap:
            rhs = rhs - e1[Bp]
        res["theta^A /\\ theta^(N-2)"] = max(
            res["theta^A /\\ theta^(N-2)"], (lhs - rhs).max_abs()
        )

    for A, Ap, Bp, Cp in triples:
        lhs = wedge(th[A], epsilon_form(N, [Ap, Bp, Cp]))
        rhs = AlternatingForm.zero(N, N - 2)
        if A == Cp:
            rhs = rhs + epsilon_form(N, [Ap, Bp])
        if A == Bp:
            rhs = rhs + epsilon_form(N, [Cp, Ap])
        if A == Ap:
            rhs = rhs + epsilon_form(N, [Bp, Cp])
        res["theta^A /\\ theta^(N-3)"] = max(
            res["theta^A /\\ theta^(N-3)"], (lhs - rhs).max_abs()
        )

    # Leibniz identities, with integer random 2-forms standing in for d theta^B
    for _ in range(trials):
        beta = []
        for _B in range(N):
            coeffs = {}
            for i, j in combinations(range(N), 2):
                value = float(rng.integers(-3, 4))
                if value:
                    coeffs[(i, j)] = value
            beta.append(AlternatingForm(N, 2, coeffs))

        A = int(rng.integers(0, N))
        lhs = d_substitute(e1[A], beta)
        rhs = AlternatingForm.zero(N, N)
        for B in range(N):
            rhs = rhs + wedge(beta[B], epsilon_form(N, [A, B]))
        res["d theta^(N-1) Leibniz"] = max(res["d theta^(N-1) Leibniz"], (lhs - rhs).max_abs())

        A, B = (int(x) for x in rng.integers(0, N, 2))
        lhs = d_substitute(epsilon_form(N, [A, B]), beta)
        rhs = AlternatingForm.zero(N, N - 1)
        for C in range(N):
            rhs = rhs + wedge(beta[C], epsilon_form(N, [A, B, C]))
        res["d theta^(N-2) Leibniz"] = max(res["d theta^(N-2) Leibniz"], (lhs - rhs).max_abs())

    return IdentityReport(N=N, trials=trials, residuals=res)

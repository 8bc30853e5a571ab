"""Finite commutative function algebras C(X) and their transfer operators.

A partial self-map ``gamma`` of a finite point set X induces a
*-endomorphism of C(X) by pullback.  This module detects whether that
endomorphism admits a (nondegenerate, complete) transfer operator,
constructs the complete one when it exists, and packages the outcome in
a small report together with the partial-automorphism ideal data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

import numpy as np

from xprod.errors import ContractError, ValidationError

TOL = 1e-9

CLASS_NO_TRANSFER = "no-transfer"
CLASS_NONDEGENERATE_ONLY = "nondegenerate-only"
CLASS_COMPLETE = "complete"
CLASS_COMPLETE_ISOMETRIC = "complete-isometric"


@dataclass(frozen=True)
class PointSet:
    """Ordered finite point set; the spectrum of the algebra C(X)."""

    labels: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(f"unknown point label {label!r}") from None

    def __repr__(self) -> str:
        return f"PointSet({list(self.labels)!r})"


def make_algebra(labels: Iterable[str]) -> PointSet:
    """Validate a label list and build the point set of C(X)."""
    labels = tuple(str(x) for x in labels)
    if not labels:
        raise ValidationError("point set needs at least one label")
    if len(set(labels)) != len(labels):
        dup = sorted({x for x in labels if labels.count(x) > 1})
        raise ValidationError(f"duplicate point labels: {dup}")
    return PointSet(labels)


@dataclass(frozen=True)
class PartialMap:
    """Partial self-map gamma of a point set, stored as an image table.

    ``table[i]`` is the image index of point ``i`` or ``None`` when
    ``i`` lies outside the domain.
    """

    table: tuple[Optional[int], ...]

    @staticmethod
    def from_pairs(x: PointSet, pairs: Mapping[str, str]) -> "PartialMap":
        table: list[Optional[int]] = [None] * x.size
        for src, dst in pairs.items():
            table[x.index(src)] = x.index(dst)
        return PartialMap(tuple(table))

    def validate(self, x: PointSet) -> None:
        if len(self.table) != x.size:
            raise ValidationError(
                f"map table has {len(self.table)} entries, point set has {x.size}"
            )
        for i, j in enumerate(self.table):
            if j is not None and not (0 <= j < x.size):
                raise ValidationError(f"image of point {i} out of range: {j}")

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(i for i, j in enumerate(self.table) if j is not None)

    @property
    def image_set(self) -> frozenset[int]:
        return frozenset(j for j in self.table if j is not None)

    def __call__(self, i: int) -> int:
        j = self.table[i]
        if j is None:
            raise ContractError(f"point {i} outside the map domain")
        return j

    def defined_at(self, i: int) -> bool:
        return self.table[i] is not None

    def preimages(self, j: int) -> tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.table) if k == j)

    def injective_on_domain(self) -> bool:
        dom = self.domain
        return len({self.table[i] for i in dom}) == len(dom)

    def iterated_domain(self, n: int) -> frozenset[int]:
        """Domain of gamma^n, computed by repeated preimage."""
        if n < 0:
            raise ValidationError("iteration depth must be >= 0")
        current = frozenset(range(len(self.table)))
        for _ in range(n):
            current = frozenset(
                i for i in self.domain if self.table[i] in current
            )
            if not current:
                break
        return current

    def iterated_image(self, n: int) -> frozenset[int]:
        """Image gamma^n(domain of gamma^n)."""
        pts = self.iterated_domain(n)
        for _ in range(n):
            pts = frozenset(self.table[i] for i in pts)
        return pts


@dataclass(frozen=True)
class FunElement:
    """Element of C(X): a complex value per point, dense."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @staticmethod
    def zero(size: int) -> "FunElement":
        return FunElement(np.zeros(size, dtype=complex))

    @staticmethod
    def one(size: int) -> "FunElement":
        return FunElement(np.ones(size, dtype=complex))

    @staticmethod
    def point_mass(size: int, i: int) -> "FunElement":
        v = np.zeros(size, dtype=complex)
        v[i] = 1.0
        return FunElement(v)

    @staticmethod
    def indicator(size: int, points: Iterable[int]) -> "FunElement":
        v = np.zeros(size, dtype=complex)
        for i in points:
            v[i] = 1.0
        return FunElement(v)

    @property
    def size(self) -> int:
        return len(self.values)

    def __add__(self, other: "FunElement") -> "FunElement":
        return FunElement(self.values + other.values)

    def __sub__(self, other: "FunElement") -> "FunElement":
        return FunElement(self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, FunElement):
            return FunElement(self.values * other.values)
        return FunElement(self.values * complex(other))

    def __rmul__(self, scalar) -> "FunElement":
        return FunElement(self.values * complex(scalar))

    def __neg__(self) -> "FunElement":
        return FunElement(-self.values)

    def star(self) -> "FunElement":
        return FunElement(np.conj(self.values))

    def norm(self) -> float:
        """Sup norm, the C*-norm of C(X)."""
        return float(np.max(np.abs(self.values))) if self.size else 0.0

    def allclose(self, other: "FunElement", tol: float = TOL) -> bool:
        return bool(np.max(np.abs(self.values - other.values), initial=0.0) <= tol)

    def is_projection(self, tol: float = TOL) -> bool:
        return bool(np.all(np.abs(self.values * (self.values - 1.0)) <= tol))

    def __repr__(self) -> str:
        return f"FunElement({np.round(self.values, 6).tolist()})"


@dataclass(frozen=True)
class LinearMapOnA:
    """Linear map on C(X) as a size-by-size complex matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"linear map matrix must be square, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("linear map matrix has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def apply(self, a: FunElement) -> FunElement:
        return FunElement(self.matrix @ a.values)

    def __matmul__(self, other: "LinearMapOnA") -> "LinearMapOnA":
        return LinearMapOnA(self.matrix @ other.matrix)

    @staticmethod
    def identity(size: int) -> "LinearMapOnA":
        return LinearMapOnA(np.eye(size, dtype=complex))

    @staticmethod
    def zero(size: int) -> "LinearMapOnA":
        return LinearMapOnA(np.zeros((size, size), dtype=complex))


def endomorphism_from_map(x: PointSet, gamma: PartialMap) -> LinearMapOnA:
    """Pullback endomorphism: (delta a)(p) = a(gamma(p)) on the domain, else 0."""
    gamma.validate(x)
    m = np.zeros((x.size, x.size), dtype=complex)
    for i in gamma.domain:
        m[i, gamma(i)] = 1.0
    return LinearMapOnA(m)


def transfer_candidate(x: PointSet, gamma: PartialMap) -> LinearMapOnA:
    """Canonical transfer candidate: average over gamma-fibers.

    For injective gamma this is exactly the pullback along the inverse,
    extended by zero off the image; in general it is the uniform-weight
    fiber average, which is always a nondegenerate transfer operator for
    the pullback endomorphism.
    """
    gamma.validate(x)
    m = np.zeros((x.size, x.size), dtype=complex)
    for j in sorted(gamma.image_set):
        fiber = gamma.preimages(j)
        for i in fiber:
            m[j, i] = 1.0 / len(fiber)
    return LinearMapOnA(m)


def _positivity_by_matrix(mat: np.ndarray, tol: float) -> bool:
    # in the point basis a positive map of C(X) is exactly an
    # entrywise-nonnegative real matrix
    return bool(
        np.all(np.abs(mat.imag) <= tol) and np.all(mat.real >= -tol)
    )


def _positivity_by_samples(mat: np.ndarray, tol: float, n_samples: int, seed: int) -> bool:
    size = mat.shape[0]
    basis = np.eye(size)
    rng = np.random.default_rng(seed)
    samples = np.concatenate([basis, rng.random((n_samples, size))], axis=0)
    out = samples @ mat.T
    return bool(np.all(out.real >= -tol) and np.all(np.abs(out.imag) <= tol))


def check_transfer(
    delta: LinearMapOnA,
    candidate: LinearMapOnA,
    tol: float = TOL,
    seed: int = 0,
    n_samples: int = 100,
) -> bool:
    """Is ``candidate`` a positive linear map with the transfer identity?

    The identity L(delta(a) b) = a L(b) is checked on all pairs of
    point-mass basis elements; positivity is checked by the matrix
    criterion and re-checked on sampled nonnegative vectors.
    """
    if delta.size != candidate.size:
        raise ValidationError(
            f"dimension mismatch: delta on {delta.size} points, candidate on {candidate.size}"
        )
    mat = candidate.matrix
    pos_matrix = _positivity_by_matrix(mat, tol)
    pos_samples = _positivity_by_samples(mat, tol, n_samples, seed)
    assert pos_matrix == pos_samples, "positivity criteria disagree"
    if not pos_matrix:
        return False
    size = delta.size
    for i in range(size):
        delta_ei = delta.matrix[:, i]
        # columns j of both sides of L(delta(e_i) e_j) = e_i L(e_j)
        lhs = mat * delta_ei[None, :]
        rhs = np.zeros_like(mat)
        rhs[i, :] = mat[i, :]
        if np.max(np.abs(lhs - rhs), initial=0.0) > tol:
            return False
    return True


def _range_contained(inner: np.ndarray, outer: np.ndarray, tol: float) -> bool:
    """Column space of ``inner`` contained in column space of ``outer``."""
    if np.allclose(inner, 0.0, atol=tol):
        return True
    sol, residuals, rank, _ = np.linalg.lstsq(outer, inner, rcond=None)
    return bool(np.max(np.abs(outer @ sol - inner)) <= 1e-7)


def check_nondegenerate(
    delta: LinearMapOnA,
    transfer: LinearMapOnA,
    tol: float = TOL,
    assume_transfer: bool = False,
) -> tuple[bool, bool, bool]:
    """Evaluate the three equivalent nondegeneracy conditions.

    (i)   E = delta o transfer is a conditional expectation onto delta(A),
    (ii)  delta o transfer o delta = delta,
    (iii) delta(transfer(1)) = delta(1).

    The triple always agrees for a genuine transfer operator; this is
    asserted before returning.  ``assume_transfer`` skips re-running the
    transfer-operator precondition check when the caller just did it.
    """
    if not assume_transfer and not check_transfer(delta, transfer, tol=tol):
        raise ContractError("check_nondegenerate requires a valid transfer operator")
    d = delta.matrix
    l = transfer.matrix
    e = d @ l
    size = delta.size

    idempotent = bool(np.max(np.abs(e @ e - e)) <= tol)
    positive = _positivity_by_matrix(e, tol)
    fixes_range = bool(np.max(np.abs(e @ d - d)) <= tol)
    range_ok = _range_contained(e, d, tol)
    module_ok = True
    for i in range(size):
        dei = d[:, i]
        lhs = e * dei[None, :]
        rhs = dei[:, None] * e
        if np.max(np.abs(lhs - rhs), initial=0.0) > tol:
            module_ok = False
            break
    cond_i = idempotent and positive and fixes_range and range_ok and module_ok

    cond_ii = bool(np.max(np.abs(d @ l @ d - d)) <= tol)

    one = np.ones(size, dtype=complex)
    cond_iii = bool(np.max(np.abs(d @ (l @ one) - d @ one)) <= tol)

    assert cond_i == cond_ii == cond_iii, (
        "nondegeneracy conditions disagree: "
        f"(i)={cond_i} (ii)={cond_ii} (iii)={cond_iii}"
    )
    return cond_i, cond_ii, cond_iii


def is_hereditary_range(x: PointSet, gamma: PartialMap) -> bool:
    """Does delta(A) equal the corner delta(1) A delta(1)?

    Computed as a rank comparison of the pullback matrix against the
    size of the domain, and cross-checked against injectivity of gamma,
    which is equivalent on a finite point set.
    """
    gamma.validate(x)
    delta = endomorphism_from_map(x, gamma)
    dom = gamma.domain
    rank = int(np.linalg.matrix_rank(delta.matrix)) if len(dom) else 0
    by_rank = rank == len(dom)
    by_injectivity = gamma.injective_on_domain()
    assert by_rank == by_injectivity, "rank and injectivity criteria disagree"
    return by_rank


@dataclass(frozen=True)
class TransferReport:
    """Outcome of the transfer-operator analysis of one system."""

    is_transfer: bool
    is_nondegenerate: bool
    is_complete: bool
    is_hereditary_range: bool
    projection_P: Optional[FunElement]
    classification: str
    delta: LinearMapOnA
    delta_star: Optional[LinearMapOnA]
    failure_reason: Optional[str] = None


def complete_transfer(x: PointSet, gamma: PartialMap) -> TransferReport:
    """Classify the system and construct the complete transfer operator.

    When gamma is injective on its domain the unique complete transfer
    operator is the pullback along the inverse map; the report carries
    it together with the support projection P.  When gamma is not
    injective the range of the endomorphism is not hereditary, no
    complete transfer operator exists, and only the classification is
    reported.
    """
    gamma.validate(x)
    delta = endomorphism_from_map(x, gamma)
    candidate = transfer_candidate(x, gamma)
    hereditary = is_hereditary_range(x, gamma)

    is_transfer = check_transfer(delta, candidate)
    nondeg = (
        all(check_nondegenerate(delta, candidate, assume_transfer=True))
        if is_transfer
        else False
    )

    injective = gamma.injective_on_domain()
    is_complete = False
    delta_star = None
    projection = None
    reason = None
    if injective:
        delta_star = candidate
        # completeness identity, exact on 0/1 data:
        # delta(delta_star(a)) = delta(1) a delta(1) as matrices on C(X)
        d, l = delta.matrix, delta_star.matrix
        one = np.ones(x.size, dtype=complex)
        d1 = (d @ one).real
        lhs = d @ l
        rhs = np.diag(d1 * d1)
        is_complete = bool(np.array_equal(lhs, rhs))
        assert is_complete, "constructed transfer operator failed the completeness identity"
        projection = FunElement(l @ one)
        assert projection.is_projection(tol=0.0)
    else:
        reason = "hereditary range condition fails (gamma not injective on its domain)"

    if is_complete and gamma.image_set == frozenset(range(x.size)):
        classification = CLASS_COMPLETE_ISOMETRIC
    elif is_complete:
        classification = CLASS_COMPLETE
    elif nondeg:
        classification = CLASS_NONDEGENERATE_ONLY
    else:
        classification = CLASS_NO_TRANSFER

    if classification == CLASS_COMPLETE_ISOMETRIC:
        assert projection is not None and projection.allclose(
            FunElement.one(x.size), tol=0.0
        )

    return TransferReport(
        is_transfer=is_transfer,
        is_nondegenerate=nondeg,
        is_complete=is_complete,
        is_hereditary_range=hereditary,
        projection_P=projection,
        classification=classification,
        delta=delta,
        delta_star=delta_star,
        failure_reason=reason,
    )


@dataclass(frozen=True)
class PartialAutomorphismData:
    """Ideal chain of the partial automorphism induced by a complete system.

    ``domains[n-1]`` is D_n, the domain of the n-th iterate, and
    ``images[n-1]`` is D_{-n}, its image; ``theta_domains`` pairs them.
    """

    depth: int
    domains: tuple[frozenset[int], ...]
    images: tuple[frozenset[int], ...]
    delta_star_multiplicative: bool
    delta_one_central: bool

    @property
    def theta_domains(self) -> tuple[tuple[frozenset[int], frozenset[int]], ...]:
        return tuple(zip(self.domains, self.images))


def partial_automorphism_data(
    x: PointSet, gamma: PartialMap, depth: Optional[int] = None
) -> PartialAutomorphismData:
    """Iterated domain/image ideals D_n, D_{-n} of a complete system."""
    report = complete_transfer(x, gamma)
    if not report.is_complete:
        raise ContractError(
            "partial automorphism data requires a complete transfer operator; "
            f"classification is {report.classification!r}"
        )
    if depth is None:
        depth = x.size
    domains = tuple(gamma.iterated_domain(n) for n in range(1, depth + 1))
    images = tuple(gamma.iterated_image(n) for n in range(1, depth + 1))

    l = report.delta_star.matrix
    size = x.size
    multiplicative = True
    for i in range(size):
        for j in range(size):
            ei = np.zeros(size, dtype=complex)
            ej = np.zeros(size, dtype=complex)
            ei[i] = 1.0
            ej[j] = 1.0
            lhs = l @ (ei * ej)
            rhs = (l @ ei) * (l @ ej)
            if np.max(np.abs(lhs - rhs), initial=0.0) > TOL:
                multiplicative = False
    d1 = report.delta.matrix @ np.ones(size, dtype=complex)
    central = all(
        np.max(np.abs(d1 * v - v * d1), initial=0.0) <= TOL
        for v in np.eye(size, dtype=complex)
    )
    assert multiplicative and central
    return PartialAutomorphismData(
        depth=depth,
        domains=domains,
        images=images,
        delta_star_multiplicative=multiplicative,
        delta_one_central=central,
    )


def all_partial_maps(size: int):
    """Yield every partial self-map on ``size`` points (exhaustive sweeps)."""
    choices = [None] + list(range(size))
    table = [None] * size

    def rec(i: int):
        if i == size:
            yield PartialMap(tuple(table))
            return
        for c in choices:
            table[i] = c
            yield from rec(i + 1)

    yield from rec(0)

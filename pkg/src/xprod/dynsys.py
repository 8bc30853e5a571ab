"""Reversible extension of a finite partial dynamical system.

Points of the extension are backward orbits of gamma: finite sequences
(x_0, ..., x_N) with gamma(x_n) = x_{n-1}.  An orbit either terminates
(its tip has no preimage, so the sequence is padded by zeros) or is the
depth-N prefix of longer or infinite orbits, recorded as a cylinder.
The coefficient *-algebra lives on these orbits through the evaluation
morphism phi; its convolution product is implemented exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from xprod.errors import ContractError, ValidationError
from xprod.funalg import FunElement, PartialMap, PointSet, endomorphism_from_map

TOL = 1e-9


@dataclass(frozen=True)
class OrbitPoint:
    """One backward orbit, materialized to finite depth.

    ``terminated`` means the tip has no preimage, so the orbit is a
    genuine finite point (followed by zeros); otherwise the entries are
    a depth-N truncation of longer or infinite orbits.
    """

    entries: tuple[int, ...]
    terminated: bool

    @property
    def depth(self) -> int:
        return len(self.entries) - 1

    @property
    def head(self) -> int:
        return self.entries[0]

    def __repr__(self) -> str:
        kind = "term" if self.terminated else "cyl"
        return f"OrbitPoint({self.entries}, {kind})"


class DynSystem:
    """A point set with a partial self-map and the induced pullback."""

    def __init__(self, x: PointSet, gamma: PartialMap):
        gamma.validate(x)
        self.x = x
        self.gamma = gamma
        self._delta = endomorphism_from_map(x, gamma).matrix
        self._masks: dict[int, np.ndarray] = {}

    @property
    def size(self) -> int:
        return self.x.size

    def delta_matrix(self) -> np.ndarray:
        return self._delta

    def domain_mask(self, n: int) -> np.ndarray:
        """Indicator vector of the domain of gamma^n."""
        if n not in self._masks:
            mask = np.zeros(self.size, dtype=complex)
            for i in self.gamma.iterated_domain(n):
                mask[i] = 1.0
            mask.setflags(write=False)
            self._masks[n] = mask
        return self._masks[n]

    def delta_power(self, values: np.ndarray, n: int) -> np.ndarray:
        out = np.asarray(values, dtype=complex)
        for _ in range(n):
            out = self._delta @ out
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DynSystem)
            and self.x == other.x
            and self.gamma == other.gamma
        )

    def __repr__(self) -> str:
        return f"DynSystem({self.x!r}, {self.gamma.table!r})"


def orbit_points(x: PointSet, gamma: PartialMap, depth: int) -> list[OrbitPoint]:
    """Enumerate all orbits terminated by ``depth`` plus all depth cylinders.

    The result is ordered depth-first from the smallest head index, so
    it is deterministic; the two kinds together are pairwise distinct
    and determine every coefficient evaluation up to the given depth.
    """
    if depth < 0:
        raise ValidationError("enumeration depth must be >= 0")
    gamma.validate(x)
    out: list[OrbitPoint] = []

    prefix: list[int] = []

    def extend():
        tip = prefix[-1]
        pre = gamma.preimages(tip)
        if not pre:
            out.append(OrbitPoint(tuple(prefix), terminated=True))
            return
        if len(prefix) - 1 == depth:
            out.append(OrbitPoint(tuple(prefix), terminated=False))
            return
        for q in pre:
            prefix.append(q)
            extend()
            prefix.pop()

    for head in range(x.size):
        prefix = [head]
        extend()
    return out


def gamma_tilde(gamma: PartialMap, p: OrbitPoint) -> OrbitPoint:
    """Extend an orbit one step forward by prepending gamma(x_0)."""
    if not gamma.defined_at(p.head):
        raise ContractError(f"head point {p.head} outside the map domain")
    return OrbitPoint((gamma(p.head),) + p.entries, p.terminated)


def gamma_tilde_inv(p: OrbitPoint) -> OrbitPoint:
    """Drop the orbit head; inverse of gamma_tilde on its domain."""
    if len(p.entries) < 2:
        if p.terminated:
            raise ContractError("orbit terminates immediately, no second entry")
        raise ContractError("cylinder too shallow, no second entry materialized")
    return OrbitPoint(p.entries[1:], p.terminated)


def projection_phi(p: OrbitPoint) -> int:
    """Head coordinate of the orbit, the projection back onto X."""
    return p.head


class EStarElement:
    """Finitely supported coefficient sequence (a_0, a_1, ..., a_N).

    Coefficient a_n lives in the ideal of functions supported on the
    domain of gamma^n; construction projects onto that support and
    trims trailing zeros.
    """

    __slots__ = ("system", "coeffs")

    def __init__(self, system: DynSystem, coeffs):
        projected = []
        for n, c in enumerate(coeffs):
            v = np.asarray(
                c.values if isinstance(c, FunElement) else c, dtype=complex
            )
            if len(v) != system.size:
                raise ValidationError("coefficient length does not match point set")
            projected.append(v * system.domain_mask(n))
        while projected and not projected[-1].any():
            projected.pop()
        self.system = system
        self.coeffs = tuple(projected)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @staticmethod
    def zero(system: DynSystem) -> "EStarElement":
        return EStarElement(system, [])

    @staticmethod
    def unit(system: DynSystem) -> "EStarElement":
        return EStarElement(system, [np.ones(system.size)])

    @staticmethod
    def embed(system: DynSystem, a: FunElement) -> "EStarElement":
        return EStarElement(system, [a.values])

    def coeff(self, n: int) -> np.ndarray:
        if 0 <= n < len(self.coeffs):
            return self.coeffs[n]
        return np.zeros(self.system.size, dtype=complex)

    def __add__(self, other: "EStarElement") -> "EStarElement":
        n = max(len(self.coeffs), len(other.coeffs))
        return EStarElement(
            self.system, [self.coeff(k) + other.coeff(k) for k in range(n)]
        )

    def __sub__(self, other: "EStarElement") -> "EStarElement":
        n = max(len(self.coeffs), len(other.coeffs))
        return EStarElement(
            self.system, [self.coeff(k) - other.coeff(k) for k in range(n)]
        )

    def __rmul__(self, scalar) -> "EStarElement":
        return EStarElement(self.system, [complex(scalar) * c for c in self.coeffs])

    def star(self) -> "EStarElement":
        return EStarElement(self.system, [np.conj(c) for c in self.coeffs])

    def __repr__(self) -> str:
        return f"EStarElement(deg={self.degree})"


def estar_mul(a: EStarElement, b: EStarElement) -> EStarElement:
    """Convolution product of coefficient sequences.

    (a b)_n = a_n sum_{j=0..n} delta^j(b_{n-j})
            + b_n sum_{j=1..n} delta^j(a_{n-j})
    """
    if a.system != b.system:
        raise ContractError("operands built over different systems")
    sys_ = a.system
    n_max = max(a.degree, b.degree)
    if n_max < 0:
        return EStarElement.zero(sys_)
    out = []
    for n in range(n_max + 1):
        first = np.zeros(sys_.size, dtype=complex)
        for j in range(0, n + 1):
            first += sys_.delta_power(b.coeff(n - j), j)
        second = np.zeros(sys_.size, dtype=complex)
        for j in range(1, n + 1):
            second += sys_.delta_power(a.coeff(n - j), j)
        out.append(a.coeff(n) * first + b.coeff(n) * second)
    # supports stay inside the iterated domains by construction, so the
    # constructor projection is a no-op
    for n, raw in enumerate(out):
        assert np.array_equal(raw, raw * sys_.domain_mask(n))
    return EStarElement(sys_, out)


def phi_eval(a: EStarElement, p: OrbitPoint) -> complex:
    """Evaluate the coefficient sequence along one orbit."""
    if not p.terminated and p.depth < a.degree:
        raise ContractError(
            f"orbit materialized to depth {p.depth} but element has degree {a.degree}"
        )
    total = 0.0 + 0.0j
    for n in range(a.degree + 1):
        if n < len(p.entries):
            total += a.coeff(n)[p.entries[n]]
        # entries past a terminated orbit are zeros and contribute nothing
    return complex(total)


def estar_equal(a: EStarElement, b: EStarElement, tol: float = TOL) -> bool:
    """Equality in the coefficient algebra: phi agrees on every orbit."""
    depth = max(a.degree, b.degree, 0)
    pts = orbit_points(a.system.x, a.system.gamma, depth)
    return all(abs(phi_eval(a, p) - phi_eval(b, p)) <= tol for p in pts)

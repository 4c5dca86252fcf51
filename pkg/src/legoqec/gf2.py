"""Bit-packed GF(2) symplectic algebra for Pauli strings and check matrices.

Supports are Python ints used as bit vectors (bit i = qubit i), so popcounts
are machine-word fast for any n. In the symplectic representation a row is a
2n-bit int with the X half in bits 0..n-1 and the Z half in bits n..2n-1,
i.e. columns ordered X block first, then Z block.

Everything here is a value: operations return new objects and never mutate.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "PauliString",
    "CheckMatrix",
    "InconsistentPhase",
    "symplectic_product",
    "multiply",
    "multiply_phased",
    "rref",
    "rank",
    "row_space_contains",
    "identity_subgroup",
    "kernel_intersection",
    "restrict",
    "solve_restriction",
    "pure_type_subgroup",
]

_LABEL_TO_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_TO_LABEL = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


class InconsistentPhase(ValueError):
    """Raised when phase tracking produces -identity (or i*P) in a group."""


@dataclass(frozen=True)
class PauliString:
    """A phase-free n-qubit Pauli; a position with both bits set is Y."""

    n: int
    x: int
    z: int

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if not (0 <= self.x <= mask and 0 <= self.z <= mask):
            raise ValueError(f"support bits outside {self.n} qubits")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        x = z = 0
        for i, ch in enumerate(label):
            try:
                xb, zb = _LABEL_TO_BITS[ch]
            except KeyError:
                raise ValueError(f"bad Pauli character {ch!r}") from None
            x |= xb << i
            z |= zb << i
        return cls(len(label), x, z)

    def label(self) -> str:
        return "".join(
            _BITS_TO_LABEL[(self.x >> i) & 1, (self.z >> i) & 1] for i in range(self.n)
        )

    @property
    def weight_x(self) -> int:
        return self.x.bit_count()

    @property
    def weight_z(self) -> int:
        return self.z.bit_count()

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def symplectic(self) -> int:
        """2n-bit row: X half in low bits, Z half shifted by n."""
        return self.x | (self.z << self.n)

    @classmethod
    def from_symplectic(cls, v: int, n: int) -> "PauliString":
        mask = (1 << n) - 1
        return cls(n, v & mask, (v >> n) & mask)


def symplectic_product(a: PauliString, b: PauliString) -> int:
    """0 if a and b commute, 1 if they anticommute."""
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} != {b.n}")
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) & 1


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Phase-free product: componentwise XOR of supports."""
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} != {b.n}")
    return PauliString(a.n, a.x ^ b.x, a.z ^ b.z)


def _iexp(xa, za, xb, zb):
    """i-exponent (mod 4) of H(a)*H(b) relative to H(a*b).

    H(x,z) = i^{|x&z|} X^x Z^z is the Hermitian representative (Y = iXZ).
    Odd exponents occur exactly when a and b anticommute.
    """
    ya = (xa & za).bit_count()
    yb = (xb & zb).bit_count()
    yc = ((xa ^ xb) & (za ^ zb)).bit_count()
    return (ya + yb - yc + 2 * (za & xb).bit_count()) % 4


def multiply_phased(a: PauliString, sa: int, b: PauliString, sb: int):
    """Product of commuting signed Paulis; signs are (-1)^s bits."""
    e = _iexp(a.x, a.z, b.x, b.z)
    if e & 1:
        raise ValueError("signed product of anticommuting Paulis is not Hermitian")
    return multiply(a, b), (sa ^ sb ^ (e >> 1)) & 1


@dataclass(frozen=True)
class CheckMatrix:
    """Ordered list of Pauli rows on n qubits, optionally with row signs.

    phases is None in phase-free mode, else one (-1)^phase bit per row.
    """

    n: int
    rows: tuple[PauliString, ...]
    phases: tuple[int, ...] | None = None

    def __post_init__(self):
        for r in self.rows:
            if r.n != self.n:
                raise ValueError("row length does not match qubit count")
        if self.phases is not None and len(self.phases) != len(self.rows):
            raise ValueError("one phase bit per row required")

    @classmethod
    def from_labels(cls, labels, phases=None) -> "CheckMatrix":
        rows = tuple(PauliString.from_label(s) for s in labels)
        n = rows[0].n if rows else 0
        return cls(n, rows, None if phases is None else tuple(phases))

    def num_rows(self) -> int:
        return len(self.rows)

    def all_commuting(self) -> bool:
        rs = self.rows
        return all(
            symplectic_product(rs[i], rs[j]) == 0
            for i in range(len(rs))
            for j in range(i + 1, len(rs))
        )


def _eliminate(rows, n, col_order, phases=None):
    """Gaussian elimination on 2n-bit symplectic ints with a pivot column order.

    Returns (work rows, pivot columns, i-exponents mod 4 or None). Non-pivot
    rows end up zeroed at the bottom; phase exponents of intermediate rows may
    be odd (anti-Hermitian products), which callers validate on output rows.
    """
    mask = (1 << n) - 1
    work = list(rows)
    exps = None if phases is None else [2 * s for s in phases]
    pivots = []
    r = 0
    for col in col_order:
        bit = 1 << col
        pivot = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        if exps is not None:
            exps[r], exps[pivot] = exps[pivot], exps[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                if exps is not None:
                    vi, vr = work[i], work[r]
                    exps[i] = (
                        exps[i]
                        + exps[r]
                        + _iexp(vi & mask, vi >> n, vr & mask, vr >> n)
                    ) % 4
                work[i] ^= work[r]
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    if exps is not None:
        for i in range(r, len(work)):
            if work[i] == 0 and exps[i] != 0:
                raise InconsistentPhase("group contains -identity")
    return work, pivots, exps


def _export_phases(exps, indices):
    if exps is None:
        return None
    out = []
    for i in indices:
        e = exps[i] % 4
        if e & 1:
            raise InconsistentPhase("non-Hermitian row in group basis")
        out.append(e >> 1)
    return tuple(out)


def rref(m: CheckMatrix) -> tuple[CheckMatrix, int]:
    """Reduced row echelon form over the 2n symplectic columns (X block first).

    Idempotent, row-space preserving; zero rows are dropped.
    """
    ints = [r.symplectic() for r in m.rows]
    work, pivots, exps = _eliminate(ints, m.n, range(2 * m.n), phases=m.phases)
    k = len(pivots)
    rows = tuple(PauliString.from_symplectic(v, m.n) for v in work[:k])
    return CheckMatrix(m.n, rows, _export_phases(exps, range(k))), k


def rank(m: CheckMatrix) -> int:
    return rref(m)[1]


def row_space_contains(m: CheckMatrix, p: PauliString) -> bool:
    base = [r.symplectic() for r in m.rows]
    _, pivots, _ = _eliminate(base, m.n, range(2 * m.n))
    _, aug_pivots, _ = _eliminate(base + [p.symplectic()], m.n, range(2 * m.n))
    return len(aug_pivots) == len(pivots)


def identity_subgroup(m: CheckMatrix, legs) -> CheckMatrix:
    """Basis of the row-space subgroup acting as identity on the given qubits.

    Rows keep full width n; legs are 0-based qubit indices.
    """
    legs = sorted(set(legs))
    constrained = [c for leg in legs for c in (leg, m.n + leg)]
    rest = [c for c in range(2 * m.n) if c not in set(constrained)]
    ints = [r.symplectic() for r in m.rows]
    work, pivots, exps = _eliminate(ints, m.n, constrained + rest, phases=m.phases)
    cset = set(constrained)
    lo = sum(1 for c in pivots if c in cset)
    hi = len(pivots)
    rows = tuple(PauliString.from_symplectic(work[i], m.n) for i in range(lo, hi))
    return CheckMatrix(m.n, rows, _export_phases(exps, range(lo, hi)))


def restrict(m: CheckMatrix, keep) -> CheckMatrix:
    """Project rows onto the kept qubits (ascending order)."""
    keep = sorted(set(keep))
    n_new = len(keep)
    rows = []
    for r in m.rows:
        x = z = 0
        for j, q in enumerate(keep):
            x |= ((r.x >> q) & 1) << j
            z |= ((r.z >> q) & 1) << j
        rows.append(PauliString(n_new, x, z))
    return CheckMatrix(n_new, tuple(rows), m.phases)


def kernel_intersection(m: CheckMatrix, legs) -> CheckMatrix:
    """Subgroup of the row space trivial on `legs`, restricted to the rest."""
    legs = sorted(set(legs))
    sub = identity_subgroup(m, legs)
    keep = [q for q in range(m.n) if q not in set(legs)]
    return restrict(sub, keep)


def solve_restriction(m: CheckMatrix, legs, target: PauliString) -> PauliString | None:
    """Find a row-space element whose restriction to `legs` equals target.

    legs are 0-based qubit indices taken in ascending order as target's
    qubits; the element is unconstrained elsewhere. Returns None when no
    solution exists. Phases are ignored.
    """
    legs = sorted(set(legs))
    nl = len(legs)
    if target.n != nl:
        raise ValueError("target length must match number of constrained legs")
    width = 2 * nl
    work = []
    for r in m.rows:
        head = 0
        for j, q in enumerate(legs):
            head |= ((r.x >> q) & 1) << j
            head |= ((r.z >> q) & 1) << (nl + j)
        work.append(head | (r.symplectic() << width))
    pivots = []
    rpos = 0
    for col in range(width):
        bit = 1 << col
        pivot = next((i for i in range(rpos, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[rpos], work[pivot] = work[pivot], work[rpos]
        for i in range(len(work)):
            if i != rpos and work[i] & bit:
                work[i] ^= work[rpos]
        pivots.append((col, rpos))
        rpos += 1
    need = target.x | (target.z << nl)
    acc = 0
    for col, i in pivots:
        if (need >> col) & 1:
            acc ^= work[i]
    if acc & ((1 << width) - 1) != need:
        return None
    return PauliString.from_symplectic(acc >> width, m.n)


def nullspace(rows, ncols: int) -> list[int]:
    """Basis of {v : v . r = 0 mod 2 for all r} over ncols-bit ints."""
    work = list(rows)
    pivots = []
    r = 0
    for col in range(ncols):
        bit = 1 << col
        pivot = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
        pivots.append(col)
        r += 1
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v = 1 << f
        for row, col in zip(work[:r], pivots):
            if (row >> f) & 1:
                v |= 1 << col
        basis.append(v)
    return basis


def normalizer_basis(m: CheckMatrix) -> list[PauliString]:
    """Basis of all Paulis commuting with every row of m."""
    n = m.n
    mask = (1 << n) - 1
    twisted = [(r.z | (r.x << n)) for r in m.rows]
    return [PauliString(n, v & mask, (v >> n) & mask) for v in nullspace(twisted, 2 * n)]


def pure_type_subgroup(m: CheckMatrix, kind: str) -> CheckMatrix:
    """Basis of the pure-X (kind='X') or pure-Z row-space elements."""
    if kind not in ("X", "Z"):
        raise ValueError("kind must be 'X' or 'Z'")
    n = m.n
    if kind == "X":
        order = list(range(n, 2 * n)) + list(range(n))
        unwanted = set(range(n, 2 * n))
    else:
        order = list(range(n)) + list(range(n, 2 * n))
        unwanted = set(range(n))
    ints = [r.symplectic() for r in m.rows]
    work, pivots, _ = _eliminate(ints, n, order)
    lo = sum(1 for c in pivots if c in unwanted)
    rows = tuple(PauliString.from_symplectic(work[i], n) for i in range(lo, len(pivots)))
    return CheckMatrix(n, rows)

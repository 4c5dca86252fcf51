"""Lego blocks, tensor networks, Bell-projection contraction, and codes.

A lego is a stabilizer state on numbered legs; a network is a multiset of
legos plus contracted leg pairs. Global legs are numbered from 1 in insertion
order (lego i's legs follow lego i-1's). Contracting legs a and b augments
the combined group with X_aX_b and Z_aZ_b, keeps the subgroup trivial on
{a, b}, and restricts to the remaining legs; converting the resulting state
into a code assigns some legs as logical inputs and refactors the group into
stabilizers plus logical representative pairs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .gf2 import (
    CheckMatrix,
    InconsistentPhase,
    PauliString,
    identity_subgroup,
    multiply,
    normalizer_basis,
    pure_type_subgroup,
    rank,
    restrict,
    row_space_contains,
    rref,
    solve_restriction,
    symplectic_product,
)

__all__ = [
    "Lego",
    "TensorNetwork",
    "StabilizerCode",
    "ContractionInconsistent",
    "InvalidState",
    "t6",
    "gate_lego",
    "single_qubit_lego",
    "add_lego",
    "contract",
    "network_state",
    "to_code",
    "replay_script",
    "script_lines",
    "code_from_script",
]


class ContractionInconsistent(ValueError):
    """The contracted network does not define a stabilizer state."""


class InvalidState(ValueError):
    """The state group cannot be refactored into the requested code."""


@dataclass(frozen=True)
class Lego:
    """A block with numbered legs carrying a stabilizer state."""

    name: str
    num_legs: int
    state_group: CheckMatrix

    def __post_init__(self):
        if self.state_group.n != self.num_legs:
            raise ValueError("state group width must equal leg count")


def t6() -> Lego:
    """The 6-leg tensor of the self-dual [[4,2,2]] code.

    Legs 1-2 are the code's logical legs, 3-6 physical. Logical
    representatives are fixed as X1=X3X4, Z1=Z3Z5, X2=X3X5, Z2=Z3Z4.
    """
    return Lego(
        "T6",
        6,
        CheckMatrix.from_labels(
            ["IIXXXX", "IIZZZZ", "XIXXII", "ZIZIZI", "IXXIXI", "IZZZII"]
        ),
    )


def gate_lego(gate: str) -> Lego:
    """2-leg Choi-state lego of a single-qubit Clifford gate (H or S).

    Contracting leg 1 onto a network leg applies the gate, exposing leg 2.
    S carries a sign convention and therefore a phased state group.
    """
    if gate == "H":
        return Lego("H", 2, CheckMatrix.from_labels(["XZ", "ZX"]))
    if gate == "S":
        return Lego("S", 2, CheckMatrix.from_labels(["YX", "ZZ"], phases=[0, 0]))
    raise ValueError(f"unknown gate lego {gate!r}")


def single_qubit_lego(basis: str = "Z") -> Lego:
    """1-leg |0> (basis 'Z') or |+> (basis 'X') state lego."""
    if basis not in ("Z", "X"):
        raise ValueError("basis must be 'Z' or 'X'")
    return Lego(f"KET{basis}", 1, CheckMatrix.from_labels([basis]))


@dataclass(frozen=True)
class TensorNetwork:
    """Persistent value: legos in insertion order plus contracted edges."""

    legos: tuple[Lego, ...] = ()
    edges: tuple[tuple[int, int], ...] = ()

    @property
    def num_legs(self) -> int:
        return sum(l.num_legs for l in self.legos)

    def leg_offsets(self) -> list[int]:
        offs, total = [], 0
        for l in self.legos:
            offs.append(total)
            total += l.num_legs
        return offs

    def used_legs(self) -> set[int]:
        return {leg for e in self.edges for leg in e}

    def dangling_legs(self) -> list[int]:
        used = self.used_legs()
        return [leg for leg in range(1, self.num_legs + 1) if leg not in used]

    def owner_of(self, leg: int) -> int:
        """Index of the lego a global leg belongs to."""
        total = 0
        for i, l in enumerate(self.legos):
            total += l.num_legs
            if leg <= total:
                return i
        raise ValueError(f"leg {leg} out of range")

    def components(self) -> list[set[int]]:
        """Connected components as sets of lego indices."""
        parent = list(range(len(self.legos)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for a, b in self.edges:
            ra, rb = find(self.owner_of(a)), find(self.owner_of(b))
            if ra != rb:
                parent[ra] = rb
        groups = {}
        for i in range(len(self.legos)):
            groups.setdefault(find(i), set()).add(i)
        return list(groups.values())

    def same_component(self, a: int, b: int) -> bool:
        ia, ib = self.owner_of(a), self.owner_of(b)
        if ia == ib:
            return True
        for comp in self.components():
            if ia in comp:
                return ib in comp
        return False


def add_lego(net: TensorNetwork, lego: Lego) -> TensorNetwork:
    """Append a lego; its legs get the next consecutive global indices."""
    return replace(net, legos=net.legos + (lego,))


def contract(net: TensorNetwork, a: int, b: int) -> TensorNetwork:
    """Record the edge (a, b). Both legs must exist and be dangling.

    Null-state detection happens when the network is evaluated
    (network_state), since a recorded edge only constrains the state group.
    """
    if a == b:
        raise ValueError("cannot contract a leg with itself")
    total = net.num_legs
    for leg in (a, b):
        if not 1 <= leg <= total:
            raise ValueError(f"leg {leg} out of range 1..{total}")
    used = net.used_legs()
    for leg in (a, b):
        if leg in used:
            raise ValueError(f"leg {leg} is already contracted")
    return replace(net, edges=net.edges + ((a, b),))


def _combined_group(net: TensorNetwork) -> CheckMatrix:
    n = net.num_legs
    offs = net.leg_offsets()
    phased = any(l.state_group.phases is not None for l in net.legos)
    rows, phases = [], []
    for lego, off in zip(net.legos, offs):
        g = lego.state_group
        for i, r in enumerate(g.rows):
            rows.append(PauliString(n, r.x << off, r.z << off))
            phases.append(g.phases[i] if g.phases is not None else 0)
    for a, b in net.edges:
        pair = (1 << (a - 1)) | (1 << (b - 1))
        rows.append(PauliString(n, pair, 0))
        phases.append(0)
        rows.append(PauliString(n, 0, pair))
        phases.append(0)
    return CheckMatrix(n, tuple(rows), tuple(phases) if phased else None)


def network_state(net: TensorNetwork) -> CheckMatrix:
    """Stabilizer group of the state on the dangling legs.

    Raises ContractionInconsistent when the contractions over-constrain the
    state (anticommuting generators, wrong rank, or a -identity when phases
    are tracked).
    """
    combined = _combined_group(net)
    contracted = [leg - 1 for leg in sorted(net.used_legs())]
    try:
        sub = identity_subgroup(combined, contracted)
    except InconsistentPhase as exc:
        raise ContractionInconsistent(str(exc)) from exc
    keep = [q for q in range(net.num_legs) if q not in set(contracted)]
    state = restrict(sub, keep)
    reduced, r = rref(state)
    if r != len(keep) or not reduced.all_commuting():
        raise ContractionInconsistent(
            f"contracted network is not a stabilizer state (rank {r} on {len(keep)} legs)"
        )
    return reduced


@dataclass(frozen=True)
class StabilizerCode:
    """Check matrix, logical representative pairs, and code parameters."""

    n: int
    k: int
    stabilizer: CheckMatrix
    logical_x: tuple[PauliString, ...]
    logical_z: tuple[PauliString, ...]
    name: str = ""
    provenance: str = ""

    def __post_init__(self):
        if self.stabilizer.n != self.n:
            raise ValueError("stabilizer width mismatch")
        if len(self.logical_x) != self.k or len(self.logical_z) != self.k:
            raise ValueError("need one logical X/Z pair per logical qubit")

    def validate(self) -> None:
        """Check commutation structure and rank; raises InvalidState."""
        if not self.stabilizer.all_commuting():
            raise InvalidState("stabilizer generators do not commute")
        if len(self.stabilizer.rows) != self.n - self.k:
            raise InvalidState("stabilizer must list exactly n - k generators")
        if rank(self.stabilizer) != self.n - self.k:
            raise InvalidState("stabilizer rank must be n - k")
        logs = list(self.logical_x) + list(self.logical_z)
        for l in logs:
            for s in self.stabilizer.rows:
                if symplectic_product(l, s):
                    raise InvalidState("logical rep anticommutes with a stabilizer")
        for i in range(self.k):
            for j in range(self.k):
                want = 1 if i == j else 0
                if symplectic_product(self.logical_x[i], self.logical_z[j]) != want:
                    raise InvalidState("logical pairs lack symplectic structure")
                if i < j:
                    if symplectic_product(self.logical_x[i], self.logical_x[j]):
                        raise InvalidState("logical X reps must commute")
                    if symplectic_product(self.logical_z[i], self.logical_z[j]):
                        raise InvalidState("logical Z reps must commute")

    def is_css(self) -> bool:
        rx = len(pure_type_subgroup(self.stabilizer, "X").rows)
        rz = len(pure_type_subgroup(self.stabilizer, "Z").rows)
        return rx + rz == rank(self.stabilizer)


def _css_logical_pair(code: StabilizerCode) -> tuple[PauliString, PauliString] | None:
    """Pure-X / pure-Z logical representatives for a k=1 CSS code."""
    full = CheckMatrix(
        code.n, code.stabilizer.rows + (code.logical_x[0], code.logical_z[0])
    )
    found = {}
    for kind in ("X", "Z"):
        for p in pure_type_subgroup(full, kind).rows:
            if not row_space_contains(code.stabilizer, p):
                found[kind] = p
                break
    if "X" in found and "Z" in found:
        px, pz = found["X"], found["Z"]
        if symplectic_product(px, pz) == 1:
            return px, pz
    return None


def to_code(
    state: CheckMatrix,
    logical_legs,
    name: str = "",
    provenance: str = "",
) -> StabilizerCode:
    """Assign state legs (1-based) as logical inputs; the rest are physical.

    The stabilizer is the subgroup trivial on the logical legs restricted to
    the physical ones; logical X/Z pairs come from refactoring the remaining
    generators leg by leg. For k=1 CSS codes the representatives are
    canonicalized to pure X and pure Z type.
    """
    logical = sorted(set(logical_legs))
    m = state.n
    if any(not 1 <= leg <= m for leg in logical):
        raise ValueError("logical legs out of range")
    if len(logical) >= m and m > 0:
        raise ValueError("at least one physical leg required")
    if rank(state) != m:
        raise InvalidState("state group is not full rank")
    k = len(logical)
    l0 = [leg - 1 for leg in logical]
    phys = [q for q in range(m) if q not in set(l0)]
    stab = restrict(identity_subgroup(state, l0), phys)
    stab, r = rref(stab)
    if r != m - 2 * k:
        raise InvalidState(f"stabilizer rank {r}, expected {m - 2 * k}")
    lx, lz = [], []
    for idx in range(k):
        reps = []
        for kind in ("X", "Z"):
            target = PauliString(
                k,
                (1 << idx) if kind == "X" else 0,
                (1 << idx) if kind == "Z" else 0,
            )
            sol = solve_restriction(state, l0, target)
            if sol is None:
                raise InvalidState("cannot refactor logical representatives")
            reps.append(restrict(CheckMatrix(m, (sol,)), phys).rows[0])
        lx.append(reps[0])
        lz.append(reps[1])
    code = StabilizerCode(
        n=m - k,
        k=k,
        stabilizer=stab,
        logical_x=tuple(lx),
        logical_z=tuple(lz),
        name=name,
        provenance=provenance,
    )
    if k == 1 and code.is_css():
        pair = _css_logical_pair(code)
        if pair is not None:
            code = replace(code, logical_x=(pair[0],), logical_z=(pair[1],))
    code.validate()
    return code


def complete_logical_reps(stabilizer: CheckMatrix, k: int):
    """Derive logical X/Z representative pairs by symplectic completion.

    Returns (logical_x, logical_z) tuples of length k. The normalizer is the
    symplectic complement of the stabilizer; coset representatives modulo the
    stabilizer are paired by symplectic Gram-Schmidt.
    """
    n = stabilizer.n
    span_rows = [r.symplectic() for r in stabilizer.rows]

    def in_span(rows, v):
        work = list(rows)
        r = 0
        for col in range(2 * n):
            bit = 1 << col
            pivot = next((i for i in range(r, len(work)) if work[i] & bit), None)
            if pivot is None:
                continue
            work[r], work[pivot] = work[pivot], work[r]
            for i in range(len(work)):
                if i != r and work[i] & bit:
                    work[i] ^= work[r]
            r += 1
        acc = v
        for row in work[:r]:
            low = row & -row
            if acc & low:
                acc ^= row
        return acc == 0

    reps = []
    current = list(span_rows)
    for cand in normalizer_basis(stabilizer):
        if len(reps) == 2 * k:
            break
        if not in_span(current, cand.symplectic()):
            reps.append(cand)
            current.append(cand.symplectic())
    if len(reps) != 2 * k:
        raise InvalidState("could not complete logical representatives")
    pairs = []
    pool = list(reps)
    while pool:
        u = pool.pop(0)
        j = next(
            (i for i, w in enumerate(pool) if symplectic_product(u, w) == 1), None
        )
        if j is None:
            raise InvalidState("degenerate symplectic form on logical quotient")
        v = pool.pop(j)
        pool = [
            multiply(
                multiply(w, u if symplectic_product(w, v) else PauliString(u.n, 0, 0)),
                v if symplectic_product(w, u) else PauliString(u.n, 0, 0),
            )
            for w in pool
        ]
        pairs.append((u, v))
    return tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)


_SCRIPT_LEGOS = {"T6": t6, "H": lambda: gate_lego("H"), "S": lambda: gate_lego("S")}


def replay_script(records) -> tuple[TensorNetwork, list[int]]:
    """Replay move records; returns the network and chosen logical legs.

    Records are dicts (or JSON lines): {"op": "add", "lego": "T6"},
    {"op": "contract", "a": int, "b": int}, {"op": "logical", "leg": int}.
    """
    net = TensorNetwork()
    logical = []
    for rec in records:
        if isinstance(rec, str):
            rec = rec.strip()
            if not rec:
                continue
            rec = json.loads(rec)
        op = rec.get("op")
        if op == "add":
            lego_name = rec["lego"]
            if lego_name not in _SCRIPT_LEGOS:
                raise ValueError(f"unknown lego {lego_name!r}")
            net = add_lego(net, _SCRIPT_LEGOS[lego_name]())
        elif op == "contract":
            net = contract(net, int(rec["a"]), int(rec["b"]))
        elif op == "logical":
            logical.append(int(rec["leg"]))
        else:
            raise ValueError(f"unknown script op {op!r}")
    return net, logical


def script_lines(records) -> str:
    """Serialize move records as JSON lines (the provenance format)."""
    return "\n".join(json.dumps(r, sort_keys=True) for r in records) + "\n"


def code_from_script(records, name: str = "", provenance: str = "") -> StabilizerCode:
    """Replay a move script and convert the network into a code."""
    net, logical = replay_script(records)
    state = network_state(net)
    dangling = net.dangling_legs()
    by_global = {leg: i + 1 for i, leg in enumerate(dangling)}
    try:
        state_legs = [by_global[leg] for leg in logical]
    except KeyError as exc:
        raise InvalidState(f"logical leg {exc.args[0]} is contracted") from exc
    return to_code(state, state_legs, name=name, provenance=provenance)

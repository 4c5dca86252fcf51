"""Exact quantum weight enumerators and biased-noise logical error rates.

The stabilizer histogram A counts group elements by (X weight, Z weight,
total weight); the normalizer histogram B additionally ranges over logical
representatives. C = B - A counts the nontrivial logical operators, whose
weight distribution drives both the code distance and the probability that
i.i.d. biased Pauli noise implements an undetected logical operation:

    p_L      = sum_{wx,wz} C[wx,wz] px^wx (1-px)^(n-wx) pz^wz (1-pz)^(n-wz)
    p_{s=0}  = same sum over B
    p_L_norm = p_L / p_{s=0}

Enumeration walks subsets in Gray-code order (one generator multiply per
step) and can be partitioned into contiguous segments that merge
deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .gf2 import symplectic_product
from .lego import StabilizerCode

__all__ = [
    "DEFAULT_EXACT_CAP",
    "ExactModeTooLarge",
    "NormUndefined",
    "NoiseModel",
    "WeightHistogram",
    "enumerate_stabilizer",
    "enumerate_normalizer",
    "enumerate_normalizer_classified",
    "logical_weight_distribution",
    "macwilliams_double",
    "distances",
    "error_probabilities",
    "error_probabilities_exact",
    "sweep",
    "analyze",
    "CodeAnalysis",
]

DEFAULT_EXACT_CAP = 26
_COUNT_OVERFLOW_CAP = 62  # counts are documented to fit 64-bit integers


class ExactModeTooLarge(ValueError):
    """Exact enumeration would exceed the configured generator cap."""


class NormUndefined(ZeroDivisionError):
    """p_{s=0} vanished, so the normalized error rate is undefined."""


@dataclass(frozen=True)
class NoiseModel:
    """Independent per-qubit bit-flip (p_x) and phase-flip (p_z) rates."""

    p_x: float
    p_z: float

    def __post_init__(self):
        for name, p in (("p_x", self.p_x), ("p_z", self.p_z)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} outside [0, 1]")


@dataclass
class WeightHistogram:
    """Sparse counts keyed by (w_x, w_z, w_total)."""

    n: int
    entries: dict

    def total(self) -> int:
        return sum(self.entries.values())

    def double_marginal(self) -> dict:
        out = {}
        for (wx, wz, _), c in self.entries.items():
            out[(wx, wz)] = out.get((wx, wz), 0) + c
        return out

    def scalar_marginal(self) -> dict:
        out = {}
        for (_, _, wt), c in self.entries.items():
            out[wt] = out.get(wt, 0) + c
        return out

    def scalar_coefficients(self) -> list:
        """Dense total-weight counts, index = weight 0..n."""
        out = [0] * (self.n + 1)
        for w, c in self.scalar_marginal().items():
            out[w] += c
        return out

    def subtract(self, other: "WeightHistogram") -> "WeightHistogram":
        if self.n != other.n:
            raise ValueError("histogram size mismatch")
        diff = dict(self.entries)
        for key, c in other.entries.items():
            diff[key] = diff.get(key, 0) - c
        diff = {k: v for k, v in diff.items() if v != 0}
        if any(v < 0 for v in diff.values()):
            raise ValueError("subtraction produced negative counts")
        return WeightHistogram(self.n, diff)

    def validate_keys(self) -> None:
        for (wx, wz, wt) in self.entries:
            if not (max(wx, wz) <= wt <= min(self.n, wx + wz)):
                raise ValueError(f"impossible weight key ({wx}, {wz}, {wt})")

    def csv_rows(self, which: str):
        for (wx, wz, wt) in sorted(self.entries):
            yield wx, wz, wt, self.entries[(wx, wz, wt)], which


def _gens_as_ints(rows):
    return [(r.x, r.z) for r in rows]


def _check_caps(num_gens: int, n_plus_k: int, cap: int):
    if num_gens > cap:
        raise ExactModeTooLarge(
            f"{num_gens} generators exceeds exact-mode cap {cap}"
        )
    if n_plus_k > _COUNT_OVERFLOW_CAP:
        raise ExactModeTooLarge("counts would overflow 64-bit storage")


def _gray_state(gens, index):
    """Group element at a Gray-code position (subset index ^ (index >> 1))."""
    subset = index ^ (index >> 1)
    x = z = 0
    while subset:
        low = subset & -subset
        gx, gz = gens[low.bit_length() - 1]
        x ^= gx
        z ^= gz
        subset ^= low
    return x, z


def _enumerate_segment(gens, cls_bits, start, stop, sink):
    """Walk Gray positions [start, stop), calling sink(x, z, cls) per element."""
    x, z = _gray_state(gens, start)
    cls = 0
    subset = start ^ (start >> 1)
    while subset:
        low = subset & -subset
        cls ^= cls_bits[low.bit_length() - 1]
        subset ^= low
    sink(x, z, cls)
    for i in range(start + 1, stop):
        t = (i & -i).bit_length() - 1
        gx, gz = gens[t]
        x ^= gx
        z ^= gz
        cls ^= cls_bits[t]
        sink(x, z, cls)


def _segment_bounds(total: int, segments: int):
    segments = max(1, min(segments, total))
    step = total // segments
    bounds = [i * step for i in range(segments)] + [total]
    return bounds


def enumerate_group_classified(rows, n, logicals=(), segments=1):
    """Histograms of the group generated by `rows`, split by logical class.

    The class of an element packs its symplectic products with the given
    logical representatives (bit 2i: anticommutes with Z_i, bit 2i+1: with
    X_i); with no logicals everything lands in class 0. Segmented runs merge
    to the same result regardless of partitioning.
    """
    gens = _gens_as_ints(rows)
    if logicals:
        lx, lz = logicals
        cls_bits = []
        for r in rows:
            bits = 0
            for i in range(len(lx)):
                bits |= symplectic_product(r, lz[i]) << (2 * i)
                bits |= symplectic_product(r, lx[i]) << (2 * i + 1)
            cls_bits.append(bits)
    else:
        cls_bits = [0] * len(rows)
    per_class: dict = {}
    total = 1 << len(gens)
    bounds = _segment_bounds(total, segments)
    for start, stop in zip(bounds[:-1], bounds[1:]):
        local: dict = {}

        def sink(x, z, cls, local=local):
            key = (cls, x.bit_count(), z.bit_count(), (x | z).bit_count())
            local[key] = local.get(key, 0) + 1

        _enumerate_segment(gens, cls_bits, start, stop, sink)
        for (cls, wx, wz, wt), c in local.items():
            hist = per_class.setdefault(cls, {})
            hist[(wx, wz, wt)] = hist.get((wx, wz, wt), 0) + c
    return {cls: WeightHistogram(n, entries) for cls, entries in per_class.items()}


def enumerate_stabilizer(code: StabilizerCode, cap: int = DEFAULT_EXACT_CAP,
                         segments: int = 1) -> WeightHistogram:
    """The A histogram: all 2^(n-k) stabilizer group elements."""
    rows = code.stabilizer.rows
    _check_caps(len(rows), code.n + code.k, cap)
    out = enumerate_group_classified(rows, code.n, segments=segments)
    return out.get(0, WeightHistogram(code.n, {(0, 0, 0): 1}))


def enumerate_normalizer_classified(code: StabilizerCode,
                                    cap: int = DEFAULT_EXACT_CAP,
                                    segments: int = 1) -> dict:
    """Normalizer histograms split by logical class (class 0 = stabilizer)."""
    rows = code.stabilizer.rows + code.logical_x + code.logical_z
    _check_caps(len(code.stabilizer.rows), code.n + code.k, cap)
    return enumerate_group_classified(
        rows, code.n, logicals=(code.logical_x, code.logical_z), segments=segments
    )


def enumerate_normalizer(code: StabilizerCode, cap: int = DEFAULT_EXACT_CAP,
                         segments: int = 1) -> WeightHistogram:
    """The B histogram: all 2^(n+k) normalizer elements."""
    per_class = enumerate_normalizer_classified(code, cap, segments)
    merged: dict = {}
    for hist in per_class.values():
        for key, c in hist.entries.items():
            merged[key] = merged.get(key, 0) + c
    return WeightHistogram(code.n, merged)


def logical_weight_distribution(code: StabilizerCode,
                                cap: int = DEFAULT_EXACT_CAP) -> WeightHistogram:
    """C = B - A: weight counts of the nontrivial logical operators."""
    per_class = enumerate_normalizer_classified(code, cap)
    merged: dict = {}
    for cls, hist in per_class.items():
        if cls == 0:
            continue
        for key, c in hist.entries.items():
            merged[key] = merged.get(key, 0) + c
    out = WeightHistogram(code.n, merged)
    if out.entries.get((0, 0, 0), 0) != 0:
        raise ValueError("identity appeared as a nontrivial logical")
    return out


def _kravchuk_table(n: int):
    """kappa[m][c] = coefficient of z^c in (z-1)^m (z+1)^(n-m)."""
    table = []
    for m in range(n + 1):
        poly = [1]
        for _ in range(m):
            poly = [
                (poly[i - 1] if i else 0) - (poly[i] if i < len(poly) else 0)
                for i in range(len(poly) + 1)
            ]
        for _ in range(n - m):
            poly = [
                (poly[i - 1] if i else 0) + (poly[i] if i < len(poly) else 0)
                for i in range(len(poly) + 1)
            ]
        table.append(poly)
    return table


def macwilliams_double(a, k: int, n: int | None = None) -> dict:
    """Transform the A double marginal into the B double marginal.

    Accepts a WeightHistogram or a {(wx, wz): count} dict. All arithmetic is
    exact; a non-integer or negative result means the input was not a valid
    stabilizer enumerator.
    """
    if isinstance(a, WeightHistogram):
        marginal = a.double_marginal()
        n = a.n
    else:
        marginal = dict(a)
        if n is None:
            raise ValueError("n required when passing a plain marginal")
    kappa = _kravchuk_table(n)
    out = {}
    denom = 1 << (n - k)
    for bx in range(n + 1):
        for bz in range(n + 1):
            acc = 0
            for (wx, wz), c in marginal.items():
                acc += c * kappa[wx][bx] * kappa[wz][bz]
            if acc == 0:
                continue
            if acc % denom:
                raise ValueError("MacWilliams transform gave a non-integer count")
            value = acc // denom
            if value < 0:
                raise ValueError("MacWilliams transform gave a negative count")
            out[(bx, bz)] = value
    return out


@dataclass(frozen=True)
class CodeAnalysis:
    """One-pass exact summary: histograms, distances, class minima."""

    code: StabilizerCode
    a: WeightHistogram
    b: WeightHistogram
    c: WeightHistogram
    d: int
    d_x: int | None
    d_z: int | None


def _min_weight(hist: WeightHistogram, skip_identity=False):
    best = None
    for (_, _, wt), c in hist.entries.items():
        if c == 0 or (skip_identity and wt == 0):
            continue
        if best is None or wt < best:
            best = wt
    return best


def distances(code: StabilizerCode, cap: int = DEFAULT_EXACT_CAP):
    """(d, d_X, d_Z). Class-based distances are defined for k = 1 only.

    d_X is the minimum weight over the logical-X class (anticommutes with the
    Z representative, commutes with the X representative); d_Z symmetric. For
    k = 0, d is the minimum nonidentity stabilizer weight; for k > 1 only the
    total distance is reported.
    """
    if code.k == 0:
        a = enumerate_stabilizer(code, cap)
        return _min_weight(a, skip_identity=True), None, None
    per_class = enumerate_normalizer_classified(code, cap)
    d = None
    for cls, hist in per_class.items():
        if cls == 0:
            continue
        w = _min_weight(hist)
        if w is not None and (d is None or w < d):
            d = w
    if code.k != 1:
        return d, None, None
    d_x = _min_weight(per_class.get(0b01, WeightHistogram(code.n, {})))
    d_z = _min_weight(per_class.get(0b10, WeightHistogram(code.n, {})))
    if code.is_css():
        pure_x = min(
            (wt for (wx, wz, wt), c in per_class[0b01].entries.items() if wz == 0 and c),
            default=None,
        )
        pure_z = min(
            (wt for (wx, wz, wt), c in per_class[0b10].entries.items() if wx == 0 and c),
            default=None,
        )
        assert d_x == pure_x and d_z == pure_z, "CSS pure-type distance mismatch"
    return d, d_x, d_z


def _noise_weights(n, p, exact=False):
    one = Fraction(1) if exact else 1.0
    p = Fraction(p) if exact else float(p)
    q = one - p
    powers = []
    for w in range(n + 1):
        powers.append(p**w * q ** (n - w))
    return powers


def _marginal_probability(marginal, n, noise, exact=False):
    px = _noise_weights(n, noise.p_x, exact)
    pz = _noise_weights(n, noise.p_z, exact)
    terms = [c * px[wx] * pz[wz] for (wx, wz), c in marginal.items()]
    if exact:
        return sum(terms, Fraction(0))
    return math.fsum(terms)


def error_probabilities(code: StabilizerCode, noise: NoiseModel,
                        cap: int = DEFAULT_EXACT_CAP):
    """(p_L, p_{s=0}, p_L_norm) under independent biased Pauli noise."""
    per_class = enumerate_normalizer_classified(code, cap)
    b_marg: dict = {}
    c_marg: dict = {}
    for cls, hist in per_class.items():
        for (wx, wz, _), cnt in hist.entries.items():
            b_marg[(wx, wz)] = b_marg.get((wx, wz), 0) + cnt
            if cls != 0:
                c_marg[(wx, wz)] = c_marg.get((wx, wz), 0) + cnt
    p_l = _marginal_probability(c_marg, code.n, noise)
    p_s0 = _marginal_probability(b_marg, code.n, noise)
    if p_s0 == 0.0:
        raise NormUndefined("p_{s=0} = 0 at this noise point")
    return p_l, p_s0, p_l / p_s0


def error_probabilities_exact(code: StabilizerCode, noise: NoiseModel,
                              cap: int = DEFAULT_EXACT_CAP):
    """Rational-arithmetic twin of error_probabilities (small n only)."""
    per_class = enumerate_normalizer_classified(code, cap)
    b_marg: dict = {}
    c_marg: dict = {}
    for cls, hist in per_class.items():
        for (wx, wz, _), cnt in hist.entries.items():
            b_marg[(wx, wz)] = b_marg.get((wx, wz), 0) + cnt
            if cls != 0:
                c_marg[(wx, wz)] = c_marg.get((wx, wz), 0) + cnt
    p_l = _marginal_probability(c_marg, code.n, noise, exact=True)
    p_s0 = _marginal_probability(b_marg, code.n, noise, exact=True)
    if p_s0 == 0:
        raise NormUndefined("p_{s=0} = 0 at this noise point")
    return p_l, p_s0, p_l / p_s0


def analyze(code: StabilizerCode, cap: int = DEFAULT_EXACT_CAP) -> CodeAnalysis:
    """Single enumeration pass feeding histograms and distances."""
    per_class = enumerate_normalizer_classified(code, cap)
    a = per_class.get(0, WeightHistogram(code.n, {}))
    merged: dict = {}
    c_entries: dict = {}
    d = None
    d_x = d_z = None
    for cls, hist in per_class.items():
        for key, cnt in hist.entries.items():
            merged[key] = merged.get(key, 0) + cnt
            if cls != 0:
                c_entries[key] = c_entries.get(key, 0) + cnt
        if cls != 0:
            w = _min_weight(hist)
            if w is not None and (d is None or w < d):
                d = w
    if code.k == 1:
        d_x = _min_weight(per_class.get(0b01, WeightHistogram(code.n, {})))
        d_z = _min_weight(per_class.get(0b10, WeightHistogram(code.n, {})))
    b = WeightHistogram(code.n, merged)
    c = WeightHistogram(code.n, c_entries)
    return CodeAnalysis(code, a, b, c, d, d_x, d_z)


def sweep(code_a: StabilizerCode, code_b: StabilizerCode, px_values, pz_values,
          cap: int = DEFAULT_EXACT_CAP):
    """Error-rate grid for two codes; deltas are code_b minus code_a."""
    rows = []
    per_class_a = enumerate_normalizer_classified(code_a, cap)
    per_class_b = enumerate_normalizer_classified(code_b, cap)

    def marginals(per_class):
        b_m: dict = {}
        c_m: dict = {}
        for cls, hist in per_class.items():
            for (wx, wz, _), cnt in hist.entries.items():
                b_m[(wx, wz)] = b_m.get((wx, wz), 0) + cnt
                if cls != 0:
                    c_m[(wx, wz)] = c_m.get((wx, wz), 0) + cnt
        return b_m, c_m

    bm_a, cm_a = marginals(per_class_a)
    bm_b, cm_b = marginals(per_class_b)
    for px in px_values:
        for pz in pz_values:
            noise = NoiseModel(px, pz)
            pl_a = _marginal_probability(cm_a, code_a.n, noise)
            ps_a = _marginal_probability(bm_a, code_a.n, noise)
            pl_b = _marginal_probability(cm_b, code_b.n, noise)
            ps_b = _marginal_probability(bm_b, code_b.n, noise)
            norm_a = pl_a / ps_a if ps_a else float("nan")
            norm_b = pl_b / ps_b if ps_b else float("nan")
            rows.append(
                {
                    "p_x": px,
                    "p_z": pz,
                    "p_L_a": pl_a,
                    "p_L_norm_a": norm_a,
                    "p_L_b": pl_b,
                    "p_L_norm_b": norm_b,
                    "delta_p_L": pl_b - pl_a,
                    "delta_p_L_norm": norm_b - norm_a,
                }
            )
    return rows

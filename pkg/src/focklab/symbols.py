"""Symbol algebra: the catalog of operator symbols, translation, oscillation
estimates, atomic signed measures, and the text mini-language used by the CLI.

Symbols are immutable value objects; evaluation is pure and accepts numpy
arrays of points.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import SymbolParseError
from .fock import FockParams

__all__ = [
    "Constant", "Power", "Indicator", "PiecewiseConstant", "Rational",
    "Sampled", "Scaled", "RadialProfile",
    "Radial", "General", "WeylPhase", "Translated", "AtomicMeasure", "Symbol",
    "SignedAtomicMeasure",
    "profile_value", "profile_sup_norm", "profile_breakpoints", "profile_tail_limit",
    "evaluate", "translate", "sup_norm", "is_real_symbol",
    "vo_modulus", "hahn_jordan", "total_variation", "carleson_ball_bound",
    "parse_symbol", "format_symbol", "directional_clamp",
]


# ---------------------------------------------------------------------------
# radial profiles

@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Power:
    """Profile r^k for an even nonnegative exponent k."""

    exponent: int

    def __post_init__(self):
        if self.exponent < 0 or self.exponent % 2:
            raise ValueError(f"exponent must be even and >= 0, got {self.exponent}")


@dataclass(frozen=True)
class Indicator:
    """Characteristic function of the disc radius <= R."""

    radius: float

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError(f"radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class PiecewiseConstant:
    """Rings [r_{i-1}, r_i) carrying values v_i, constant tail beyond r_L.

    Ring and tail values are clamped to [-1, 1]: the ratio search is
    scale-free, so profiles are kept normalized at construction.
    """

    edges: tuple[float, ...]
    values: tuple[float, ...]
    tail: float

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        values = tuple(min(1.0, max(-1.0, float(v))) for v in self.values)
        tail = min(1.0, max(-1.0, float(self.tail)))
        if len(edges) < 2 or edges[0] != 0.0 or any(
                b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError(f"edges must strictly increase from 0, got {edges}")
        if len(values) != len(edges) - 1:
            raise ValueError("need exactly one value per ring")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "tail", tail)


@dataclass(frozen=True)
class Rational:
    """Profile (r^2 - a) / (r^2 + b) with b > 0; tends to 1 at infinity."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.b > 0):
            raise ValueError(f"b must be positive, got {self.b}")


@dataclass(frozen=True)
class Sampled:
    """Piecewise-linear interpolation of (radius, value) samples.

    Constant extrapolation outside the sampled range.
    """

    radii: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        values = tuple(float(v) for v in self.values)
        if len(radii) != len(values) or len(radii) < 1:
            raise ValueError("need matching, nonempty radii and values")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be strictly increasing")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class Scaled:
    """factor * base; keeps the catalog closed under negation and rescaling."""

    base: "RadialProfile"
    factor: float


RadialProfile = Union[Constant, Power, Indicator, PiecewiseConstant,
                      Rational, Sampled, Scaled]


def profile_value(profile: RadialProfile, r):
    """Profile value at radius r (scalar or ndarray of nonnegative reals)."""
    r = np.asarray(r, dtype=float)
    if isinstance(profile, Constant):
        return np.broadcast_to(profile.value, r.shape).copy() if r.shape else float(profile.value)
    if isinstance(profile, Power):
        return r ** profile.exponent
    if isinstance(profile, Indicator):
        return np.where(r <= profile.radius, 1.0, 0.0)
    if isinstance(profile, PiecewiseConstant):
        idx = np.searchsorted(np.asarray(profile.edges), r, side="right") - 1
        table = np.asarray(profile.values + (profile.tail,))
        out = table[np.minimum(idx, len(profile.values))]
        return np.where(r >= profile.edges[-1], profile.tail, out)
    if isinstance(profile, Rational):
        r2 = r * r
        return (r2 - profile.a) / (r2 + profile.b)
    if isinstance(profile, Sampled):
        return np.interp(r, profile.radii, profile.values)
    if isinstance(profile, Scaled):
        return profile.factor * profile_value(profile.base, r)
    raise TypeError(f"not a radial profile: {profile!r}")


def profile_sup_norm(profile: RadialProfile) -> float:
    if isinstance(profile, Constant):
        return abs(profile.value)
    if isinstance(profile, Power):
        return 1.0 if profile.exponent == 0 else math.inf
    if isinstance(profile, Indicator):
        return 1.0
    if isinstance(profile, PiecewiseConstant):
        return max([abs(v) for v in profile.values] + [abs(profile.tail)])
    if isinstance(profile, Rational):
        # max of |1 - (a+b)/(r^2+b)| over r >= 0: attained at r=0 or at infinity
        return max(abs(profile.a) / profile.b, 1.0)
    if isinstance(profile, Sampled):
        return max(abs(v) for v in profile.values)
    if isinstance(profile, Scaled):
        return abs(profile.factor) * profile_sup_norm(profile.base)
    raise TypeError(f"not a radial profile: {profile!r}")


def profile_breakpoints(profile: RadialProfile) -> tuple[float, ...]:
    """Radii where the profile is non-smooth; quadrature splits there."""
    if isinstance(profile, Indicator):
        return (profile.radius,)
    if isinstance(profile, PiecewiseConstant):
        return profile.edges[1:]
    if isinstance(profile, Sampled):
        return profile.radii
    if isinstance(profile, Scaled):
        return profile_breakpoints(profile.base)
    return ()


def profile_tail_limit(profile: RadialProfile) -> float | None:
    """Limit of the profile at infinity, or None if it does not exist."""
    if isinstance(profile, Constant):
        return profile.value
    if isinstance(profile, Power):
        return 1.0 if profile.exponent == 0 else None
    if isinstance(profile, Indicator):
        return 0.0
    if isinstance(profile, PiecewiseConstant):
        return profile.tail
    if isinstance(profile, Rational):
        return 1.0
    if isinstance(profile, Sampled):
        return profile.values[-1]
    if isinstance(profile, Scaled):
        base = profile_tail_limit(profile.base)
        return None if base is None else profile.factor * base
    raise TypeError(f"not a radial profile: {profile!r}")


# ---------------------------------------------------------------------------
# symbols

@dataclass(frozen=True)
class SignedAtomicMeasure:
    """Finitely many atoms (position, real nonzero weight), positions distinct."""

    atoms: tuple[tuple[complex, float], ...]

    def __post_init__(self):
        atoms = tuple((complex(pos), float(w)) for pos, w in self.atoms)
        positions = [pos for pos, _ in atoms]
        if len(set(positions)) != len(positions):
            raise ValueError("atom positions must be distinct")
        if any(w == 0.0 for _, w in atoms):
            raise ValueError("atom weights must be nonzero")
        object.__setattr__(self, "atoms", atoms)


@dataclass(frozen=True)
class Radial:
    profile: RadialProfile


@dataclass(frozen=True, eq=False)
class General:
    """Arbitrary bounded symbol given by a vectorized evaluator.

    ``bound`` is the declared sup norm; ``real`` declares real-valuedness.
    """

    func: Callable[[np.ndarray], np.ndarray]
    bound: float
    real: bool = False
    name: str = "general"


@dataclass(frozen=True)
class WeylPhase:
    """Unimodular symbol exp(2i Im(w conj(z)) / t)."""

    z: complex


@dataclass(frozen=True)
class Translated:
    base: "Symbol"
    shift: complex


@dataclass(frozen=True)
class AtomicMeasure:
    measure: SignedAtomicMeasure


Symbol = Union[Radial, General, WeylPhase, Translated, AtomicMeasure]


def evaluate(s: Symbol, w, p: FockParams):
    """Symbol value at w (scalar or complex ndarray)."""
    if isinstance(s, AtomicMeasure):
        raise TypeError("atomic measures are not pointwise symbols")
    if isinstance(s, Radial):
        return profile_value(s.profile, np.abs(np.asarray(w, dtype=complex)))
    if isinstance(s, General):
        return s.func(np.asarray(w, dtype=complex))
    if isinstance(s, WeylPhase):
        w = np.asarray(w, dtype=complex)
        return np.exp(2j * np.imag(w * np.conj(s.z)) / p.t)
    if isinstance(s, Translated):
        return evaluate(s.base, np.asarray(w, dtype=complex) - s.shift, p)
    raise TypeError(f"not a symbol: {s!r}")


def translate(s: Symbol, z: complex) -> Symbol:
    """Shifted symbol w -> s(w - z); nested shifts are merged."""
    if isinstance(s, AtomicMeasure):
        raise TypeError("atomic measures are not pointwise symbols")
    z = complex(z)
    if z == 0:
        return s
    if isinstance(s, Translated):
        return Translated(s.base, s.shift + z)
    return Translated(s, z)


def sup_norm(s: Symbol) -> float:
    if isinstance(s, Radial):
        return profile_sup_norm(s.profile)
    if isinstance(s, General):
        return s.bound
    if isinstance(s, WeylPhase):
        return 1.0
    if isinstance(s, Translated):
        return sup_norm(s.base)
    raise TypeError(f"no sup norm for {s!r}")


def is_real_symbol(s: Symbol) -> bool:
    if isinstance(s, Radial):
        return True
    if isinstance(s, General):
        return s.real
    if isinstance(s, WeylPhase):
        return s.z == 0
    if isinstance(s, Translated):
        return is_real_symbol(s.base)
    return False


def directional_clamp() -> General:
    """Real symbol Re(w)/(1+|w|); tends to +/-1 along the +/-x rays."""

    def f(w):
        w = np.asarray(w, dtype=complex)
        return np.clip(w.real / (1.0 + np.abs(w)), -1.0, 1.0)

    return General(func=f, bound=1.0, real=True, name="clamp")


def vo_modulus(s: Symbol, rho: float, p: FockParams, grid_density: int = 64) -> float:
    """Grid estimate of sup_{|z|=rho} sup_{|w|<=1} |s(z) - s(z-w)|.

    A lower bound of the true oscillation: grid_density angles on the shell,
    grid_density/2 points on the unit disc.
    """
    n_shell = max(8, grid_density)
    ring_angles = max(4, grid_density // 8)
    zs = rho * np.exp(2j * np.pi * np.arange(n_shell) / n_shell)
    rings = np.array([0.25, 0.5, 0.75, 1.0])
    ws = (rings[:, None] * np.exp(2j * np.pi * np.arange(ring_angles) / ring_angles)[None, :]).ravel()
    base = evaluate(s, zs, p)
    shifted = evaluate(s, zs[:, None] - ws[None, :], p)
    return float(np.max(np.abs(base[:, None] - shifted)))


def hahn_jordan(m: SignedAtomicMeasure) -> tuple[SignedAtomicMeasure, SignedAtomicMeasure]:
    """Split into (positive part, negative part); both carry positive weights."""
    pos = tuple((p_, w) for p_, w in m.atoms if w > 0)
    neg = tuple((p_, -w) for p_, w in m.atoms if w < 0)
    return SignedAtomicMeasure(pos), SignedAtomicMeasure(neg)


def total_variation(m: SignedAtomicMeasure) -> SignedAtomicMeasure:
    return SignedAtomicMeasure(tuple((p_, abs(w)) for p_, w in m.atoms))


def carleson_ball_bound(m: SignedAtomicMeasure, R: float, centers) -> float:
    """Max |m|-mass of the closed balls B(z, R) over the supplied centers.

    A lower bound for sup_z |m|(B(z, R)), which is the boundedness criterion
    for the induced operator.
    """
    if not (R > 0):
        raise ValueError("R must be positive")
    if not m.atoms:
        return 0.0
    pos = np.array([a for a, _ in m.atoms])
    wts = np.array([abs(w) for _, w in m.atoms])
    best = 0.0
    for z in centers:
        mass = float(wts[np.abs(pos - complex(z)) <= R].sum())
        best = max(best, mass)
    return best


# ---------------------------------------------------------------------------
# mini-language

_COMPLEX_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?[+-](\d+\.?\d*|\.\d+)([eE][+-]?\d+)?i$")


def _parse_float(token: str, spec: str, pos: int) -> float:
    try:
        return float(token.replace("−", "-"))
    except ValueError:
        raise SymbolParseError(f"expected a number, got {token!r}", spec, pos) from None


def _parse_complex(token: str, spec: str, pos: int) -> complex:
    raw = token.replace("−", "-").strip()
    if not _COMPLEX_RE.match(raw):
        raise SymbolParseError(f"expected <re>±<im>i, got {token!r}", spec, pos)
    try:
        return complex(raw[:-1] + "j")
    except ValueError:
        raise SymbolParseError(f"bad complex literal {token!r}", spec, pos) from None


def _format_float(x: float) -> str:
    return repr(float(x))


def _format_complex(z: complex) -> str:
    im = z.imag
    sign = "+" if im >= 0 else "-"
    return f"{_format_float(z.real)}{sign}{_format_float(abs(im))}i"


def _parse_radial(rest: str, spec: str, pos: int) -> RadialProfile:
    kind, _, tail = rest.partition(":")
    body_pos = pos + len(kind) + 1
    if kind == "const":
        return Constant(_parse_float(tail, spec, body_pos))
    if kind == "pow":
        try:
            return Power(int(tail))
        except ValueError:
            raise SymbolParseError(f"expected an integer exponent, got {tail!r}",
                                   spec, body_pos) from None
    if kind == "ind":
        return Indicator(_parse_float(tail, spec, body_pos))
    if kind == "pw":
        parts = tail.split("|")
        if len(parts) != 3:
            raise SymbolParseError("piecewise form is <edges>|<values>|<tail>", spec, body_pos)
        edges = [_parse_float(x, spec, body_pos) for x in parts[0].split(",") if x]
        values = [_parse_float(x, spec, body_pos + len(parts[0]) + 1)
                  for x in parts[1].split(",") if x]
        tail_v = _parse_float(parts[2], spec, body_pos + len(parts[0]) + len(parts[1]) + 2)
        try:
            return PiecewiseConstant(tuple(edges), tuple(values), tail_v)
        except ValueError as exc:
            raise SymbolParseError(str(exc), spec, body_pos) from None
    if kind == "rat":
        nums = tail.split(",")
        if len(nums) != 2:
            raise SymbolParseError("rational form is <a>,<b>", spec, body_pos)
        try:
            return Rational(_parse_float(nums[0], spec, body_pos),
                            _parse_float(nums[1], spec, body_pos + len(nums[0]) + 1))
        except ValueError as exc:
            raise SymbolParseError(str(exc), spec, body_pos) from None
    if kind == "samp":
        parts = tail.split("|")
        if len(parts) != 2:
            raise SymbolParseError("sampled form is <radii>|<values>", spec, body_pos)
        radii = [_parse_float(x, spec, body_pos) for x in parts[0].split(",") if x]
        values = [_parse_float(x, spec, body_pos + len(parts[0]) + 1)
                  for x in parts[1].split(",") if x]
        try:
            return Sampled(tuple(radii), tuple(values))
        except ValueError as exc:
            raise SymbolParseError(str(exc), spec, body_pos) from None
    if kind == "scale":
        factor_str, sep, sub = tail.partition(":")
        if not sep:
            raise SymbolParseError("scale form is <factor>:<radial-spec>", spec, body_pos)
        factor = _parse_float(factor_str, spec, body_pos)
        return Scaled(_parse_radial(sub, spec, body_pos + len(factor_str) + 1), factor)
    if kind == "file":
        rows: list[tuple[float, float]] = []
        try:
            with open(tail, newline="") as handle:
                for row in csv.reader(handle):
                    if not row:
                        continue
                    try:
                        rows.append((float(row[0]), float(row[1])))
                    except (ValueError, IndexError):
                        if not rows:  # tolerate one header line
                            continue
                        raise SymbolParseError(f"bad CSV row {row!r}", spec, body_pos) from None
        except OSError as exc:
            raise SymbolParseError(f"cannot read {tail!r}: {exc}", spec, body_pos) from None
        if not rows:
            raise SymbolParseError(f"no samples in {tail!r}", spec, body_pos)
        rows.sort()
        return Sampled(tuple(r for r, _ in rows), tuple(v for _, v in rows))
    raise SymbolParseError(f"unknown radial kind {kind!r}", spec, pos)


def parse_symbol(spec: str) -> Symbol:
    """Parse the ASCII symbol mini-language; see README for the grammar."""
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    if head == "radial":
        return Radial(_parse_radial(rest, spec, len(head) + 1))
    if head == "weyl":
        return WeylPhase(_parse_complex(rest, spec, len(head) + 1))
    if head == "trans":
        z_str, sep, sub = rest.partition(":")
        if not sep:
            raise SymbolParseError("translation form is trans:<z>:<subspec>",
                                   spec, len(head) + 1)
        z = _parse_complex(z_str, spec, len(head) + 1)
        return translate(parse_symbol(sub), z)
    if head == "measure":
        body = rest.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise SymbolParseError("measure form is measure:[(re,im,w);...]",
                                   spec, len(head) + 1)
        atoms = []
        inner = body[1:-1]
        offset = len(head) + 2
        for chunk in filter(None, (c.strip() for c in inner.split(";"))):
            if not (chunk.startswith("(") and chunk.endswith(")")):
                raise SymbolParseError(f"expected (re,im,w), got {chunk!r}", spec, offset)
            nums = chunk[1:-1].split(",")
            if len(nums) != 3:
                raise SymbolParseError(f"expected three numbers in {chunk!r}", spec, offset)
            re_, im_, w_ = (_parse_float(x, spec, offset) for x in nums)
            atoms.append((complex(re_, im_), w_))
            offset += len(chunk) + 1
        try:
            return AtomicMeasure(SignedAtomicMeasure(tuple(atoms)))
        except ValueError as exc:
            raise SymbolParseError(str(exc), spec, len(head) + 1) from None
    raise SymbolParseError(f"unknown symbol kind {head!r}", spec, 0)


def _format_radial(profile: RadialProfile) -> str:
    if isinstance(profile, Constant):
        return f"const:{_format_float(profile.value)}"
    if isinstance(profile, Power):
        return f"pow:{profile.exponent}"
    if isinstance(profile, Indicator):
        return f"ind:{_format_float(profile.radius)}"
    if isinstance(profile, PiecewiseConstant):
        edges = ",".join(_format_float(e) for e in profile.edges)
        values = ",".join(_format_float(v) for v in profile.values)
        return f"pw:{edges}|{values}|{_format_float(profile.tail)}"
    if isinstance(profile, Rational):
        return f"rat:{_format_float(profile.a)},{_format_float(profile.b)}"
    if isinstance(profile, Sampled):
        radii = ",".join(_format_float(r) for r in profile.radii)
        values = ",".join(_format_float(v) for v in profile.values)
        return f"samp:{radii}|{values}"
    if isinstance(profile, Scaled):
        return f"scale:{_format_float(profile.factor)}:{_format_radial(profile.base)}"
    raise TypeError(f"not a radial profile: {profile!r}")


def format_symbol(s: Symbol) -> str:
    """Canonical printer; parse_symbol(format_symbol(s)) == s for the catalog."""
    if isinstance(s, Radial):
        return f"radial:{_format_radial(s.profile)}"
    if isinstance(s, WeylPhase):
        return f"weyl:{_format_complex(s.z)}"
    if isinstance(s, Translated):
        return f"trans:{_format_complex(s.shift)}:{format_symbol(s.base)}"
    if isinstance(s, AtomicMeasure):
        atoms = ";".join(
            f"({_format_float(p_.real)},{_format_float(p_.imag)},{_format_float(w)})"
            for p_, w in s.measure.atoms)
        return f"measure:[{atoms}]"
    if isinstance(s, General):
        raise TypeError("general function symbols have no text form")
    raise TypeError(f"not a symbol: {s!r}")

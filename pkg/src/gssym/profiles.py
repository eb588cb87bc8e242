"""Flux profiles F(psi), G(psi) and their symmetry classification.

A profile is parsed from text into an expression tree and, when the tree
has one of the recognised algebraic shapes, canonicalised into

* ``power_shifted``: ``a * (psi + c)^p``
* ``exponential``:   ``a * exp(rate * psi)``
* ``affine``:        ``k0 + k1 * psi``
* ``zero``

Everything else stays ``opaque`` but remains evaluable.  :func:`classify`
maps a pair ``(F, G)`` to every symmetry tag that applies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConstraintError, DomainError, ParameterError
from .expr import PSI, Bin, Call, Expr, Neg, Num, Var, evaluate, parse, simplify, to_text

FORMS = ("power_shifted", "exponential", "affine", "zero", "opaque")

# relative tolerance for matching non-rational exponents and shifts
MATCH_RTOL = 1e-12


@dataclass(frozen=True)
class ProfileSpec:
    form: str
    params: tuple = ()
    role: str | None = field(default=None, compare=False)
    expr: Expr | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown profile form {self.form!r}")

    # -- constructors -------------------------------------------------------
    @classmethod
    def power(cls, a, p, c=0, role=None):
        """``a * (psi + c)^p`` built from numbers, canonicalised."""
        a, p, c = _exact(a), _exact(p), _exact(c)
        base = PSI if c == 0 else PSI + Num(c)
        e = base if p == 1 else base ** Num(p)
        if a != 1:
            e = Num(a) * e
        return canonicalize(simplify(e), role)

    @classmethod
    def exponential(cls, a, rate, role=None):
        a, rate = _exact(a), _exact(rate)
        return canonicalize(simplify(Num(a) * Call(_exp(), Num(rate) * PSI)), role)

    @classmethod
    def affine(cls, k0, k1, role=None):
        k0, k1 = _exact(k0), _exact(k1)
        return canonicalize(simplify(Num(k0) + Num(k1) * PSI), role)

    @classmethod
    def zero(cls, role=None):
        return cls("zero", (), role, Num(Fraction(0)))

    # -- accessors ----------------------------------------------------------
    def __getattr__(self, name):
        # parameters are exposed as attributes: spec.a, spec.p, spec.k1, ...
        for key, value in object.__getattribute__(self, "params"):
            if key == name:
                return value
        raise AttributeError(name)

    def as_dict(self):
        return dict(self.params)

    def __call__(self, psi):
        """Evaluate the raw expression tree at ``psi`` (float, array or jet)."""
        return evaluate(self.expr, {"psi": psi})

    def canonical_value(self, psi):
        """Evaluate through the canonical parameters instead of the tree."""
        d = self.as_dict()
        if self.form == "zero":
            return 0.0 * np.asarray(psi, dtype=float) if np.ndim(psi) else 0.0
        if self.form == "affine":
            return float(d["k0"]) + float(d["k1"]) * psi
        if self.form == "exponential":
            return float(d["a"]) * np.exp(float(d["rate"]) * psi)
        if self.form == "power_shifted":
            base = psi + float(d["c"])
            p = d["p"]
            if float(p).is_integer():
                n = int(p)
                val = base**n if n >= 0 else 1.0 / base ** (-n)
            else:
                val = np.power(base, float(p))
            return float(d["a"]) * val
        return self(psi)

    def text(self) -> str:
        """Canonical text; ``parse_profile(spec.text()) == spec``."""
        return to_text(self.expr)

    def __str__(self):
        return self.text()


def _exp():
    from .expr import FUNCTIONS

    return FUNCTIONS["exp"]


def _exact(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    x = float(x)
    f = Fraction(x)
    return f if f.denominator <= 1 << 20 else x


def _div(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    return float(a) / float(b)


def _mul(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return float(a) * float(b)


def _pow_num(a, p):
    if isinstance(a, Fraction) and isinstance(p, Fraction) and p.denominator == 1:
        return a ** int(p)
    if a < 0 and not float(p).is_integer():
        return None
    return _exact(float(a) ** float(p))


# --------------------------------------------------------------------------
# recognition
# --------------------------------------------------------------------------


def _affine(e):
    """(k0, k1) if ``e`` is affine in psi, else None."""
    if isinstance(e, Num):
        return e.value, Fraction(0)
    if isinstance(e, Var):
        return (Fraction(0), Fraction(1)) if e.name == "psi" else None
    if isinstance(e, Neg):
        a = _affine(e.arg)
        return None if a is None else (-a[0], -a[1])
    if isinstance(e, Bin):
        if e.op in "+-":
            a, b = _affine(e.left), _affine(e.right)
            if a is None or b is None:
                return None
            s = 1 if e.op == "+" else -1
            return a[0] + s * b[0], a[1] + s * b[1]
        if e.op == "*":
            a, b = _affine(e.left), _affine(e.right)
            if a is None or b is None:
                return None
            if a[1] == 0:
                return a[0] * b[0], a[0] * b[1]
            if b[1] == 0:
                return b[0] * a[0], b[0] * a[1]
            return None
        if e.op == "/" and isinstance(e.right, Num) and e.right.value != 0:
            a = _affine(e.left)
            if a is None:
                return None
            return _div(a[0], e.right.value), _div(a[1], e.right.value)
    return None


def _power(e):
    """(a, c, p) if ``e`` is ``a*(psi+c)^p`` up to constant factors."""
    if isinstance(e, Var) and e.name == "psi":
        return Fraction(1), Fraction(0), Fraction(1)
    if isinstance(e, Neg):
        t = _power(e.arg)
        return None if t is None else (-t[0], t[1], t[2])
    if isinstance(e, Call) and e.func.name in ("sqrt", "cbrt"):
        base = _affine(e.arg)
        p = Fraction(1, 2) if e.func.name == "sqrt" else Fraction(1, 3)
        return _shifted(base, p)
    if not isinstance(e, Bin):
        return None
    if e.op == "^" and isinstance(e.right, Num):
        return _shifted(_affine(e.left), e.right.value)
    if e.op == "*":
        for k, x in ((e.left, e.right), (e.right, e.left)):
            if isinstance(k, Num):
                t = _power(x)
                if t is not None:
                    return k.value * t[0], t[1], t[2]
        return None
    if e.op == "/":
        if isinstance(e.right, Num) and e.right.value != 0:
            t = _power(e.left)
            return None if t is None else (_div(t[0], e.right.value), t[1], t[2])
        if isinstance(e.left, Num):
            t = _power(e.right)
            if t is not None and t[0] != 0:
                return _div(e.left.value, t[0]), t[1], -t[2]
    return None


def _shifted(base, p):
    if base is None or base[1] == 0:
        return None
    k0, k1 = base
    scale = _pow_num(k1, p)
    if scale is None:
        return None
    return scale, _div(k0, k1), p


def _exponential(e):
    """(a, rate) if ``e`` is ``a*exp(rate*psi + n)``."""
    if isinstance(e, Call) and e.func.name == "exp":
        aff = _affine(e.arg)
        if aff is None or aff[1] == 0:
            return None
        k0, k1 = aff
        a = Fraction(1) if k0 == 0 else _exact(math.exp(float(k0)))
        return a, k1
    if isinstance(e, Neg):
        t = _exponential(e.arg)
        return None if t is None else (-t[0], t[1])
    if isinstance(e, Bin):
        if e.op == "*":
            for k, x in ((e.left, e.right), (e.right, e.left)):
                if isinstance(k, Num):
                    t = _exponential(x)
                    if t is not None:
                        return k.value * t[0], t[1]
        if e.op == "/" and isinstance(e.right, Num) and e.right.value != 0:
            t = _exponential(e.left)
            return None if t is None else (_div(t[0], e.right.value), t[1])
        if e.op == "/" and isinstance(e.left, Num):
            t = _exponential(e.right)
            if t is not None and t[0] != 0:
                return _div(e.left.value, t[0]), -t[1]
    return None


def _canonical_expr(form, d):
    if form == "zero":
        return Num(Fraction(0))
    if form == "affine":
        return simplify(Num(d["k0"]) + Num(d["k1"]) * PSI)
    if form == "exponential":
        return simplify(Num(d["a"]) * Call(_exp(), Num(d["rate"]) * PSI))
    base = PSI if d["c"] == 0 else PSI + Num(d["c"])
    return simplify(Num(d["a"]) * base ** Num(d["p"]))


def canonicalize(e: Expr, role=None) -> ProfileSpec:
    """Recognise the algebraic form of a tree over ``psi``."""
    aff = _affine(e)
    if aff is not None:
        k0, k1 = aff
        if k0 == 0 and k1 == 0:
            return ProfileSpec("zero", (), role, Num(Fraction(0)))
        d = {"k0": k0, "k1": k1}
        return ProfileSpec("affine", tuple(d.items()), role, _canonical_expr("affine", d))
    pw = _power(e)
    if pw is not None:
        a, c, p = pw
        if a == 0:
            return ProfileSpec("zero", (), role, Num(Fraction(0)))
        if p == 0:
            return canonicalize(Num(a), role)
        if p == 1:
            return canonicalize(simplify(Num(_mul(a, c)) + Num(a) * PSI), role)
        d = {"a": a, "c": c, "p": p}
        return ProfileSpec("power_shifted", tuple(d.items()), role, _canonical_expr("power_shifted", d))
    ex = _exponential(e)
    if ex is not None:
        a, rate = ex
        if a == 0:
            return ProfileSpec("zero", (), role, Num(Fraction(0)))
        d = {"a": a, "rate": rate}
        return ProfileSpec("exponential", tuple(d.items()), role, _canonical_expr("exponential", d))
    return ProfileSpec("opaque", (("text", to_text(e)),), role, e)


def parse_profile(text: str, role: str | None = None) -> ProfileSpec:
    """Parse a profile in the variable ``psi`` and canonicalise it."""
    return canonicalize(simplify(parse(text, variables=("psi",))), role)


def as_profile(x, role=None) -> ProfileSpec:
    if isinstance(x, ProfileSpec):
        return x
    if isinstance(x, str):
        return parse_profile(x, role)
    if isinstance(x, Expr):
        return canonicalize(simplify(x), role)
    return ProfileSpec.affine(x, 0, role)


# --------------------------------------------------------------------------
# classification
# --------------------------------------------------------------------------

TAGS = (
    "a", "a'", "a''", "b", "c'", "c''", "c'''", "c''''", "d",
    "conditional-kappa", "conditional-rotation", "weak-sigma", "none",
)


@dataclass(frozen=True)
class SymmetryClass:
    tag: str
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")

    def __getitem__(self, key):
        return self.params[key]

    def get(self, key, default=None):
        return self.params.get(key, default)

    def to_json(self):
        out = {"tag": self.tag}
        out.update({k: _jsonable(v) for k, v in self.params.items()})
        return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else float(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _close(x, y):
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x == y
    x, y = float(x), float(y)
    return abs(x - y) <= MATCH_RTOL * max(abs(x), abs(y), 1e-300)


def _power_view(spec: ProfileSpec):
    """(amplitude, shift or None, exponent) for power-like profiles."""
    if spec.form == "power_shifted":
        return spec.a, spec.c, spec.p
    if spec.form == "affine" and spec.k1 == 0:
        return spec.k0, None, Fraction(0)
    return None


def _q_from(p, divisor):
    # p = 1 + divisor/q
    if _close(p, 1):
        return None
    return _div(Fraction(divisor) if isinstance(p, Fraction) else float(divisor), p - 1)


def _power_family(F, G):
    fv = None if F.form == "zero" else _power_view(F)
    gv = None if G.form == "zero" else _power_view(G)
    if (fv is None and F.form != "zero") or (gv is None and G.form != "zero"):
        return None
    if fv is None and gv is None:
        return None
    qs = []
    if fv is not None:
        qs.append(_q_from(fv[2], 2))
    if gv is not None:
        qs.append(_q_from(gv[2], 1))
    if any(q is None for q in qs):
        return None
    q = qs[0]
    if len(qs) == 2 and not _close(qs[0], qs[1]):
        return None
    shifts = [v[1] for v in (fv, gv) if v is not None and v[1] is not None]
    if len(shifts) == 2 and not _close(shifts[0], shifts[1]):
        return None
    c = shifts[0] if shifts else Fraction(0)
    a = fv[0] if fv is not None else Fraction(0)
    b = gv[0] if gv is not None else Fraction(0)
    return {"q": q, "a": a, "b": b, "c": c}


def _exp_family(F, G):
    rates = []
    if F.form == "exponential":
        rates.append(_div(F.rate, 2))
    elif F.form != "zero":
        return None
    if G.form == "exponential":
        rates.append(G.rate)
    elif G.form != "zero":
        return None
    if not rates or (len(rates) == 2 and not _close(rates[0], rates[1])):
        return None
    a = F.a if F.form == "exponential" else Fraction(0)
    b = G.a if G.form == "exponential" else Fraction(0)
    return {"a": a, "b": b, "c": rates[0]}


def _linear_family(F, G):
    def coeffs(s):
        if s.form == "zero":
            return Fraction(0), Fraction(0)
        if s.form == "affine":
            return s.k0, s.k1
        return None

    cf, cg = coeffs(F), coeffs(G)
    if cf is None or cg is None:
        return []
    a0, a1 = cf
    b0, b1 = cg
    base = {"a0": a0, "a1": a1, "b0": b0, "b1": b1}
    if a1 == 0 and b1 == 0:
        return [SymmetryClass("d", base)]

    def subcase(a0, a1, b0, b1):
        if a0 == 0 and b0 == 0:
            return "c'"
        if a1 == 0 and b0 == 0 and b1 != 0:
            return "c''"
        if a0 == 0 and b1 == 0 and a1 != 0:
            return "c'''"
        if a0 == 0 or b0 == 0:
            return "c''''"
        return None

    tag = subcase(a0, a1, b0, b1)
    if tag is not None:
        return [SymmetryClass(tag, dict(base, shift=Fraction(0)))]
    # psi -> psi - s turns (k0, k1) into (k0 - k1 s, k1)
    candidates = []
    if a1 != 0:
        candidates.append(_div(a0, a1))
    if b1 != 0:
        candidates.append(_div(b0, b1))
    best = None
    for s in candidates:
        na0, nb0 = a0 - a1 * s, b0 - b1 * s
        na0 = Fraction(0) if _close(na0 + 1, 1) and not isinstance(na0, Fraction) else na0
        nb0 = Fraction(0) if _close(nb0 + 1, 1) and not isinstance(nb0, Fraction) else nb0
        t = subcase(na0, a1, nb0, b1)
        rank = ["c'", "c''", "c'''", "c''''", None].index(t)
        if best is None or rank < best[0]:
            best = (rank, t, s, na0, nb0)
    _, tag, s, na0, nb0 = best
    return [SymmetryClass(tag, dict(base, shift=s, a0_shifted=na0, b0_shifted=nb0))]


def _ratio_constant(F, G, rng):
    ratios = []
    for psi in rng.uniform(0.5, 2.0, size=20):
        try:
            f, g = float(F(psi)), float(G(psi))
        except (DomainError, ZeroDivisionError, ValueError):
            return None
        if not (np.isfinite(f) and np.isfinite(g)) or f == 0:
            return None
        ratios.append(g / f)
    ratios = np.array(ratios)
    ref = ratios[0]
    if ref <= 0 or np.max(np.abs(ratios - ref)) > 1e-12 * abs(ref):
        return None
    return float(ref)


def _weak_sigma(fam):
    q, a, b = fam["q"], fam["a"], fam["b"]
    if fam["c"] != 0 or a == 0 or _close(q, -1) or q == 0:
        return None
    two_q1 = 2 * q + 1
    if _close(two_q1 + 1, 1):
        if b != 0:
            return None
        A = Fraction(1)
    else:
        if b == 0:
            return None
        A = _div(b, 2 * q * two_q1)
    m = _div(a, 4 * A * A * q * (q + 1))
    disc = 1 + 4 * float(m)
    if disc < 0:
        return None
    root = math.sqrt(disc)
    sigma = 0.5 * (1.0 - root)
    return {"q": q, "A": A, "sigma": sigma, "sigma_partner": 1.0 - sigma, "a": a, "b": b}


def classify(F, G) -> list[SymmetryClass]:
    """All symmetry tags of the pair, most specific first.

    Order: conditional tags, then Lie-symmetry cases (a'', a', a, b,
    linear cases), then the weak conditional tag.  A pair matching nothing
    yields a single ``none`` entry.
    """
    F, G = as_profile(F, "F"), as_profile(G, "G")
    out: list[SymmetryClass] = []
    rng = np.random.default_rng(20101020)

    if F.form == "zero" and G.form != "zero":
        params = {}
        if G.form == "power_shifted" and G.c == 0:
            params = {"b": G.a, "beta": G.p}
        out.append(SymmetryClass("conditional-rotation", params))
    elif F.form != "zero" and G.form != "zero":
        ratio = _ratio_constant(F, G, rng)
        if ratio is not None:
            out.append(SymmetryClass("conditional-kappa", {"kappa": math.sqrt(ratio)}))

    fam = _power_family(F, G)
    if fam is not None:
        if _close(fam["q"], Fraction(-1, 4)):
            out.append(SymmetryClass("a''", dict(fam)))
        out.append(SymmetryClass("a" if fam["c"] == 0 else "a'", dict(fam)))
    efam = _exp_family(F, G)
    if efam is not None:
        out.append(SymmetryClass("b", efam))
    out.extend(_linear_family(F, G))
    if fam is not None:
        weak = _weak_sigma(fam)
        if weak is not None:
            out.append(SymmetryClass("weak-sigma", weak))
    if not out:
        out.append(SymmetryClass("none", {}))
    return out


# --------------------------------------------------------------------------
# weak-symmetry family relations
# --------------------------------------------------------------------------


def weak_coefficients(q, A, sigma):
    """(a, b) of the weak-family profiles for given (q, A, sigma)."""
    q, A, sigma = _exact(q), _exact(A), _exact(sigma)
    a = 4 * A * A * (sigma * sigma - sigma) * q * (q + 1)
    b = 2 * A * q * (2 * q + 1)
    return a, b


def weak_family(q, A, sigma):
    """Profiles ``F = a psi^(1+2/q)``, ``G = b psi^(1+1/q)`` solved by
    ``psi = (A (sigma r^2 + z^2))^(-q)``; returns ``(F, G, a, b)``."""
    if q == 0:
        raise ParameterError("q must be non-zero")
    if A == 0:
        raise ParameterError("A must be non-zero")
    if sigma in (0, 1):
        raise ParameterError(f"degenerate sigma={sigma}: the psi_ss equation trivialises")
    a, b = weak_coefficients(q, A, sigma)
    q = _exact(q)
    pF = 1 + _div(Fraction(2) if isinstance(q, Fraction) else 2.0, q)
    pG = 1 + _div(Fraction(1) if isinstance(q, Fraction) else 1.0, q)
    F = ProfileSpec.power(a, pF, role="F") if a != 0 else ProfileSpec.zero("F")
    G = ProfileSpec.power(b, pG, role="G") if b != 0 else ProfileSpec.zero("G")
    return F, G, a, b


def dshape_params_from(a, b):
    """Invert the q = -1/4 weak-family relations: returns ``(A, sigma)``."""
    if b == 0:
        raise ParameterError("b must be non-zero")
    a, b = float(a), float(b)
    disc = 1.0 - a / (3.0 * b * b)
    if disc < 0:
        raise ConstraintError(f"a={a} > 3 b^2={3 * b * b}: no real sigma")
    return -4.0 * b, 0.5 * (1.0 - math.sqrt(disc))

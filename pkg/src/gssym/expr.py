"""Closed-form expression trees.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom (('^' | '**') unary)?
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

``NAME`` is a variable (``psi``, ``r``, ``z`` depending on context), the
constant ``pi``, or one of the functions in :data:`FUNCTIONS`.  Exponents
are right associative and ``-x^2`` means ``-(x^2)``.

Trees evaluate on floats, numpy arrays or :class:`~gssym.jets.ScalarJet`
values through the same code path.  Numeric literals that are exactly
representable as binary floats become :class:`fractions.Fraction` so that
exponent comparisons can be exact.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import special
from .errors import DomainError, ParseError
from .jets import ScalarJet

Number = Fraction | float


# --------------------------------------------------------------------------
# functions
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Function:
    """A univariate function usable inside an expression tree.

    ``derivs(x)`` returns ``(f, f', f'')`` at ``x``; ``check(x)`` raises
    :class:`DomainError` (without subexpression info) outside the domain;
    ``derivative`` builds the symbolic derivative ``f'(u)`` for an argument
    expression ``u`` and may be ``None`` for tabulated functions.
    """

    name: str
    value: Callable
    derivs: Callable
    check: Callable | None = None
    derivative: Callable | None = field(default=None, repr=False)

    def __call__(self, arg):
        return Call(self, as_expr(arg))


def _no_check(x):
    return None


def _positive(name):
    def check(x):
        if np.any(np.asarray(x) <= 0):
            raise DomainError(f"{name} of a non-positive value")
    return check


def _nonnegative(name):
    def check(x):
        if np.any(np.asarray(x) < 0):
            raise DomainError(f"{name} of a negative value")
    return check


def _exp_d(x):
    e = np.exp(x)
    return e, e, e


def _log_d(x):
    return np.log(x), 1.0 / x, -1.0 / (x * x)


def _sqrt_d(x):
    s = np.sqrt(x)
    return s, 0.5 / s, -0.25 / (s * x)


def _cbrt_d(x):
    c = np.cbrt(x)
    return c, 1.0 / (3.0 * c * c), -2.0 / (9.0 * c**5)


def _abs_d(x):
    return np.abs(x), np.sign(x), np.zeros_like(np.asarray(x, dtype=float)) + 0.0


def _sin_d(x):
    s, c = np.sin(x), np.cos(x)
    return s, c, -s


def _cos_d(x):
    s, c = np.sin(x), np.cos(x)
    return c, -s, -c


def _sinh_d(x):
    s, c = np.sinh(x), np.cosh(x)
    return s, c, s


def _cosh_d(x):
    s, c = np.sinh(x), np.cosh(x)
    return c, s, c


def _j0_d(x):
    j0, j1 = special.bessel_j0(x), special.bessel_j1(x)
    _, j1p, _ = special.j1_derivs(x)
    return j0, -j1, -j1p


def _y0_d(x):
    y0, y1 = special.bessel_y0(x), special.bessel_y1(x)
    _, y1p, _ = special.y1_derivs(x)
    return y0, -y1, -y1p


FUNCTIONS: dict[str, Function] = {}


def _register(name, value, derivs, check=None, derivative=None):
    FUNCTIONS[name] = Function(name, value, derivs, check or _no_check, derivative)


_register("exp", np.exp, _exp_d, derivative=lambda u: Call(FUNCTIONS["exp"], u))
_register("log", np.log, _log_d, _positive("log"), lambda u: 1 / u)
_register("sqrt", np.sqrt, _sqrt_d, _nonnegative("sqrt"), lambda u: Fraction(1, 2) / Call(FUNCTIONS["sqrt"], u))
_register("cbrt", np.cbrt, _cbrt_d, derivative=lambda u: Fraction(1, 3) / Call(FUNCTIONS["cbrt"], u) ** 2)
_register("abs", np.abs, _abs_d, derivative=lambda u: u / Call(FUNCTIONS["abs"], u))
_register("sin", np.sin, _sin_d, derivative=lambda u: Call(FUNCTIONS["cos"], u))
_register("cos", np.cos, _cos_d, derivative=lambda u: -Call(FUNCTIONS["sin"], u))
_register("sinh", np.sinh, _sinh_d, derivative=lambda u: Call(FUNCTIONS["cosh"], u))
_register("cosh", np.cosh, _cosh_d, derivative=lambda u: Call(FUNCTIONS["sinh"], u))
_register("si", special.si, special.si_derivs, derivative=lambda u: Call(FUNCTIONS["sin"], u) / u)
_register("ci", special.ci, special.ci_derivs, _positive("ci"), lambda u: Call(FUNCTIONS["cos"], u) / u)
_register("j0", special.bessel_j0, _j0_d, derivative=lambda u: -Call(FUNCTIONS["j1"], u))
_register(
    "j1", special.bessel_j1, special.j1_derivs,
    derivative=lambda u: Call(FUNCTIONS["j0"], u) - Call(FUNCTIONS["j1"], u) / u,
)
_register("y0", special.bessel_y0, _y0_d, _positive("y0"), lambda u: -Call(FUNCTIONS["y1"], u))
_register(
    "y1", special.bessel_y1, special.y1_derivs, _positive("y1"),
    lambda u: Call(FUNCTIONS["y0"], u) - Call(FUNCTIONS["y1"], u) / u,
)

CONSTANTS = {"pi": np.pi}


# --------------------------------------------------------------------------
# tree nodes
# --------------------------------------------------------------------------


class Expr:
    """Base class of expression nodes; supports operator building."""

    __slots__ = ()

    def __add__(self, o):
        return Bin("+", self, as_expr(o))

    def __radd__(self, o):
        return Bin("+", as_expr(o), self)

    def __sub__(self, o):
        return Bin("-", self, as_expr(o))

    def __rsub__(self, o):
        return Bin("-", as_expr(o), self)

    def __mul__(self, o):
        return Bin("*", self, as_expr(o))

    def __rmul__(self, o):
        return Bin("*", as_expr(o), self)

    def __truediv__(self, o):
        return Bin("/", self, as_expr(o))

    def __rtruediv__(self, o):
        return Bin("/", as_expr(o), self)

    def __pow__(self, o):
        return Bin("^", self, as_expr(o))

    def __rpow__(self, o):
        return Bin("^", as_expr(o), self)

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=True, repr=False)
class Num(Expr):
    value: Number

    def __repr__(self):
        return f"Num({self.value!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Var(Expr):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Neg(Expr):
    arg: Expr

    def __repr__(self):
        return f"Neg({self.arg!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Bin(Expr):
    op: str
    left: Expr
    right: Expr

    def __repr__(self):
        return f"Bin({self.op!r}, {self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Call(Expr):
    func: Function
    arg: Expr

    def __repr__(self):
        return f"Call({self.func.name!r}, {self.arg!r})"


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (Fraction, int, np.integer)):
        return Num(Fraction(int(x)) if not isinstance(x, Fraction) else x)
    if isinstance(x, (float, np.floating)):
        return Num(_exact_or_float(float(x)))
    if isinstance(x, str):
        return parse(x, variables=("r", "z", "psi"))
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


def _exact_or_float(x: float) -> Number:
    # keep integers and dyadic rationals with small denominators exact
    f = Fraction(x)
    if f.denominator <= 1 << 20:
        return f
    return x


R, Z, PSI = Var("r"), Var("z"), Var("psi")


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


def _literal(text: str) -> Number:
    f = Fraction(text)
    return f if f == Fraction(float(text)) else float(text)


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.variables = set(variables)
        self.tokens = []
        pos = 0
        text_end = len(text.rstrip())
        while pos < text_end:
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise ParseError(f"unexpected character {text[bad]!r}", text, bad)
            start = m.start(m.lastindex)
            kind = ("num", "name", "op")[m.lastindex - 1]
            self.tokens.append((kind, m.group(m.lastindex), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", self.text, pos)

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression", self.text, 0)
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", self.text, pos)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            e = fold(Bin(op, e, self.term()))
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            e = fold(Bin(op, e, self.unary()))
        return e

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            arg = self.unary()
            return fold(Neg(arg)) if val == "-" else arg
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] in ("^", "**") and self.peek()[0] == "op":
            self.take()
            return fold(Bin("^", base, self.unary()))
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(_literal(val))
        if kind == "name":
            if self.peek()[1] == "(":
                if val not in FUNCTIONS:
                    raise ParseError(f"unknown function {val!r}", self.text, pos)
                self.take()
                arg = self.expr()
                self.expect(")")
                return fold(Call(FUNCTIONS[val], arg))
            if val in self.variables:
                return Var(val)
            if val in CONSTANTS:
                return Num(CONSTANTS[val])
            raise ParseError(f"unknown identifier {val!r}", self.text, pos)
        if val == "(":
            e = self.expr()
            self.expect(")")
            return e
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {found}", self.text, pos)


def parse(text: str, variables=("psi",)) -> Expr:
    """Parse ``text`` into an expression tree over the given variables."""
    return _Parser(text, variables).parse()


# --------------------------------------------------------------------------
# constant folding and light simplification
# --------------------------------------------------------------------------


def _num_op(op, a: Number, b: Number):
    exact = isinstance(a, Fraction) and isinstance(b, Fraction)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            return None
        return a / b
    if op == "^":
        if exact and b.denominator == 1 and abs(b.numerator) <= 64 and not (a == 0 and b < 0):
            return a ** int(b)
        if a < 0 and not float(b).is_integer():
            return None
        if a == 0 and b < 0:
            return None
        return float(a) ** float(b)
    raise ValueError(op)


def fold(e: Expr) -> Expr:
    """Fold an operation whose operands are all numeric literals."""
    if isinstance(e, Neg) and isinstance(e.arg, Num):
        return Num(-e.arg.value)
    if isinstance(e, Bin) and isinstance(e.left, Num) and isinstance(e.right, Num):
        v = _num_op(e.op, e.left.value, e.right.value)
        if v is not None:
            return Num(v)
    return e


def _is_num(e, v=None):
    return isinstance(e, Num) and (v is None or e.value == v)


def simplify(e: Expr) -> Expr:
    """Bottom-up removal of additive zeros, unit factors and numeric folds."""
    if isinstance(e, Neg):
        a = simplify(e.arg)
        if isinstance(a, Neg):
            return a.arg
        return fold(Neg(a))
    if isinstance(e, Call):
        return fold(Call(e.func, simplify(e.arg)))
    if not isinstance(e, Bin):
        return e
    a, b = simplify(e.left), simplify(e.right)
    op = e.op
    if op == "+":
        if _is_num(a, 0):
            return b
        if _is_num(b, 0):
            return a
        if isinstance(b, Neg):
            return simplify(Bin("-", a, b.arg))
    elif op == "-":
        if _is_num(b, 0):
            return a
        if _is_num(a, 0):
            return fold(Neg(b))
    elif op == "*":
        if _is_num(a, 0) or _is_num(b, 0):
            return Num(Fraction(0))
        if _is_num(a, 1):
            return b
        if _is_num(b, 1):
            return a
        if _is_num(a, -1):
            return fold(Neg(b))
        if _is_num(b, -1):
            return fold(Neg(a))
    elif op == "/":
        if _is_num(a, 0) and not _is_num(b, 0):
            return Num(Fraction(0))
        if _is_num(b, 1):
            return a
    elif op == "^":
        if _is_num(b, 1):
            return a
        if _is_num(b, 0):
            return Num(Fraction(1))
    return fold(Bin(op, a, b))


# --------------------------------------------------------------------------
# printing
# --------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _num_text(v: Number) -> str:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            s = str(v.numerator)
        else:
            s = f"({v.numerator}/{v.denominator})"
    else:
        s = repr(float(v))
        if s in ("inf", "-inf", "nan"):
            raise ValueError(f"cannot print non-finite literal {s}")
    return f"({s})" if s.startswith("-") else s


def to_text(e: Expr) -> str:
    """Print ``e`` in the parser's grammar; re-parsing yields an equal tree."""
    return _text(e, 0)


def _text(e, parent_prec, right_side=False):
    if isinstance(e, Num):
        return _num_text(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func.name}({_text(e.arg, 0)})"
    if isinstance(e, Neg):
        s = "-" + _text(e.arg, 3)
        return f"({s})" if parent_prec >= 2 else s
    prec = _PREC[e.op]
    if e.op == "^":
        s = f"{_text(e.left, 5)}^{_text(e.right, 4, True)}"
    else:
        s = f"{_text(e.left, prec)} {e.op} {_text(e.right, prec, True)}"
    need = prec < parent_prec or (prec == parent_prec and right_side and e.op != "^")
    return f"({s})" if need else s


# --------------------------------------------------------------------------
# traversal utilities
# --------------------------------------------------------------------------


def variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return variables(e.arg)
    if isinstance(e, Call):
        return variables(e.arg)
    if isinstance(e, Bin):
        return variables(e.left) | variables(e.right)
    return set()


def subs(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace variables by expressions (simultaneously)."""
    if isinstance(e, Var):
        return as_expr(mapping[e.name]) if e.name in mapping else e
    if isinstance(e, Neg):
        return Neg(subs(e.arg, mapping))
    if isinstance(e, Call):
        return Call(e.func, subs(e.arg, mapping))
    if isinstance(e, Bin):
        return Bin(e.op, subs(e.left, mapping), subs(e.right, mapping))
    return e


def diff(e: Expr, var: str) -> Expr:
    """Symbolic partial derivative with light simplification."""
    return simplify(_diff(e, var))


def _diff(e, var):
    if isinstance(e, Num):
        return Num(Fraction(0))
    if isinstance(e, Var):
        return Num(Fraction(1 if e.name == var else 0))
    if isinstance(e, Neg):
        return Neg(_diff(e.arg, var))
    if isinstance(e, Call):
        if e.func.derivative is None:
            raise NotImplementedError(f"no symbolic derivative for {e.func.name}")
        if var not in variables(e.arg):
            return Num(Fraction(0))
        return as_expr(e.func.derivative(e.arg)) * _diff(e.arg, var)
    a, b = e.left, e.right
    da, db = _diff(a, var), _diff(b, var)
    if e.op == "+":
        return da + db
    if e.op == "-":
        return da - db
    if e.op == "*":
        return da * b + a * db
    if e.op == "/":
        return (da * b - a * db) / b**2
    # power
    if var not in variables(b):
        if isinstance(b, Num):
            return b * a ** Num(_num_op("-", b.value, Fraction(1))) * da
        return b * a ** (b - 1) * da
    return e * (db * FUNCTIONS["log"](a) + b * da / a)


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------


def evaluate(e: Expr, env: dict):
    """Evaluate ``e`` with variables bound in ``env``.

    Values may be floats, numpy arrays or :class:`ScalarJet`.  Domain
    violations raise :class:`DomainError` naming the offending subexpression
    and its pre-order index.
    """
    return _eval(e, env, itertools.count())


def _value_of(x):
    return x.value if isinstance(x, ScalarJet) else x


def _domain_fail(msg, node, idx):
    raise DomainError(msg, subexpr=to_text(node), index=idx)


def _eval(e, env, counter):
    idx = next(counter)
    if isinstance(e, Num):
        return float(e.value)
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise DomainError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Neg):
        return -_eval(e.arg, env, counter)
    if isinstance(e, Call):
        u = _eval(e.arg, env, counter)
        x = _value_of(u)
        try:
            if e.func.check is not None:
                e.func.check(x)
        except DomainError as err:
            _domain_fail(str(err), e, idx)
        with np.errstate(all="ignore"):
            if isinstance(u, ScalarJet):
                return u.chain(*e.func.derivs(x))
            return e.func.value(x)
    a = _eval(e.left, env, counter)
    if e.op == "^" and isinstance(e.right, Num):
        next(counter)
        return _power(a, e.right.value, e, idx)
    b = _eval(e.right, env, counter)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        if np.any(np.asarray(_value_of(b)) == 0):
            _domain_fail("division by zero", e, idx)
        return a / b
    # general power x^y = exp(y log x)
    if np.any(np.asarray(_value_of(a)) <= 0):
        _domain_fail("variable exponent needs a positive base", e, idx)
    if isinstance(a, ScalarJet) or isinstance(b, ScalarJet):
        if not isinstance(a, ScalarJet):
            a = ScalarJet.constant(a)
        return a**b
    return np.power(a, b)


def _power(base, p: Number, node, idx):
    x = np.asarray(_value_of(base))
    integer = float(p).is_integer()
    if not integer and np.any(x < 0):
        _domain_fail("fractional power of a negative value", node, idx)
    if p < 0 and np.any(x == 0):
        _domain_fail("negative power of zero", node, idx)
    if isinstance(base, ScalarJet):
        if integer:
            return base.powi(int(p))
        return base.powf(float(p))
    if integer:
        n = int(p)
        if isinstance(base, np.ndarray):
            return np.power(base.astype(float), float(n))
        return float(base) ** n if n >= 0 else 1.0 / float(base) ** (-n)
    return np.power(base, float(p))


def jet_eval(e: Expr, r, z, extra: dict | None = None) -> ScalarJet:
    """Exact value and partials up to second order of ``e(r, z)``."""
    from .jets import seed

    jr, jz = seed(r, z)
    env = {"r": jr, "z": jz}
    if extra:
        env.update(extra)
    out = evaluate(e, env)
    if not isinstance(out, ScalarJet):
        out = ScalarJet.constant(np.broadcast_to(out, np.shape(jr.value)).copy() if np.ndim(jr.value) else float(out))
    return out

"""Expression trees for scalar functions of several complex variables.

A :class:`ScalarField` is an arity together with an immutable expression
tree. Fields evaluate pointwise on C^k and differentiate symbolically;
differentiation is closed on the node set, so mixed partial derivatives of
any order stay representable. Besides the rational operations, integer
powers, exp and log, the tree supports divided differences of another
field in one of its slots (closed under differentiation through the
node-repetition rule) and the kernel functions used by the eigenprojector
perturbation series. Two evaluation-only builtins, ``abs`` and a clipped
minimum, exist for the piecewise tests and refuse differentiation.
"""

from __future__ import annotations

import cmath
import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache

from .errors import FieldDomainError, FieldParseError

#: Nodes of a divided difference closer than this are treated as one node.
CONFLUENCE_TOL = 1e-10


class Node:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Const(Node):
    value: complex


@dataclass(frozen=True, slots=True)
class Var(Node):
    index: int


@dataclass(frozen=True, slots=True)
class Add(Node):
    lhs: Node
    rhs: Node


@dataclass(frozen=True, slots=True)
class Sub(Node):
    lhs: Node
    rhs: Node


@dataclass(frozen=True, slots=True)
class Mul(Node):
    lhs: Node
    rhs: Node


@dataclass(frozen=True, slots=True)
class Div(Node):
    lhs: Node
    rhs: Node


@dataclass(frozen=True, slots=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True, slots=True)
class Pow(Node):
    base: Node
    exponent: int


@dataclass(frozen=True, slots=True)
class Exp(Node):
    arg: Node


@dataclass(frozen=True, slots=True)
class Log(Node):
    arg: Node


@dataclass(frozen=True, slots=True)
class AbsVal(Node):
    """|z| as a real number. Evaluation only; has no derivative node."""

    arg: Node


@dataclass(frozen=True, slots=True)
class MinConst(Node):
    """min(Re z, c) for a real constant c. Evaluation only.

    Arguments with a meaningful imaginary part are rejected instead of
    silently projected, since the comparison has no complex meaning.
    """

    arg: Node
    bound: float


@dataclass(frozen=True, slots=True)
class SlotDividedDifference(Node):
    """Divided difference of ``base`` taken in one of its variables.

    ``base`` has ``base_arity`` variables. Variable ``slot`` of the base is
    replaced by ``len(mults)`` node variables, inserted at the same
    position, so the surrounding field has arity
    ``base_arity - 1 + len(mults)``. Node variable ``t`` enters the
    difference table ``mults[t]`` times. Repetitions are what make the
    node closed under differentiation: d/dy_t multiplies by ``mults[t]``
    and bumps that multiplicity by one.
    """

    base: Node
    base_arity: int
    slot: int
    mults: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class ProjKernel(Node):
    """The coefficient function of the eigenprojector perturbation series.

    Symmetric in its ``order + 1`` arguments. With ``m`` of them equal to
    ``anchor`` and the rest z_h distinct from it, the value is the
    (m-1)-st Taylor coefficient of prod_h 1/(z - z_h) at ``anchor``; with
    m = 0 the value is 0. Evaluation only.
    """

    anchor: complex
    order: int


# ---------------------------------------------------------------------------
# smart constructors (conservative simplification)


def _const(v) -> Const:
    return Const(complex(v))


_ZERO = _const(0.0)
_ONE = _const(1.0)


def _is_const(n: Node, v=None) -> bool:
    if not isinstance(n, Const):
        return False
    return True if v is None else n.value == complex(v)


def _add(a: Node, b: Node) -> Node:
    if isinstance(a, Const) and isinstance(b, Const):
        return _const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return Add(a, b)


def _sub(a: Node, b: Node) -> Node:
    if isinstance(a, Const) and isinstance(b, Const):
        return _const(a.value - b.value)
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return _neg(b)
    if a == b:
        return _ZERO
    return Sub(a, b)


def _neg(a: Node) -> Node:
    if isinstance(a, Const):
        return _const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a: Node, b: Node) -> Node:
    if isinstance(a, Const) and isinstance(b, Const):
        return _const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return _ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return Mul(a, b)


def _div(a: Node, b: Node) -> Node:
    # No 0/x fold: it would erase a potential 0/0 domain error.
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return _const(a.value / b.value)
    if _is_const(b, 1):
        return a
    return Div(a, b)


def _pow(a: Node, n: int) -> Node:
    if n == 0:
        return _ONE
    if n == 1:
        return a
    if isinstance(a, Const) and not (a.value == 0 and n < 0):
        return _const(a.value**n)
    return Pow(a, n)


# ---------------------------------------------------------------------------
# evaluation


def _eval(node: Node, point: tuple) -> complex:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return point[node.index]
    if isinstance(node, Add):
        return _eval(node.lhs, point) + _eval(node.rhs, point)
    if isinstance(node, Sub):
        return _eval(node.lhs, point) - _eval(node.rhs, point)
    if isinstance(node, Neg):
        return -_eval(node.arg, point)
    if isinstance(node, Mul):
        return _eval(node.lhs, point) * _eval(node.rhs, point)
    if isinstance(node, Div):
        num = _eval(node.lhs, point)
        den = _eval(node.rhs, point)
        if den == 0:
            raise FieldDomainError(f"division by zero in {render(node)} at point {point}")
        return num / den
    if isinstance(node, Pow):
        base = _eval(node.base, point)
        if base == 0 and node.exponent < 0:
            raise FieldDomainError(
                f"zero raised to negative power in {render(node)} at point {point}"
            )
        return base**node.exponent
    if isinstance(node, Exp):
        try:
            return cmath.exp(_eval(node.arg, point))
        except OverflowError as exc:
            raise FieldDomainError(f"exp overflow in {render(node)} at point {point}") from exc
    if isinstance(node, Log):
        arg = _eval(node.arg, point)
        if arg == 0:
            raise FieldDomainError(f"log of zero in {render(node)} at point {point}")
        return cmath.log(arg)
    if isinstance(node, AbsVal):
        return complex(abs(_eval(node.arg, point)))
    if isinstance(node, MinConst):
        z = _eval(node.arg, point)
        if abs(z.imag) > 1e-9 * (1.0 + abs(z)):
            raise FieldDomainError(
                f"min builtin applied to non-real value {z} at point {point}"
            )
        return complex(min(z.real, node.bound))
    if isinstance(node, SlotDividedDifference):
        return _eval_slot_dd(node, point)
    if isinstance(node, ProjKernel):
        return _eval_proj_kernel(node, point)
    raise TypeError(f"unknown node type {type(node).__name__}")


def _eval_slot_dd(node: SlotDividedDifference, point: tuple) -> complex:
    t = len(node.mults)
    before = point[: node.slot]
    ys = point[node.slot : node.slot + t]
    after = point[node.slot + t :]
    dd_nodes = []
    for y, m in zip(ys, node.mults):
        dd_nodes.extend([y] * m)

    def deriv(x, order):
        section = _diff_n(node.base, node.slot, order)
        return _eval(section, before + (x,) + after)

    return confluent_divided_difference(deriv, dd_nodes)


def _eval_proj_kernel(node: ProjKernel, point: tuple) -> complex:
    lam = node.anchor
    others = []
    m = 0
    for z in point:
        if z == lam:
            m += 1
            continue
        if abs(z - lam) < CONFLUENCE_TOL:
            raise FieldDomainError(
                f"kernel argument {z} is within {CONFLUENCE_TOL} of the anchor "
                f"{lam} but not equal to it; ambiguous confluence"
            )
        others.append(z)
    if m == 0:
        return 0j
    # (m-1)-st derivative of prod_h (z - z_h)^(-1) at lam, divided by (m-1)!.
    # Expanding by the product rule gives the composition sum below.
    total = 0j
    nparts = len(others)
    if nparts == 0:
        return 1.0 + 0j if m == 1 else 0j
    for ks in _compositions(m - 1, nparts):
        term = 1.0 + 0j
        for z, k in zip(others, ks):
            term *= (lam - z) ** -(1 + k)
        total += term
    return (-1) ** (m - 1) * total


def _compositions(total: int, parts: int):
    """Weak compositions of ``total`` into ``parts`` nonnegative integers."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


# ---------------------------------------------------------------------------
# divided differences (confluent, shared by calculus and the dd node)


def divided_difference_levels(deriv, nodes):
    """All levels of the confluent Newton table over ``nodes``.

    ``deriv(x, m)`` must return the m-th derivative at x. Nodes closer
    than :data:`CONFLUENCE_TOL` are merged (centroid) before the
    recursion; within a merged group the table entry is
    deriv(x, span)/span!. Returns ``(merged_nodes, levels)`` where
    ``levels[s][i]`` is the difference over merged_nodes[i : i+s+1]; the
    full divided difference is ``levels[-1][0]``.
    """
    pts = [complex(z) for z in nodes]
    if not pts:
        raise ValueError("divided difference needs at least one node")
    order = sorted(range(len(pts)), key=lambda i: (pts[i].real, pts[i].imag))
    groups: list[list[complex]] = []
    for i in order:
        if groups and abs(pts[i] - groups[-1][0]) <= CONFLUENCE_TOL * max(
            1.0, abs(groups[-1][0])
        ):
            groups[-1].append(pts[i])
        else:
            groups.append([pts[i]])
    zs: list[complex] = []
    gid: list[int] = []
    for g, members in enumerate(groups):
        rep = sum(members) / len(members)
        zs.extend([rep] * len(members))
        gid.extend([g] * len(members))

    n = len(zs)
    levels = [[deriv(zs[i], 0) for i in range(n)]]
    for span in range(1, n):
        nxt = []
        for i in range(n - span):
            j = i + span
            if gid[i] == gid[j]:
                nxt.append(deriv(zs[i], span) / math.factorial(span))
            else:
                nxt.append((levels[-1][i + 1] - levels[-1][i]) / (zs[j] - zs[i]))
        levels.append(nxt)
    return zs, levels


def confluent_divided_difference(deriv, nodes) -> complex:
    """Divided difference over ``nodes`` of the function behind ``deriv``."""
    _, levels = divided_difference_levels(deriv, nodes)
    return levels[-1][0]


# ---------------------------------------------------------------------------
# differentiation


@lru_cache(maxsize=None)
def _diff(node: Node, var: int) -> Node:
    if isinstance(node, Const):
        return _ZERO
    if isinstance(node, Var):
        return _ONE if node.index == var else _ZERO
    if isinstance(node, Add):
        return _add(_diff(node.lhs, var), _diff(node.rhs, var))
    if isinstance(node, Sub):
        return _sub(_diff(node.lhs, var), _diff(node.rhs, var))
    if isinstance(node, Neg):
        return _neg(_diff(node.arg, var))
    if isinstance(node, Mul):
        return _add(
            _mul(_diff(node.lhs, var), node.rhs),
            _mul(node.lhs, _diff(node.rhs, var)),
        )
    if isinstance(node, Div):
        num = _sub(
            _mul(_diff(node.lhs, var), node.rhs),
            _mul(node.lhs, _diff(node.rhs, var)),
        )
        return _div(num, _pow(node.rhs, 2))
    if isinstance(node, Pow):
        inner = _diff(node.base, var)
        return _mul(_mul(_const(node.exponent), _pow(node.base, node.exponent - 1)), inner)
    if isinstance(node, Exp):
        return _mul(Exp(node.arg), _diff(node.arg, var))
    if isinstance(node, Log):
        return _div(_diff(node.arg, var), node.arg)
    if isinstance(node, (AbsVal, MinConst)):
        raise FieldDomainError(
            f"{type(node).__name__} is an evaluation-only builtin and has no derivative"
        )
    if isinstance(node, SlotDividedDifference):
        return _diff_slot_dd(node, var)
    if isinstance(node, ProjKernel):
        raise FieldDomainError("the projector kernel is evaluation-only and has no derivative")
    raise TypeError(f"unknown node type {type(node).__name__}")


def _diff_slot_dd(node: SlotDividedDifference, var: int) -> Node:
    t = len(node.mults)
    lo, hi = node.slot, node.slot + t
    if var < lo:
        base = _diff(node.base, var)
        if _is_const(base, 0):
            return _ZERO
        return SlotDividedDifference(base, node.base_arity, node.slot, node.mults)
    if var >= hi:
        base = _diff(node.base, var - t + 1)
        if _is_const(base, 0):
            return _ZERO
        return SlotDividedDifference(base, node.base_arity, node.slot, node.mults)
    k = var - lo
    bumped = node.mults[:k] + (node.mults[k] + 1,) + node.mults[k + 1 :]
    return _mul(
        _const(node.mults[k]),
        SlotDividedDifference(node.base, node.base_arity, node.slot, bumped),
    )


def _diff_n(node: Node, var: int, n: int) -> Node:
    for _ in range(n):
        node = _diff(node, var)
    return node


# ---------------------------------------------------------------------------
# rendering

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _fmt_const(v: complex) -> tuple[str, int]:
    if v.imag == 0:
        r = v.real
        if r == int(r) and abs(r) < 1e15:
            s = str(int(r))
        else:
            s = repr(r)
        return (s, _PREC_ATOM if r >= 0 else _PREC_NEG)
    return (f"({v.real:g}{v.imag:+g}i)", _PREC_ATOM)


def _render(node: Node) -> tuple[str, int]:
    if isinstance(node, Const):
        return _fmt_const(node.value)
    if isinstance(node, Var):
        return (f"x{node.index + 1}", _PREC_ATOM)
    if isinstance(node, Add):
        a, pa = _render(node.lhs)
        b, pb = _render(node.rhs)
        return (f"{a} + {b}", _PREC_ADD)
    if isinstance(node, Sub):
        a, pa = _render(node.lhs)
        b, pb = _render(node.rhs)
        if pb <= _PREC_ADD:
            b = f"({b})"
        return (f"{a} - {b}", _PREC_ADD)
    if isinstance(node, Neg):
        a, pa = _render(node.arg)
        if pa < _PREC_NEG:
            a = f"({a})"
        return (f"-{a}", _PREC_NEG)
    if isinstance(node, Mul):
        a, pa = _render(node.lhs)
        b, pb = _render(node.rhs)
        if pa < _PREC_MUL:
            a = f"({a})"
        if pb < _PREC_MUL:
            b = f"({b})"
        return (f"{a}*{b}", _PREC_MUL)
    if isinstance(node, Div):
        a, pa = _render(node.lhs)
        b, pb = _render(node.rhs)
        if pa < _PREC_MUL:
            a = f"({a})"
        if pb <= _PREC_MUL:
            b = f"({b})"
        return (f"{a}/{b}", _PREC_MUL)
    if isinstance(node, Pow):
        a, pa = _render(node.base)
        if pa < _PREC_ATOM:
            a = f"({a})"
        e = node.exponent
        return (f"{a}^{e}" if e >= 0 else f"{a}^({e})", _PREC_POW)
    if isinstance(node, Exp):
        return (f"exp({_render(node.arg)[0]})", _PREC_ATOM)
    if isinstance(node, Log):
        return (f"log({_render(node.arg)[0]})", _PREC_ATOM)
    if isinstance(node, AbsVal):
        return (f"abs({_render(node.arg)[0]})", _PREC_ATOM)
    if isinstance(node, MinConst):
        return (f"min({_render(node.arg)[0]}, {node.bound:g})", _PREC_ATOM)
    if isinstance(node, SlotDividedDifference):
        inner, _ = _render(node.base)
        reps = ",".join(str(m) for m in node.mults)
        return (f"divdiff[slot={node.slot + 1}; reps=({reps})]({inner})", _PREC_ATOM)
    if isinstance(node, ProjKernel):
        lam, _ = _fmt_const(node.anchor)
        return (f"projkernel[{lam}; order={node.order}]", _PREC_ATOM)
    raise TypeError(f"unknown node type {type(node).__name__}")


def render(node: Node) -> str:
    return _render(node)[0]


# ---------------------------------------------------------------------------
# the public field type


class ScalarField:
    """A scalar function of ``arity`` complex variables.

    Combine fields with the usual operators; plain numbers lift to
    constants. Calling the field evaluates it, ``partial`` differentiates
    it symbolically.
    """

    __slots__ = ("arity", "root")

    def __init__(self, arity: int, root: Node):
        if arity < 0:
            raise ValueError("arity must be nonnegative")
        self.arity = int(arity)
        self.root = root

    def __call__(self, *point) -> complex:
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        if len(point) != self.arity:
            raise ValueError(f"field of arity {self.arity} called with {len(point)} arguments")
        return _eval(self.root, tuple(complex(p) for p in point))

    def partial(self, var: int) -> "ScalarField":
        if not 0 <= var < self.arity:
            raise ValueError(f"variable index {var} out of range for arity {self.arity}")
        return ScalarField(self.arity, _diff(self.root, var))

    # -- operator sugar ----------------------------------------------------

    @staticmethod
    def _coerce(other) -> Node | None:
        if isinstance(other, ScalarField):
            return other.root
        if isinstance(other, (int, float, complex)):
            return _const(other)
        return None

    def _combine(self, other, ctor, flip=False):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        arity = max(self.arity, other.arity) if isinstance(other, ScalarField) else self.arity
        a, b = (rhs, self.root) if flip else (self.root, rhs)
        return ScalarField(arity, ctor(a, b))

    def __add__(self, other):
        return self._combine(other, _add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, _sub)

    def __rsub__(self, other):
        return self._combine(other, _sub, flip=True)

    def __mul__(self, other):
        return self._combine(other, _mul)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._combine(other, _div)

    def __rtruediv__(self, other):
        return self._combine(other, _div, flip=True)

    def __neg__(self):
        return ScalarField(self.arity, _neg(self.root))

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        return ScalarField(self.arity, _pow(self.root, n))

    def __eq__(self, other):
        return (
            isinstance(other, ScalarField)
            and self.arity == other.arity
            and self.root == other.root
        )

    def __hash__(self):
        return hash((self.arity, self.root))

    def __str__(self):
        return render(self.root)

    def __repr__(self):
        return f"ScalarField(arity={self.arity}, expr={self})"


def constant(value, arity: int = 0) -> ScalarField:
    return ScalarField(arity, _const(value))


def variable(index: int, arity: int | None = None) -> ScalarField:
    """The coordinate field x_{index+1}; arity defaults to index + 1."""
    if arity is None:
        arity = index + 1
    if index >= arity:
        raise ValueError("variable index exceeds arity")
    return ScalarField(arity, Var(index))


def exp(f: ScalarField) -> ScalarField:
    return ScalarField(f.arity, Exp(f.root))


def log(f: ScalarField) -> ScalarField:
    return ScalarField(f.arity, Log(f.root))


def absval(f: ScalarField) -> ScalarField:
    return ScalarField(f.arity, AbsVal(f.root))


def min_const(f: ScalarField, bound: float) -> ScalarField:
    return ScalarField(f.arity, MinConst(f.root, float(bound)))


def with_arity(f: ScalarField, arity: int) -> ScalarField:
    """The same expression viewed as a field of more variables."""
    if arity < f.arity:
        raise ValueError("cannot shrink arity")
    return ScalarField(arity, f.root)


# ---------------------------------------------------------------------------
# variable plumbing: substitution, merging, composition


def _map_vars(node: Node, fn) -> Node:
    if isinstance(node, Const):
        return node
    if isinstance(node, Var):
        return fn(node.index)
    if isinstance(node, Add):
        return _add(_map_vars(node.lhs, fn), _map_vars(node.rhs, fn))
    if isinstance(node, Sub):
        return _sub(_map_vars(node.lhs, fn), _map_vars(node.rhs, fn))
    if isinstance(node, Mul):
        return _mul(_map_vars(node.lhs, fn), _map_vars(node.rhs, fn))
    if isinstance(node, Div):
        return _div(_map_vars(node.lhs, fn), _map_vars(node.rhs, fn))
    if isinstance(node, Neg):
        return _neg(_map_vars(node.arg, fn))
    if isinstance(node, Pow):
        return _pow(_map_vars(node.base, fn), node.exponent)
    if isinstance(node, Exp):
        return Exp(_map_vars(node.arg, fn))
    if isinstance(node, Log):
        return Log(_map_vars(node.arg, fn))
    if isinstance(node, AbsVal):
        return AbsVal(_map_vars(node.arg, fn))
    if isinstance(node, MinConst):
        return MinConst(_map_vars(node.arg, fn), node.bound)
    if isinstance(node, (SlotDividedDifference, ProjKernel)):
        raise FieldDomainError(
            f"variable substitution through a {type(node).__name__} node is not supported"
        )
    raise TypeError(f"unknown node type {type(node).__name__}")


def substitute_value(f: ScalarField, var: int, value) -> ScalarField:
    """Freeze variable ``var`` at ``value``; later variables shift down."""
    if not 0 <= var < f.arity:
        raise ValueError(f"variable index {var} out of range for arity {f.arity}")
    c = _const(value)

    def fn(i):
        if i == var:
            return c
        return Var(i - 1) if i > var else Var(i)

    return ScalarField(f.arity - 1, _map_vars(f.root, fn))


def merge_variables(f: ScalarField, keep: int, drop: int) -> ScalarField:
    """Identify variable ``drop`` with ``keep`` and remove it.

    The result has arity one less; variables above ``drop`` shift down.
    """
    if keep == drop:
        raise ValueError("keep and drop must differ")
    for v in (keep, drop):
        if not 0 <= v < f.arity:
            raise ValueError(f"variable index {v} out of range for arity {f.arity}")
    target = keep if keep < drop else keep - 1

    def fn(i):
        if i == drop:
            return Var(target)
        return Var(i - 1) if i > drop else Var(i)

    return ScalarField(f.arity - 1, _map_vars(f.root, fn))


def compose(outer: ScalarField, inners: list[ScalarField]) -> ScalarField:
    """outer(f_1(...), ..., f_r(...)) over the concatenated variable list.

    Inner field q sees the block of variables at offset
    arity(f_1) + ... + arity(f_{q-1}).
    """
    if len(inners) != outer.arity:
        raise ValueError(
            f"outer field has arity {outer.arity} but {len(inners)} inner fields were given"
        )
    offsets = []
    total = 0
    for g in inners:
        offsets.append(total)
        total += g.arity
    shifted = []
    for g, off in zip(inners, offsets):
        shifted.append(_map_vars(g.root, lambda i, off=off: Var(i + off)))

    def fn(i):
        return shifted[i]

    return ScalarField(total, _map_vars(outer.root, fn))


# ---------------------------------------------------------------------------
# derivative grids


def derivative_grid(f: ScalarField, spectra) -> dict:
    """Mixed partial derivatives of ``f`` on a spectral grid.

    ``spectra`` is one sequence per variable of ``(eigenvalue, order)``
    pairs; ``order`` is how many derivatives in that variable the grid
    carries (entries j = 0 .. order-1). Returns a dict mapping
    ``(m_tuple, j_tuple)`` (0-based positions into ``spectra``) to the
    value of (prod_l d_l^{j_l}) f at the eigenvalue tuple.
    """
    if len(spectra) != f.arity:
        raise ValueError(
            f"field of arity {f.arity} but spectra given for {len(spectra)} variables"
        )
    per_var = []
    for entries in spectra:
        entries = [(complex(lam), int(r)) for lam, r in entries]
        for _, r in entries:
            if r < 1:
                raise ValueError("every grid order must be at least 1")
        per_var.append(entries)

    max_order = [max((r for _, r in entries), default=1) for entries in per_var]

    # Mixed partials, filled by raising one index at a time.
    partials: dict[tuple[int, ...], Node] = {(0,) * f.arity: f.root}

    def partial_node(jt: tuple[int, ...]) -> Node:
        node = partials.get(jt)
        if node is not None:
            return node
        l = next(i for i, j in enumerate(jt) if j > 0)
        prev = partial_node(jt[:l] + (jt[l] - 1,) + jt[l + 1 :])
        node = _diff(prev, l)
        partials[jt] = node
        return node

    grid: dict[tuple, complex] = {}
    m_ranges = [range(len(entries)) for entries in per_var]
    for m_tuple in itertools.product(*m_ranges):
        lams = tuple(per_var[l][m][0] for l, m in enumerate(m_tuple))
        j_ranges = [range(per_var[l][m][1]) for l, m in enumerate(m_tuple)]
        for j_tuple in itertools.product(*j_ranges):
            node = partial_node(j_tuple)
            grid[(m_tuple, j_tuple)] = _eval(node, lams)
    return grid


# ---------------------------------------------------------------------------
# polynomials


class MultiPoly:
    """Polynomial in several variables, exponent tuple -> coefficient.

    Zero coefficients are never stored; the zero polynomial has an empty
    table.
    """

    __slots__ = ("arity", "coeffs")

    def __init__(self, arity: int, coeffs: dict | None = None):
        self.arity = int(arity)
        table = {}
        for alpha, c in (coeffs or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != arity:
                raise ValueError(f"exponent tuple {alpha} does not match arity {arity}")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            c = complex(c)
            if c != 0:
                table[alpha] = table.get(alpha, 0j) + c
                if table[alpha] == 0:
                    del table[alpha]
        self.coeffs = table

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and self.arity == other.arity
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.arity, frozenset(self.coeffs.items())))

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        table = dict(self.coeffs)
        for a, c in other.coeffs.items():
            table[a] = table.get(a, 0j) + c
        return MultiPoly(self.arity, table)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-1) * other

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-1) * self

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return MultiPoly(self.arity, {a: c * other for a, c in self.coeffs.items()})
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if other.arity != self.arity:
            raise ValueError("polynomial arities differ")
        table: dict[tuple, complex] = {}
        for a1, c1 in self.coeffs.items():
            for a2, c2 in other.coeffs.items():
                key = tuple(x + y for x, y in zip(a1, a2))
                table[key] = table.get(key, 0j) + c1 * c2
        return MultiPoly(self.arity, table)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.arity != self.arity:
                raise ValueError("polynomial arities differ")
            return other
        if isinstance(other, (int, float, complex)):
            return MultiPoly(self.arity, {(0,) * self.arity: other})
        return None

    def partial(self, var: int) -> "MultiPoly":
        table = {}
        for alpha, c in self.coeffs.items():
            if alpha[var] == 0:
                continue
            key = alpha[:var] + (alpha[var] - 1,) + alpha[var + 1 :]
            table[key] = table.get(key, 0j) + c * alpha[var]
        return MultiPoly(self.arity, table)

    def __call__(self, *point) -> complex:
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        if len(point) != self.arity:
            raise ValueError(f"polynomial of arity {self.arity} called with {len(point)} values")
        point = [complex(p) for p in point]
        total = 0j
        for alpha, c in self.coeffs.items():
            term = c
            for p, a in zip(point, alpha):
                term *= p**a
            total += term
        return total

    def degree(self, var: int) -> int:
        """Largest exponent of ``var``; -1 for the zero polynomial."""
        return max((alpha[var] for alpha in self.coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        return f"MultiPoly(arity={self.arity}, terms={len(self.coeffs)})"

    def __str__(self):
        return str(poly_to_field(self))


def poly_to_field(poly: MultiPoly) -> ScalarField:
    total: Node = _ZERO
    for alpha in sorted(poly.coeffs):
        term: Node = _const(poly.coeffs[alpha])
        for var, a in enumerate(alpha):
            term = _mul(term, _pow(Var(var), a))
        total = _add(total, term)
    return ScalarField(poly.arity, total)


def field_is_poly(f: ScalarField) -> MultiPoly | None:
    """The polynomial equal to ``f``, or None if ``f`` is not polynomial."""

    def walk(node: Node) -> MultiPoly | None:
        if isinstance(node, Const):
            return MultiPoly(f.arity, {(0,) * f.arity: node.value})
        if isinstance(node, Var):
            alpha = tuple(1 if i == node.index else 0 for i in range(f.arity))
            return MultiPoly(f.arity, {alpha: 1.0})
        if isinstance(node, (Add, Sub)):
            a, b = walk(node.lhs), walk(node.rhs)
            if a is None or b is None:
                return None
            return a + b if isinstance(node, Add) else a - b
        if isinstance(node, Neg):
            a = walk(node.arg)
            return None if a is None else (-1) * a
        if isinstance(node, Mul):
            a, b = walk(node.lhs), walk(node.rhs)
            if a is None or b is None:
                return None
            return a * b
        if isinstance(node, Div):
            a = walk(node.lhs)
            if a is None or not isinstance(node.rhs, Const) or node.rhs.value == 0:
                return None
            return a * (1.0 / node.rhs.value)
        if isinstance(node, Pow):
            if node.exponent < 0:
                return None
            a = walk(node.base)
            if a is None:
                return None
            out = MultiPoly(f.arity, {(0,) * f.arity: 1.0})
            for _ in range(node.exponent):
                out = out * a
            return out
        return None

    return walk(f.root)


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)

_FUNCTIONS = {"exp", "log"}


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stray = text[pos:].lstrip()
            if not stray:
                break
            raise FieldParseError(f"unexpected character {stray[0]!r} at position {pos}")
        pos = m.end()
        if m.group("num") is not None:
            tokens.append(("num", m.group("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0
        self.max_var = -1

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise FieldParseError(f"expected {op!r}, found {val!r}")

    def parse_expr(self) -> Node:
        node = self.parse_term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            rhs = self.parse_term()
            node = _add(node, rhs) if op == "+" else _sub(node, rhs)
        return node

    def parse_term(self) -> Node:
        node = self.parse_factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.take()
            rhs = self.parse_factor()
            node = _mul(node, rhs) if op == "*" else _div(node, rhs)
        return node

    def parse_factor(self) -> Node:
        if self.peek() == ("op", "-"):
            self.take()
            return _neg(self.parse_factor())
        if self.peek() == ("op", "+"):
            self.take()
            return self.parse_factor()
        return self.parse_power()

    def parse_power(self) -> Node:
        base = self.parse_atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            kind, val = self.take()
            if kind != "num" or not re.fullmatch(r"\d+", val):
                raise FieldParseError(f"exponent must be an integer literal, found {val!r}")
            return _pow(base, sign * int(val))
        return base

    def parse_atom(self) -> Node:
        kind, val = self.take()
        if kind == "num":
            return _const(float(val))
        if kind == "name":
            if val in _FUNCTIONS:
                self.expect_op("(")
                arg = self.parse_expr()
                self.expect_op(")")
                return Exp(arg) if val == "exp" else Log(arg)
            m = re.fullmatch(r"x(\d+)", val)
            if m is None:
                raise FieldParseError(f"unknown identifier {val!r}")
            idx = int(m.group(1))
            if idx < 1:
                raise FieldParseError("variables are numbered from x1")
            self.max_var = max(self.max_var, idx - 1)
            return Var(idx - 1)
        if kind == "op" and val == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise FieldParseError(f"unexpected token {val!r}")


def parse_field(text: str, arity: int | None = None) -> ScalarField:
    """Parse field text like ``"exp(x1 + x2^2) / 3"``.

    Variables are written x1, x2, ... (1-based in text, 0-based in the
    tree). If ``arity`` is omitted the highest variable mentioned sets it.
    """
    parser = _Parser(_tokenize(text))
    root = parser.parse_expr()
    kind, val = parser.peek()
    if kind != "end":
        raise FieldParseError(f"trailing input starting at {val!r}")
    inferred = parser.max_var + 1
    if arity is None:
        arity = max(inferred, 1)
    elif inferred > arity:
        raise FieldParseError(
            f"text references x{inferred} but arity {arity} was requested"
        )
    return ScalarField(arity, root)

"""Tensor-product expressions over named basis symbols and their factoring.

Concrete syntax: ``@`` is the tensor-product operator, terms are joined by
``+``/``-``, a term may carry a leading rational coefficient (``2``, ``1/2``,
optionally followed by ``*``), identifiers match ``[A-Za-z][A-Za-z0-9_^]*``
(so ``x^2`` is one opaque symbol, unrelated to ``x``), and parentheses are
allowed only around a single slot's linear combination::

    a1@b1 + a1@b2 + a2@b1 + a2@b2
    (a1 + a2)@(b1 + b2)
    -x@y + 2 x^2@y + 3 x@y^2 - 4 x^2@y^2 + x^3@y^2

Per-slot bases are inferred from the expression in first-appearance order;
a symbol may not appear in two different slot positions and all terms must
have the same number of slots.

Factoring routes:

* :func:`factor_exact_order2` - minimal (rank-many terms) for two slots, via
  the exact RREF rank decomposition of the coefficient matrix;
* :func:`factor_greedy` - the naive grouping loop, no minimality guarantee;
* :func:`factor_heuristic_higher_order` - alternating least squares for three
  or more slots, returning a verified upper bound or an explicit failure.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import List, Optional, Sequence, Tuple

from . import scalars
from .dense import DenseTensor
from .rank import rank_decompose_rref, rank_decompose_svd
from .scalars import COMPLEX, RATIONAL, REAL

__all__ = [
    "ExprSyntaxError",
    "SlotVector",
    "Term",
    "TensorExpr",
    "SlotBasis",
    "parse",
    "render",
    "infer_bases",
    "to_coefficient_tensor",
    "expand",
    "factor_exact_order2",
    "factor_greedy",
    "factor_heuristic_higher_order",
    "term_factor_vectors",
    "expr_to_json",
    "expr_from_json",
    "ALS_SEED",
    "ALS_SWEEPS",
    "ALS_RESTARTS",
    "ALS_TOL",
]

# ALS defaults; every knob is also a keyword of factor_heuristic_higher_order
ALS_SEED = 0
ALS_SWEEPS = 500
ALS_RESTARTS = 20
ALS_TOL = 1e-8


class ExprSyntaxError(ValueError):
    """Malformed expression text; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SlotVector:
    """Formal linear combination of basis symbols filling one slot."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        combined = {}
        order = []
        for sym, coeff in entries:
            if sym in combined:
                combined[sym] = combined[sym] + coeff
            else:
                combined[sym] = coeff
                order.append(sym)
        object.__setattr__(
            self,
            "entries",
            tuple((s, combined[s]) for s in order if combined[s] != 0),
        )

    def __setattr__(self, name, value):
        raise AttributeError("SlotVector is immutable")

    def symbols(self):
        return tuple(s for s, _ in self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def scaled(self, lam) -> "SlotVector":
        return SlotVector(tuple((s, lam * c) for s, c in self.entries))

    def plus(self, other: "SlotVector") -> "SlotVector":
        return SlotVector(self.entries + other.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SlotVector):
            return NotImplemented
        return dict(self.entries) == dict(other.entries)

    __hash__ = None

    def __repr__(self) -> str:
        return f"SlotVector({self.entries!r})"


@dataclass(frozen=True, eq=True)
class Term:
    coefficient: object
    slots: tuple  # one SlotVector per slot


@dataclass(frozen=True, eq=False)
class TensorExpr:
    terms: tuple
    field: str = RATIONAL

    @property
    def order(self) -> int:
        """Slot count; 0 for the empty (zero) expression."""
        return len(self.terms[0].slots) if self.terms else 0

    def __eq__(self, other) -> bool:
        # term multisets: the listing order carries no meaning, and two
        # expansions of the same tensor may infer their bases in different
        # first-appearance orders
        if not isinstance(other, TensorExpr):
            return NotImplemented
        if self.field != other.field or len(self.terms) != len(other.terms):
            return False
        remaining = list(other.terms)
        for t in self.terms:
            for i, s in enumerate(remaining):
                if t == s:
                    del remaining[i]
                    break
            else:
                return False
        return True

    __hash__ = None

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class SlotBasis:
    per_slot: tuple  # one tuple of symbols per slot

    @property
    def dims(self) -> tuple:
        return tuple(len(s) for s in self.per_slot)


# -- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<num>\d+(?:/\d+)?)|(?P<ident>[A-Za-z][A-Za-z0-9_^]*)|(?P<op>[@+\-*()])"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "num":
            tokens.append(("num", Fraction(m.group()), pos))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group(), pos))
        elif m.lastgroup == "op":
            tokens.append((m.group(), m.group(), pos))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ExprSyntaxError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def parse_expression(self) -> List[Term]:
        terms = []
        sign = Fraction(1)
        if self.peek()[0] == "-":
            self.next()
            sign = Fraction(-1)
        terms.append(self.parse_term(sign))
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            terms.append(self.parse_term(Fraction(-1) if op == "-" else Fraction(1)))
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return terms

    def parse_term(self, sign: Fraction) -> Term:
        coeff = sign
        if self.peek()[0] == "num":
            coeff = coeff * self.next()[1]
            if self.peek()[0] == "*":
                self.next()
        slots = [self.parse_slot()]
        while self.peek()[0] == "@":
            self.next()
            slots.append(self.parse_slot())
        return Term(coeff, tuple(slots))

    def parse_slot(self) -> SlotVector:
        tok = self.peek()
        if tok[0] == "ident":
            self.next()
            return SlotVector(((tok[1], Fraction(1)),))
        if tok[0] == "(":
            self.next()
            sv = self.parse_combo()
            self.expect(")")
            return sv
        raise ExprSyntaxError(f"expected a symbol or '(', found {tok[1]!r}", tok[2])

    def parse_combo(self) -> SlotVector:
        entries = []
        sign = Fraction(1)
        if self.peek()[0] == "-":
            self.next()
            sign = Fraction(-1)
        entries.append(self.parse_combo_entry(sign))
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            entries.append(
                self.parse_combo_entry(Fraction(-1) if op == "-" else Fraction(1))
            )
        return SlotVector(entries)

    def parse_combo_entry(self, sign: Fraction):
        coeff = sign
        if self.peek()[0] == "num":
            coeff = coeff * self.next()[1]
            if self.peek()[0] == "*":
                self.next()
        tok = self.expect("ident")
        return (tok[1], coeff)


def _validate(terms: Sequence[Term]):
    if not terms:
        return
    m = len(terms[0].slots)
    for idx, t in enumerate(terms):
        if len(t.slots) != m:
            raise ExprSyntaxError(
                f"mixed term order: term {idx + 1} has {len(t.slots)} slot(s), expected {m}",
                0,
            )
    seen = {}
    for t in terms:
        for k, sv in enumerate(t.slots):
            for sym in sv.symbols():
                if seen.setdefault(sym, k) != k:
                    raise ExprSyntaxError(
                        f"symbol {sym!r} appears in slot {seen[sym] + 1} and slot {k + 1}",
                        0,
                    )


def parse(text: str) -> TensorExpr:
    """Parse expression text into a :class:`TensorExpr` (rational field)."""
    terms = _Parser(text).parse_expression()
    _validate(terms)
    return TensorExpr(tuple(terms), RATIONAL)


# -- rendering ---------------------------------------------------------------


def _scalar_str(field: str, value) -> str:
    if field == RATIONAL:
        return str(value)
    if field == REAL:
        return repr(value)
    re_part, im_part = value.real, value.imag
    op = "+" if im_part >= 0 else "-"
    return f"({re_part!r}{op}{abs(im_part)!r}i)"


def _split_sign(field: str, coeff):
    if field == COMPLEX:
        return 1, coeff
    return (-1, -coeff) if coeff < 0 else (1, coeff)


def _render_slot(field: str, sv: SlotVector) -> str:
    if sv.is_zero():
        return "(0)"
    if len(sv.entries) == 1 and sv.entries[0][1] == scalars.one(field):
        return sv.entries[0][0]
    pieces = []
    for idx, (sym, coeff) in enumerate(sv.entries):
        sgn, mag = _split_sign(field, coeff)
        body = sym if mag == scalars.one(field) else f"{_scalar_str(field, mag)} {sym}"
        if idx == 0:
            pieces.append(("-" if sgn < 0 else "") + body)
        else:
            pieces.append(("- " if sgn < 0 else "+ ") + body)
    return "(" + " ".join(pieces) + ")"


def render(e: TensorExpr) -> str:
    """Canonical textual form; inverse of :func:`parse` on canonical input."""
    if not e.terms:
        return "0"
    parts = []
    for idx, t in enumerate(e.terms):
        sgn, mag = _split_sign(e.field, t.coefficient)
        body = "@".join(_render_slot(e.field, sv) for sv in t.slots)
        if mag != scalars.one(e.field):
            body = f"{_scalar_str(e.field, mag)} {body}"
        if idx == 0:
            parts.append(("-" if sgn < 0 else "") + body)
        else:
            parts.append(("- " if sgn < 0 else "+ ") + body)
    return " ".join(parts)


# -- coefficient tensor and expansion ----------------------------------------


def _live_terms(terms) -> tuple:
    """Terms that can contribute: none of their slot combinations is zero."""
    return tuple(t for t in terms if all(not sv.is_zero() for sv in t.slots))


def infer_bases(e: TensorExpr) -> SlotBasis:
    """Per-slot symbol lists in first-appearance order (contributing terms only)."""
    m = e.order
    per_slot = [[] for _ in range(m)]
    for t in _live_terms(e.terms):
        for k, sv in enumerate(t.slots):
            for sym in sv.symbols():
                if sym not in per_slot[k]:
                    per_slot[k].append(sym)
    return SlotBasis(tuple(tuple(s) for s in per_slot))


def to_coefficient_tensor(e: TensorExpr) -> Tuple[DenseTensor, SlotBasis]:
    """Collect the summed coefficient of every pure basis term."""
    _validate(e.terms)
    live = _live_terms(e.terms)
    basis = infer_bases(e)
    dims = basis.dims
    if not live:
        raise ValueError("cannot build a coefficient tensor: no contributing terms")
    index = [{sym: i for i, sym in enumerate(slot)} for slot in basis.per_slot]
    total = 1
    for d in dims:
        total *= d
    coeffs = [scalars.zero(e.field)] * total
    for t in live:
        partial = [(0, scalars.coerce(e.field, t.coefficient))]
        for k, sv in enumerate(t.slots):
            d_k = dims[k]
            nxt = []
            for off, c in partial:
                for sym, sc in sv.entries:
                    nxt.append((off * d_k + index[k][sym], c * scalars.coerce(e.field, sc)))
            partial = nxt
        for off, c in partial:
            coeffs[off] += c
    return DenseTensor(dims, coeffs, e.field), basis


def expand(e: TensorExpr) -> TensorExpr:
    """Fully distributed canonical form: pure-symbol terms, coefficients
    collected, zero terms dropped, lexicographic order in the slot indices."""
    if not _live_terms(e.terms):
        return TensorExpr((), e.field)
    tensor, basis = to_coefficient_tensor(e)
    dims = basis.dims
    zero = scalars.zero(e.field)
    one = scalars.one(e.field)
    terms = []
    for off, c in enumerate(tensor.coeffs):
        if c == zero:
            continue
        idx = []
        rem = off
        for d in reversed(dims):
            idx.append(rem % d)
            rem //= d
        idx.reverse()
        slots = tuple(
            SlotVector(((basis.per_slot[k][i], one),)) for k, i in enumerate(idx)
        )
        terms.append(Term(c, slots))
    return TensorExpr(tuple(terms), e.field)


# -- factoring ----------------------------------------------------------------


def factor_exact_order2(e: TensorExpr, route: str = "rref") -> TensorExpr:
    """Minimal factorization for two-slot expressions via rank decomposition
    of the coefficient matrix; term count equals the rank.

    The default ``"rref"`` route is exact and deterministic, so its output is
    reproducible factor for factor.  The ``"svd"`` route works in floats and
    returns a real-field expression whose factors are equally valid but not
    unique; re-expansion then holds to tolerance instead of exactly.
    """
    if route not in ("rref", "svd"):
        raise ValueError(f"route must be 'rref' or 'svd', got {route!r}")
    if e.terms and e.order != 2:
        raise ValueError(f"exact factoring needs exactly 2 slots, got {e.order}")
    if e.field != RATIONAL:
        raise scalars.FieldMismatchError("exact factoring works in the rational field")
    out_field = RATIONAL if route == "rref" else REAL
    if not _live_terms(e.terms):
        return TensorExpr((), out_field)
    tensor, basis = to_coefficient_tensor(e)
    n, m = tensor.shape
    rows = [[tensor.coeffs[i * m + j] for j in range(m)] for i in range(n)]
    if route == "rref":
        dec = rank_decompose_rref(rows)
    else:
        dec = rank_decompose_svd([[float(x) for x in row] for row in rows])
    one = scalars.one(out_field)
    terms = []
    for l in range(dec.r):
        left = SlotVector(
            tuple((basis.per_slot[0][i], dec.d1[l][i]) for i in range(n))
        )
        right = SlotVector(
            tuple((basis.per_slot[1][j], dec.d2[l][j]) for j in range(m))
        )
        terms.append(Term(one, (left, right)))
    return TensorExpr(tuple(terms), out_field)


def factor_greedy(e: TensorExpr, direction: str = "left") -> TensorExpr:
    """Naive grouping: repeatedly merge term pairs that agree on all slots
    but one.  ``direction`` picks which slot is tried first ("left" merges
    the first-slot factors first, "right" the last-slot factors).  The
    result re-expands to the input but need not be minimal; the loop can
    get stuck above the rank.
    """
    if direction not in ("left", "right"):
        raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")
    ex = expand(e)
    if not ex.terms:
        return ex
    m = ex.order
    if m < 2:
        raise ValueError("grouping needs at least 2 slots")
    slot_order = list(range(m)) if direction == "left" else list(range(m - 1, -1, -1))
    work = [(t.coefficient, list(t.slots)) for t in ex.terms]
    one = scalars.one(ex.field)

    def merge_at(k: int) -> bool:
        for i in range(len(work)):
            ci, si = work[i]
            for j in range(i + 1, len(work)):
                cj, sj = work[j]
                if all(si[x] == sj[x] for x in range(m) if x != k):
                    merged = si[k].scaled(ci).plus(sj[k].scaled(cj))
                    del work[j]
                    if merged.is_zero():
                        del work[i]
                    else:
                        slots = list(si)
                        slots[k] = merged
                        work[i] = (one, slots)
                    return True
        return False

    changed = True
    while changed:
        changed = False
        for k in slot_order:
            while merge_at(k):
                changed = True
    return TensorExpr(
        tuple(Term(c, tuple(slots)) for c, slots in work), ex.field
    )


# -- alternating least squares for order >= 3 ---------------------------------


def _solve_linear(A, b):
    """Gaussian elimination with partial pivoting; works for float/complex."""
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(M[r][col]))
        if abs(M[piv][col]) < 1e-250:
            raise ArithmeticError("singular system")
        M[col], M[piv] = M[piv], M[col]
        inv = 1.0 / M[col][col]
        for r in range(col + 1, n):
            f = M[r][col] * inv
            if f != 0:
                for c in range(col, n + 1):
                    M[r][c] -= f * M[col][c]
    x = [0] * n
    for r in range(n - 1, -1, -1):
        s = M[r][n] - sum(M[r][c] * x[c] for c in range(r + 1, n))
        x[r] = s / M[r][r]
    return x


def _als_reconstruct_residual(dims, target, factors) -> float:
    res = 0.0
    r = len(factors[0][0])
    for off, multi in enumerate(iter_product(*[range(d) for d in dims])):
        val = 0
        for l in range(r):
            p = 1
            for k, i in enumerate(multi):
                p *= factors[k][i][l]
            val += p
        res = max(res, abs(val - target[off]))
    return res


def _als_fit(dims, target, r, field, rng, sweeps, tol) -> Tuple[float, Optional[list]]:
    m = len(dims)
    if field == COMPLEX:
        factors = [
            [[complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(r)] for _ in range(d)]
            for d in dims
        ]
    else:
        factors = [
            [[rng.uniform(-1, 1) for _ in range(r)] for _ in range(d)] for d in dims
        ]
    strides = [1] * m
    for k in range(m - 2, -1, -1):
        strides[k] = strides[k + 1] * dims[k + 1]
    best = math.inf
    stale = 0
    for _ in range(sweeps):
        for n in range(m):
            other = [k for k in range(m) if k != n]
            rows = []  # (base offset, Khatri-Rao row)
            for multi in iter_product(*[range(dims[k]) for k in other]):
                base = sum(i * strides[k] for k, i in zip(other, multi))
                row = []
                for l in range(r):
                    p = 1
                    for k, i in zip(other, multi):
                        p *= factors[k][i][l]
                    row.append(p)
                rows.append((base, row))
            gram = [
                [
                    sum(row[l1].conjugate() * row[l2] for _, row in rows)
                    for l2 in range(r)
                ]
                for l1 in range(r)
            ]
            try:
                for i in range(dims[n]):
                    rhs = [
                        sum(
                            row[l].conjugate() * target[base + i * strides[n]]
                            for base, row in rows
                        )
                        for l in range(r)
                    ]
                    factors[n][i] = _solve_linear(gram, rhs)
            except ArithmeticError:
                return math.inf, None
        res = _als_reconstruct_residual(dims, target, factors)
        if res <= tol:
            return res, factors
        if res < best - 1e-14:
            best = res
            stale = 0
        else:
            stale += 1
            if stale >= 5:
                break
    return best, None


def factor_heuristic_higher_order(
    e: TensorExpr,
    max_rank: int,
    field: str = REAL,
    *,
    seed: int = ALS_SEED,
    sweeps: int = ALS_SWEEPS,
    restarts: int = ALS_RESTARTS,
    tol: float = ALS_TOL,
) -> Tuple[TensorExpr, str]:
    """ALS sweep over candidate ranks 1..max_rank for order >= 3 expressions.

    Returns ``(expression, status)``.  On the first rank whose fit re-expands
    within ``tol`` (max-component residual) the factored expression is
    returned with status ``"verified-upper-bound"``; this is an upper bound
    on the rank, never a minimality claim.  If no candidate rank fits, the
    input is returned unchanged with status ``"failed"``.  Restart ``i``
    draws from ``random.Random(seed + i)``, so results are reproducible no
    matter how restarts are scheduled.
    """
    if e.terms and e.order < 3:
        raise ValueError(
            f"heuristic factoring needs at least 3 slots, got {e.order}; "
            "use the exact or greedy routes"
        )
    if field not in (REAL, COMPLEX):
        raise ValueError("heuristic factoring works over the real or complex field")
    if max_rank < 1:
        raise ValueError("max_rank must be >= 1")
    if not _live_terms(e.terms):
        return TensorExpr((), field), "verified-upper-bound"
    tensor, basis = to_coefficient_tensor(e)
    target = [scalars.coerce(field, c) for c in tensor.coeffs]
    if all(c == scalars.zero(field) for c in target):
        return TensorExpr((), field), "verified-upper-bound"
    dims = tensor.shape
    one = scalars.one(field)
    zero = scalars.zero(field)
    for r in range(1, max_rank + 1):
        for restart in range(restarts):
            rng = random.Random(seed + restart)
            res, factors = _als_fit(dims, target, r, field, rng, sweeps, tol)
            if factors is None:
                continue
            terms = []
            for l in range(r):
                slots = tuple(
                    SlotVector(
                        tuple(
                            (basis.per_slot[k][i], factors[k][i][l])
                            for i in range(dims[k])
                            if factors[k][i][l] != zero
                        )
                    )
                    for k in range(len(dims))
                )
                terms.append(Term(one, slots))
            return TensorExpr(tuple(terms), field), "verified-upper-bound"
    return e, "failed"


def term_factor_vectors(e: TensorExpr, basis: Optional[SlotBasis] = None):
    """One order-1 coefficient vector per slot of each term, over ``basis``.

    Bridges factored expressions to rank-1 term lists so a factorization can
    be checked by re-expansion against the coefficient tensor.
    """
    if basis is None:
        basis = infer_bases(e)
    out = []
    for t in e.terms:
        factors = []
        for k, sv in enumerate(t.slots):
            lookup = dict(sv.entries)
            coeff = scalars.coerce(e.field, t.coefficient) if k == 0 else scalars.one(e.field)
            factors.append(
                DenseTensor.vector(
                    [
                        coeff * scalars.coerce(e.field, lookup.get(sym, 0))
                        for sym in basis.per_slot[k]
                    ],
                    e.field,
                )
            )
        out.append(factors)
    return out


# -- JSON AST ------------------------------------------------------------------


def expr_to_json(e: TensorExpr) -> dict:
    return {
        "field": e.field,
        "order": e.order,
        "terms": [
            {
                "coefficient": scalars.to_json(e.field, scalars.coerce(e.field, t.coefficient)),
                "slots": [
                    [[sym, scalars.to_json(e.field, scalars.coerce(e.field, c))] for sym, c in sv.entries]
                    for sv in t.slots
                ],
            }
            for t in e.terms
        ],
    }


def expr_from_json(obj: dict) -> TensorExpr:
    field = scalars.check_field(obj.get("field", RATIONAL))
    terms = []
    for t in obj["terms"]:
        coeff = scalars.from_json(field, t["coefficient"])
        slots = tuple(
            SlotVector(tuple((sym, scalars.from_json(field, c)) for sym, c in sv))
            for sv in t["slots"]
        )
        terms.append(Term(coeff, slots))
    out = TensorExpr(tuple(terms), field)
    _validate(out.terms)
    return out

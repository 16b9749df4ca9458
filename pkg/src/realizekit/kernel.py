"""Two concrete computability models over a single code space.

UREC is the partial model: it has an ``Apply`` opcode, so any coded program
can be run on a value from inside another program.  TOTAL is the same
calculus without ``Apply``; every TOTAL program terminates.  Both models
share one total Goedel numbering of program syntax, so every natural number
is a code at every arity.

The module exposes the pairing bijection, the numbering, a fuel-bounded
deterministic evaluator, index combinators (composition, constants,
conditionals, specialization, permutation, dummy arguments), the tower of
overuniversal interpreters for UREC, and a small term language with sampled
Kleene-equality checking.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence, Union

from realizekit._backend import impl as _impl

TAG_PROJ = 0
TAG_LIT = 1
TAG_PAIR = 2
TAG_FST = 3
TAG_SND = 4
TAG_COMP = 5
TAG_IF0 = 6
TAG_SUCC = 7
TAG_SMN = 8
TAG_CONST = 9
TAG_APPLY = 10


class Model(Enum):
    UREC = "urec"
    TOTAL = "total"


class ModelCapabilityError(Exception):
    """Raised when a construction needs Apply but the model is TOTAL."""


# --- program syntax ---------------------------------------------------------


@dataclass(frozen=True)
class Ast:
    pass


@dataclass(frozen=True)
class Proj(Ast):
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("projection index is 1-based")


@dataclass(frozen=True)
class Lit(Ast):
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("literals are naturals")


@dataclass(frozen=True)
class Pair(Ast):
    left: Ast
    right: Ast


@dataclass(frozen=True)
class Fst(Ast):
    arg: Ast


@dataclass(frozen=True)
class Snd(Ast):
    arg: Ast


@dataclass(frozen=True)
class Comp(Ast):
    head: Ast
    args: tuple[Ast, ...]


@dataclass(frozen=True)
class If0(Ast):
    cond: Ast
    then_branch: Ast
    else_branch: Ast


@dataclass(frozen=True)
class Succ(Ast):
    arg: Ast


@dataclass(frozen=True)
class SmnCode(Ast):
    """Specialize at runtime: ``target`` evaluates to pair(arity, code),
    ``value`` to the number fixed as that program's last argument."""

    target: Ast
    value: Ast


@dataclass(frozen=True)
class ConstCode(Ast):
    arg: Ast


@dataclass(frozen=True)
class Apply(Ast):
    fn: Ast
    arg: Ast


def to_tuple(ast: Ast):
    if isinstance(ast, Proj):
        return (TAG_PROJ, ast.index)
    if isinstance(ast, Lit):
        return (TAG_LIT, ast.value)
    if isinstance(ast, Pair):
        return (TAG_PAIR, to_tuple(ast.left), to_tuple(ast.right))
    if isinstance(ast, Fst):
        return (TAG_FST, to_tuple(ast.arg))
    if isinstance(ast, Snd):
        return (TAG_SND, to_tuple(ast.arg))
    if isinstance(ast, Comp):
        return (TAG_COMP, to_tuple(ast.head), tuple(to_tuple(a) for a in ast.args))
    if isinstance(ast, If0):
        return (TAG_IF0, to_tuple(ast.cond), to_tuple(ast.then_branch), to_tuple(ast.else_branch))
    if isinstance(ast, Succ):
        return (TAG_SUCC, to_tuple(ast.arg))
    if isinstance(ast, SmnCode):
        return (TAG_SMN, to_tuple(ast.target), to_tuple(ast.value))
    if isinstance(ast, ConstCode):
        return (TAG_CONST, to_tuple(ast.arg))
    if isinstance(ast, Apply):
        return (TAG_APPLY, to_tuple(ast.fn), to_tuple(ast.arg))
    raise TypeError(f"not a program ast: {ast!r}")


def from_tuple(t) -> Ast:
    tag = t[0]
    if tag == TAG_PROJ:
        return Proj(t[1])
    if tag == TAG_LIT:
        return Lit(t[1])
    if tag == TAG_PAIR:
        return Pair(from_tuple(t[1]), from_tuple(t[2]))
    if tag == TAG_FST:
        return Fst(from_tuple(t[1]))
    if tag == TAG_SND:
        return Snd(from_tuple(t[1]))
    if tag == TAG_COMP:
        return Comp(from_tuple(t[1]), tuple(from_tuple(a) for a in t[2]))
    if tag == TAG_IF0:
        return If0(from_tuple(t[1]), from_tuple(t[2]), from_tuple(t[3]))
    if tag == TAG_SUCC:
        return Succ(from_tuple(t[1]))
    if tag == TAG_SMN:
        return SmnCode(from_tuple(t[1]), from_tuple(t[2]))
    if tag == TAG_CONST:
        return ConstCode(from_tuple(t[1]))
    if tag == TAG_APPLY:
        return Apply(from_tuple(t[1]), from_tuple(t[2]))
    raise ValueError(f"bad tag {tag}")


def ast_size(ast: Ast) -> int:
    t = to_tuple(ast)
    return _tuple_size(t)


def _tuple_size(t) -> int:
    tag = t[0]
    if tag in (TAG_PROJ, TAG_LIT):
        return 1
    if tag == TAG_COMP:
        return 1 + _tuple_size(t[1]) + sum(_tuple_size(a) for a in t[2])
    return 1 + sum(_tuple_size(c) for c in t[1:])


def contains_apply(ast: Ast) -> bool:
    def walk(t) -> bool:
        tag = t[0]
        if tag == TAG_APPLY:
            return True
        if tag in (TAG_PROJ, TAG_LIT):
            return False
        if tag == TAG_COMP:
            return walk(t[1]) or any(walk(a) for a in t[2])
        return any(walk(c) for c in t[1:])

    return walk(to_tuple(ast))


# --- pairing and numbering --------------------------------------------------


def pair(a: int, b: int) -> int:
    """Cantor pairing (a+b)(a+b+1)/2 + a; a bijection of pairs onto naturals."""
    return _impl.pair(a, b)


def proj1(n: int) -> int:
    return _impl.unpair(n)[0]


def proj2(n: int) -> int:
    return _impl.unpair(n)[1]


def unpair(n: int) -> tuple[int, int]:
    return _impl.unpair(n)


def encode(ast: Ast) -> int:
    return _impl.encode_ast(to_tuple(ast))


def decode(code: int, model: Model = Model.UREC) -> Ast:
    """Total on naturals.  In TOTAL, apply nodes normalize to ``Lit(0)``."""
    if code < 0:
        raise ValueError("codes are naturals")
    return from_tuple(_impl.decode_ast(code, model is Model.TOTAL))


# --- evaluation -------------------------------------------------------------


@dataclass(frozen=True)
class Converged:
    value: int


class OutOfFuel:
    def __repr__(self):
        return "OutOfFuel"


class Diverged:
    def __repr__(self):
        return "Diverged"


OUT_OF_FUEL = OutOfFuel()
DIVERGED = Diverged()

EvalOutcome = Union[Converged, OutOfFuel, Diverged]

_caches = {Model.UREC: {}, Model.TOTAL: {}}


def _ensure_stack() -> None:
    limit = sys.getrecursionlimit()
    if limit < 100000:
        sys.setrecursionlimit(100000)


def eval_code(model: Model, code: int, args: Sequence[int], fuel: int) -> EvalOutcome:
    """Run the program coded by ``code`` on ``args`` with a fuel budget.

    Deterministic and monotone in fuel: a converged outcome is preserved by
    any larger budget.  Every ast node entered costs one unit.
    """
    if code < 0 or fuel < 0:
        raise ValueError("code and fuel are naturals")
    _ensure_stack()
    st, v, _ = _impl.eval_code(
        code, tuple(args), fuel, model is Model.TOTAL, _caches[model]
    )
    if st == 0:
        return Converged(v)
    if st == 1:
        return OUT_OF_FUEL
    return DIVERGED


def eval_ast(model: Model, ast: Ast, args: Sequence[int], fuel: int) -> EvalOutcome:
    return eval_code(model, encode(ast), args, fuel)


# --- index combinators ------------------------------------------------------


def _decoded(code: int, model: Model) -> Ast:
    return decode(code, model)


def _restrict(code: int, arity: int, model: Model) -> Ast:
    """Ast calling ``code`` at exactly ``arity``, ignoring extra arguments."""
    return Comp(_decoded(code, model), tuple(Proj(i) for i in range(1, arity + 1)))


def compose_index(
    e: int, es: Sequence[int], arities: Sequence[int], model: Model = Model.UREC
) -> int:
    """Index of the composition of ``e`` with programs ``es``.

    The i-th inner program is run at its declared arity on the shared
    argument list; ``e`` is run on the inner results.
    """
    if len(es) != len(arities):
        raise ValueError("one arity per inner program")
    inner = tuple(_restrict(c, n, model) for c, n in zip(es, arities))
    return encode(Comp(_decoded(e, model), inner))


def const_index(k: int) -> int:
    return encode(Lit(k))


def cond_index(e1: int, e2: int, n: int, model: Model = Model.UREC) -> int:
    """Dispatch on the last of n+1 arguments: 0 selects e1, anything else e2."""
    return encode(
        If0(Proj(n + 1), _restrict(e1, n, model), _restrict(e2, n, model))
    )


def cond_prime_index(e1: int, e2: int, n: int, model: Model = Model.UREC) -> int:
    """Dispatch on the first component of the last argument, feeding the
    second component to the selected branch as its own last argument."""
    shared = tuple(Proj(i) for i in range(1, n + 1))
    lhs = Comp(_decoded(e1, model), shared + (Snd(Proj(n + 1)),))
    rhs = Comp(_decoded(e2, model), shared + (Snd(Proj(n + 1)),))
    return encode(If0(Fst(Proj(n + 1)), lhs, rhs))


def specialize_last(e: int, arity: int, k: int, model: Model = Model.UREC) -> int:
    """Fix the last of ``arity`` arguments of ``e`` to the value ``k``."""
    _ensure_stack()
    return _impl.specialize_last(e, arity, k, model is Model.TOTAL, _caches[model])


def smn_index(e: int, ks: Sequence[int], n: int, model: Model = Model.UREC) -> int:
    """Index of x1..xn |-> e(x1..xn, k1..km), by iterated specialization of
    the last argument."""
    code = e
    arity = n + len(ks)
    for k in reversed(list(ks)):
        code = specialize_last(code, arity, k, model)
        arity -= 1
    return code


def permute_index(e: int, perm: Sequence[int], model: Model = Model.UREC) -> int:
    """Index of x1..xn |-> e(x_{perm(1)}, ..., x_{perm(n)})."""
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}: {perm!r}")
    return encode(Comp(_decoded(e, model), tuple(Proj(i) for i in perm)))


def dummy_index(e: int, n: int, model: Model = Model.UREC) -> int:
    """Index of an (n+1)-ary program ignoring its last argument."""
    return encode(_restrict(e, n, model))


# --- overuniversal tower ----------------------------------------------------

APPLY1 = Apply(Proj(1), Proj(2))


def overuniversal_ast(n: int) -> Ast:
    """Program of arity n+1 running its first argument as an n-ary code.

    Converges with the coded program's value whenever that program converges.
    Level n+1 folds the last argument into the code (a runtime
    specialization) and delegates to level n; level 1 is the apply opcode.
    """
    if n < 1:
        raise ValueError("arity must be at least 1")
    if n == 1:
        return APPLY1
    prev = overuniversal_ast(n - 1)
    folded = SmnCode(Pair(Lit(n), Proj(1)), Proj(n + 1))
    return Comp(prev, (folded,) + tuple(Proj(i) for i in range(2, n + 1)))


def overuniversal_index(n: int, model: Model = Model.UREC) -> int:
    if model is Model.TOTAL:
        raise ModelCapabilityError(
            "the TOTAL model has no overuniversal function; diagonalization refutes every candidate"
        )
    return encode(overuniversal_ast(n))


# --- value terms and Kleene equality ----------------------------------------


@dataclass(frozen=True)
class VTerm:
    pass


@dataclass(frozen=True)
class VNat(VTerm):
    value: int


@dataclass(frozen=True)
class VVar(VTerm):
    name: str


@dataclass(frozen=True)
class VApp(VTerm):
    code: int
    arity: int
    args: tuple[VTerm, ...]

    def __post_init__(self):
        if len(self.args) != self.arity:
            raise ValueError("argument count must match the declared arity")


def vterm_vars(t: VTerm) -> set[str]:
    if isinstance(t, VVar):
        return {t.name}
    if isinstance(t, VApp):
        out: set[str] = set()
        for a in t.args:
            out |= vterm_vars(a)
        return out
    return set()


def vterm_eval(
    t: VTerm, subst: Mapping[str, int], fuel: int, model: Model = Model.UREC
) -> EvalOutcome:
    """Value of a term under a substitution; arguments evaluate left to right."""
    if isinstance(t, VNat):
        return Converged(t.value)
    if isinstance(t, VVar):
        if t.name not in subst:
            raise ValueError(f"unbound term variable {t.name!r}")
        return Converged(subst[t.name])
    vals = []
    for a in t.args:
        out = vterm_eval(a, subst, fuel, model)
        if not isinstance(out, Converged):
            return out
        vals.append(out.value)
    return eval_code(model, t.code, vals, fuel)


@dataclass(frozen=True)
class AgreeOnSamples:
    samples: int


@dataclass(frozen=True)
class DisagreeAt:
    subst: tuple[tuple[str, int], ...]
    left: EvalOutcome
    right: EvalOutcome


@dataclass(frozen=True)
class Unknown:
    reason: str


def kleene_equal(
    t1: VTerm,
    t2: VTerm,
    variables: Sequence[str],
    samples: int,
    fuel: int,
    model: Model = Model.UREC,
    seed: int = 0,
):
    """Sampled Kleene equality: both sides undefined, or both defined and
    equal, on every sampled substitution.  Fuel exhaustion never refutes."""
    free = vterm_vars(t1) | vterm_vars(t2)
    if not free <= set(variables):
        raise ValueError(f"unlisted free variables: {sorted(free - set(variables))}")
    import random

    rng = random.Random(seed)
    saw_unknown = False
    for _ in range(samples):
        subst = {v: rng.randrange(0, 64) for v in variables}
        left = vterm_eval(t1, subst, fuel, model)
        right = vterm_eval(t2, subst, fuel, model)
        if left is OUT_OF_FUEL or right is OUT_OF_FUEL:
            saw_unknown = True
            continue
        defined_l = isinstance(left, Converged)
        defined_r = isinstance(right, Converged)
        if defined_l != defined_r or (defined_l and left.value != right.value):
            return DisagreeAt(tuple(sorted(subst.items())), left, right)
    if saw_unknown:
        return Unknown("out-of-fuel samples")
    return AgreeOnSamples(samples)


# --- textual form -----------------------------------------------------------

_SEXPR_NAMES = {
    TAG_PROJ: "proj",
    TAG_LIT: "lit",
    TAG_PAIR: "pair",
    TAG_FST: "fst",
    TAG_SND: "snd",
    TAG_COMP: "comp",
    TAG_IF0: "if0",
    TAG_SUCC: "succ",
    TAG_SMN: "smn",
    TAG_CONST: "const",
    TAG_APPLY: "apply",
}
_SEXPR_TAGS = {v: k for k, v in _SEXPR_NAMES.items()}


def ast_to_sexpr(ast: Ast) -> str:
    t = to_tuple(ast)
    return _sexpr_of(t)


def _sexpr_of(t) -> str:
    tag = t[0]
    name = _SEXPR_NAMES[tag]
    if tag in (TAG_PROJ, TAG_LIT):
        return f"({name} {t[1]})"
    if tag == TAG_COMP:
        args = " ".join(_sexpr_of(a) for a in t[2])
        return f"({name} {_sexpr_of(t[1])} ({args}))"
    parts = " ".join(_sexpr_of(c) for c in t[1:])
    return f"({name} {parts})"


def ast_from_sexpr(text: str) -> Ast:
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        if tok != "(":
            raise ValueError(f"expected '(' at token {pos - 1}, got {tok!r}")
        if pos >= len(tokens):
            raise ValueError("unexpected end of input")
        name = tokens[pos]
        pos += 1
        if name not in _SEXPR_TAGS:
            raise ValueError(f"unknown form {name!r}")
        tag = _SEXPR_TAGS[name]
        if tag in (TAG_PROJ, TAG_LIT):
            val = int(tokens[pos])
            pos += 1
            node = (tag, val)
        elif tag == TAG_COMP:
            head = parse()
            if tokens[pos] != "(":
                raise ValueError("composition arguments must be parenthesized")
            pos += 1
            args = []
            while tokens[pos] != ")":
                args.append(parse())
            pos += 1
            node = (tag, head, tuple(args))
        elif tag == TAG_IF0:
            node = (tag, parse(), parse(), parse())
        elif tag in (TAG_PAIR, TAG_SMN, TAG_APPLY):
            node = (tag, parse(), parse())
        else:
            node = (tag, parse())
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ValueError(f"expected ')' at token {pos}")
        pos += 1
        return node

    node = parse()
    if pos != len(tokens):
        raise ValueError(f"trailing input at token {pos}")
    return from_tuple(node)


# --- random program generation (for tests and the theorem harness) ----------


def random_ast(rng, max_depth: int, arity: int, model: Model = Model.UREC) -> Ast:
    """A random program of the given call arity.  In TOTAL (or at depth 0)
    only terminating forms are produced."""
    if max_depth <= 0:
        choices = ["proj", "lit"] if arity else ["lit"]
    else:
        choices = ["proj", "lit", "pair", "fst", "snd", "succ", "if0", "comp"]
        if model is Model.UREC:
            choices.append("apply")
        if not arity:
            choices = [c for c in choices if c != "proj"]
    kind = rng.choice(choices)
    sub = lambda: random_ast(rng, max_depth - 1, arity, model)  # noqa: E731
    if kind == "proj":
        return Proj(rng.randrange(1, arity + 1))
    if kind == "lit":
        return Lit(rng.randrange(0, 32))
    if kind == "pair":
        return Pair(sub(), sub())
    if kind == "fst":
        return Fst(sub())
    if kind == "snd":
        return Snd(sub())
    if kind == "succ":
        return Succ(sub())
    if kind == "if0":
        return If0(sub(), sub(), sub())
    if kind == "comp":
        inner_arity = rng.randrange(0, 3)
        head = random_ast(rng, max_depth - 1, inner_arity, model)
        return Comp(head, tuple(sub() for _ in range(inner_arity)))
    # Apply on small literal codes keeps evaluation short but exercises the
    # interpreter-in-interpreter path.
    return Apply(Lit(rng.randrange(0, 64)), sub())

"""Prefix-call expression language over a parsed document.

Expressions are typechecked before anything is evaluated: every subexpression
resolves to a sort (kernel with its domain and codomain, measure with its
space, density table, float, boolean) and any mismatch is reported with the
full space expressions on both sides, which makes forgotten rebracketings
visible at a glance.  Evaluation then dispatches to the core modules.

Grammar: a call `op(arg, ...)`, a bare name declared in the document, a space
expression (`unit` or `(S x T)`), or a rational literal, depending on the
operator's parameter kinds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import algebra as alg
from .analytics import (
    cond_kl,
    entropy,
    kernel_entropy,
    kl_div,
    renyi_div,
)
from .bayes import posterior
from .conditioning import cond_indep_fun, indep_fun
from .disintegration import cond_kernel, cond_kernel_measure, rn_deriv, singular_part
from .document import Document, Tokenizer
from .errors import ArityError, ExprTypeError, KdSyntaxError, UnknownName
from .measures import Kernel
from .sequential import traj_kernel
from .spaces import UNIT, Product, SpaceExpr
from .variables import PartitionSigma

__all__ = ["parse_expr", "infer_type", "eval_expr", "TKernel", "TMeasure"]


# -- AST -----------------------------------------------------------------------


@dataclass
class Call:
    op: str
    args: list
    line: int
    col: int


@dataclass
class Name:
    text: str
    line: int
    col: int


@dataclass
class SpaceArg:
    space: SpaceExpr
    line: int
    col: int


@dataclass
class RatArg:
    value: Fraction
    line: int
    col: int


# -- types ------------------------------------------------------------------------


@dataclass(frozen=True)
class TKernel:
    dom: SpaceExpr
    cod: SpaceExpr

    def __str__(self):
        return f"kernel {self.dom} -> {self.cod}"


@dataclass(frozen=True)
class TMeasure:
    space: SpaceExpr

    def __str__(self):
        return f"measure on {self.space}"


@dataclass(frozen=True)
class TDensity:
    space: SpaceExpr

    def __str__(self):
        return f"density on {self.space}"


T_FLOAT = "float"
T_BOOL = "boolean"

_ARITIES = {
    "comp": 2, "parallel": 2, "prod": 2, "compProd": 2, "condKernel": 1,
    "posterior": 2, "mcomp": 2, "mcompProd": 2, "fst": 1, "snd": 1,
    "swapOn": 2, "assocOn": 3, "assocInvOn": 3, "det": 1, "const": 2,
    "copy": 1, "discard": 1, "idk": 1, "rnDeriv": 2, "singular": 2,
    "entropy": 1, "kentropy": 2, "kl": 2, "condkl": 3, "renyi": 3,
    "indep": 3, "condindep": 4, "traj": 2,
}


# -- parsing -----------------------------------------------------------------------


def parse_expr(text: str):
    tz = Tokenizer(text)
    node = _parse_node(tz)
    tail = tz.peek()
    if tail.kind != "eof":
        raise KdSyntaxError(
            f"trailing input {tail.text!r} after expression", tail.line, tail.col
        )
    return node


def _parse_node(tz: Tokenizer):
    tok = tz.peek()
    if tok.kind == "ident":
        tz.next()
        if tok.text == "unit":
            return SpaceArg(UNIT, tok.line, tok.col)
        if tz.at("("):
            if tok.text not in _ARITIES:
                raise UnknownName(
                    f"unknown operator {tok.text!r}", tok.line, tok.col
                )
            tz.next()
            args = []
            if not tz.at(")"):
                args.append(_parse_node(tz))
                while tz.at(","):
                    tz.next()
                    args.append(_parse_node(tz))
            tz.expect(")")
            if len(args) != _ARITIES[tok.text]:
                raise ArityError(
                    f"{tok.text} takes {_ARITIES[tok.text]} arguments, got {len(args)}",
                    tok.line,
                    tok.col,
                )
            return Call(tok.text, args, tok.line, tok.col)
        return Name(tok.text, tok.line, tok.col)
    if tok.kind == "int":
        tz.next()
        value = Fraction(int(tok.text))
        if tz.at("/"):
            tz.next()
            den = tz.expect("int")
            if int(den.text) == 0:
                raise KdSyntaxError("zero denominator", den.line, den.col)
            value = Fraction(int(tok.text), int(den.text))
        return RatArg(value, tok.line, tok.col)
    if tok.kind == "(":
        # space product literal: (S x T)
        tz.next()
        left = _parse_space_operand(tz)
        x = tz.expect("ident")
        if x.text != "x":
            raise KdSyntaxError(
                f"expected 'x' between product factors, got {x.text!r}", x.line, x.col
            )
        right = _parse_space_operand(tz)
        tz.expect(")")
        return SpaceArg(("product", left, right), tok.line, tok.col)
    raise KdSyntaxError(
        f"unexpected token {tok.text or 'end of input'!r} in expression",
        tok.line,
        tok.col,
    )


def _parse_space_operand(tz: Tokenizer):
    tok = tz.peek()
    if tok.kind == "ident":
        tz.next()
        if tok.text == "unit":
            return UNIT
        return ("name", tok.text, tok.line, tok.col)
    if tok.kind == "(":
        tz.next()
        left = _parse_space_operand(tz)
        x = tz.expect("ident")
        if x.text != "x":
            raise KdSyntaxError(
                f"expected 'x' between product factors, got {x.text!r}", x.line, x.col
            )
        right = _parse_space_operand(tz)
        tz.expect(")")
        return ("product", left, right)
    raise KdSyntaxError(
        f"expected a space expression, got {tok.text!r}", tok.line, tok.col
    )


# -- resolution helpers --------------------------------------------------------------


def _resolve_space(doc: Document, raw, line, col) -> SpaceExpr:
    if isinstance(raw, SpaceExpr):
        return raw
    if raw[0] == "name":
        _, name, nline, ncol = raw
        if name not in doc.spaces:
            raise UnknownName(f"no space named {name!r}", nline, ncol)
        return doc.spaces[name]
    _, left, right = raw
    return Product(
        _resolve_space(doc, left, line, col), _resolve_space(doc, right, line, col)
    )


def _space_arg(doc: Document, node) -> SpaceExpr:
    if isinstance(node, SpaceArg):
        return _resolve_space(doc, node.space, node.line, node.col)
    if isinstance(node, Name):
        if node.text in doc.spaces:
            return doc.spaces[node.text]
        raise UnknownName(f"no space named {node.text!r}", node.line, node.col)
    raise ExprTypeError(
        "expected a space expression here", _pos(node)[0], _pos(node)[1]
    )


def _rv_arg(doc: Document, node):
    if isinstance(node, Name):
        if node.text in doc.rvs:
            return doc.rvs[node.text]
        raise UnknownName(f"no rv named {node.text!r}", node.line, node.col)
    raise ExprTypeError("expected the name of an rv here", _pos(node)[0], _pos(node)[1])


def _chain_arg(doc: Document, node):
    if isinstance(node, Name):
        if node.text in doc.chains:
            return doc.chains[node.text]
        raise UnknownName(f"no chain named {node.text!r}", node.line, node.col)
    raise ExprTypeError(
        "expected the name of a chain here", _pos(node)[0], _pos(node)[1]
    )


def _rat_arg(node) -> Fraction:
    if isinstance(node, RatArg):
        return node.value
    raise ExprTypeError(
        "expected a rational literal here", _pos(node)[0], _pos(node)[1]
    )


def _int_arg(node) -> int:
    if isinstance(node, RatArg) and node.value.denominator == 1:
        return int(node.value)
    raise ExprTypeError(
        "expected an integer literal here", _pos(node)[0], _pos(node)[1]
    )


def _pos(node):
    return node.line, node.col


def _fail(node, message):
    raise ExprTypeError(message, *_pos(node))


def _name_sorts(doc: Document, node: Name):
    found = []
    if node.text in doc.kernels:
        found.append(("kernel", doc.kernels[node.text]))
    if node.text in doc.measures:
        found.append(("measure", doc.measures[node.text]))
    return found


# -- typechecking -----------------------------------------------------------------------


def infer_type(doc: Document, node):
    """Resolve the sort and spaces of an expression, or raise ExprTypeError."""
    if isinstance(node, Name):
        found = _name_sorts(doc, node)
        if not found:
            raise UnknownName(
                f"no kernel or measure named {node.text!r}", node.line, node.col
            )
        if len(found) > 1:
            _fail(node, f"name {node.text!r} is both a kernel and a measure; rename one")
        sort, obj = found[0]
        if sort == "kernel":
            return TKernel(obj.domain, obj.codomain)
        return TMeasure(obj.space)
    if isinstance(node, RatArg):
        _fail(node, "a bare rational is not an expression")
    if isinstance(node, SpaceArg):
        _fail(node, "a bare space expression is not an expression")
    return _CHECKERS[node.op](doc, node)


def _expect_kernel(doc, node) -> TKernel:
    t = infer_type(doc, node)
    if not isinstance(t, TKernel):
        _fail(node, f"expected a kernel, got {t}")
    return t


def _expect_measure(doc, node) -> TMeasure:
    t = infer_type(doc, node)
    if not isinstance(t, TMeasure):
        _fail(node, f"expected a measure, got {t}")
    return t


def _expect_product(node, space, what) -> Product:
    if not isinstance(space, Product):
        _fail(node, f"{what} must be a product space, got {space}")
    return space


def _check_comp(doc, node):
    t1 = _expect_kernel(doc, node.args[0])
    t2 = _expect_kernel(doc, node.args[1])
    if t2.cod != t1.dom:
        _fail(
            node,
            "comp: output space of the second kernel is "
            f"{t2.cod} but the first kernel consumes {t1.dom}",
        )
    return TKernel(t2.dom, t1.cod)


def _check_parallel(doc, node):
    t1 = _expect_kernel(doc, node.args[0])
    t2 = _expect_kernel(doc, node.args[1])
    return TKernel(Product(t1.dom, t2.dom), Product(t1.cod, t2.cod))


def _check_prod(doc, node):
    t1 = _expect_kernel(doc, node.args[0])
    t2 = _expect_kernel(doc, node.args[1])
    if t1.dom != t2.dom:
        _fail(node, f"prod: domains differ ({t1.dom} vs {t2.dom})")
    return TKernel(t1.dom, Product(t1.cod, t2.cod))


def _check_comp_prod(doc, node):
    t1 = _expect_kernel(doc, node.args[0])
    t2 = _expect_kernel(doc, node.args[1])
    expected = Product(t1.dom, t1.cod)
    if t2.dom != expected:
        _fail(
            node,
            f"compProd: second kernel must have domain {expected} "
            f"but has {t2.dom}",
        )
    return TKernel(t1.dom, Product(t1.cod, t2.cod))


def _check_cond_kernel(doc, node):
    t = infer_type(doc, node.args[0])
    if isinstance(t, TKernel):
        cod = _expect_product(node, t.cod, "condKernel: the kernel codomain")
        return TKernel(Product(t.dom, cod.left), cod.right)
    if isinstance(t, TMeasure):
        space = _expect_product(node, t.space, "condKernel: the measure space")
        return TKernel(space.left, space.right)
    _fail(node, f"condKernel expects a kernel or measure, got {t}")


def _check_posterior(doc, node):
    t1 = _expect_kernel(doc, node.args[0])
    t2 = _expect_measure(doc, node.args[1])
    if t2.space != t1.dom:
        _fail(
            node,
            f"posterior: prior lives on {t2.space}, kernel domain is {t1.dom}",
        )
    return TKernel(t1.cod, t1.dom)


def _check_mcomp(doc, node):
    t1 = _expect_kernel(doc, node.args[0])
    t2 = _expect_measure(doc, node.args[1])
    if t2.space != t1.dom:
        _fail(node, f"mcomp: measure on {t2.space}, kernel domain {t1.dom}")
    return TMeasure(t1.cod)


def _check_mcomp_prod(doc, node):
    t1 = _expect_measure(doc, node.args[0])
    t2 = _expect_kernel(doc, node.args[1])
    if t1.space != t2.dom:
        _fail(node, f"mcompProd: measure on {t1.space}, kernel domain {t2.dom}")
    return TMeasure(Product(t2.dom, t2.cod))


def _check_fst(doc, node):
    t = infer_type(doc, node.args[0])
    if isinstance(t, TKernel):
        cod = _expect_product(node, t.cod, "fst: the kernel codomain")
        return TKernel(t.dom, cod.left)
    if isinstance(t, TMeasure):
        space = _expect_product(node, t.space, "fst: the measure space")
        return TMeasure(space.left)
    _fail(node, f"fst expects a kernel or measure, got {t}")


def _check_snd(doc, node):
    t = infer_type(doc, node.args[0])
    if isinstance(t, TKernel):
        cod = _expect_product(node, t.cod, "snd: the kernel codomain")
        return TKernel(t.dom, cod.right)
    if isinstance(t, TMeasure):
        space = _expect_product(node, t.space, "snd: the measure space")
        return TMeasure(space.right)
    _fail(node, f"snd expects a kernel or measure, got {t}")


def _check_swap_on(doc, node):
    s = _space_arg(doc, node.args[0])
    t = _space_arg(doc, node.args[1])
    return TKernel(Product(s, t), Product(t, s))


def _check_assoc_on(doc, node):
    a, b, c = (_space_arg(doc, arg) for arg in node.args)
    return TKernel(Product(a, Product(b, c)), Product(Product(a, b), c))


def _check_assoc_inv_on(doc, node):
    a, b, c = (_space_arg(doc, arg) for arg in node.args)
    return TKernel(Product(Product(a, b), c), Product(a, Product(b, c)))


def _check_det(doc, node):
    rv = _rv_arg(doc, node.args[0])
    return TKernel(rv.domain, rv.codomain)


def _check_const(doc, node):
    s = _space_arg(doc, node.args[0])
    t = _expect_measure(doc, node.args[1])
    return TKernel(s, t.space)


def _check_copy(doc, node):
    s = _space_arg(doc, node.args[0])
    return TKernel(s, Product(s, s))


def _check_discard(doc, node):
    s = _space_arg(doc, node.args[0])
    return TKernel(s, UNIT)


def _check_idk(doc, node):
    s = _space_arg(doc, node.args[0])
    return TKernel(s, s)


def _check_same_shape_pair(doc, node, what):
    t1 = _expect_kernel(doc, node.args[0])
    t2 = _expect_kernel(doc, node.args[1])
    if t1 != t2:
        _fail(node, f"{what}: kernel shapes differ ({t1} vs {t2})")
    return t1


def _check_rn_deriv(doc, node):
    t = _check_same_shape_pair(doc, node, "rnDeriv")
    return TDensity(Product(t.dom, t.cod))


def _check_singular(doc, node):
    return _check_same_shape_pair(doc, node, "singular")


def _check_entropy(doc, node):
    _expect_measure(doc, node.args[0])
    return T_FLOAT


def _check_kentropy(doc, node):
    t1 = _expect_kernel(doc, node.args[0])
    t2 = _expect_measure(doc, node.args[1])
    if t2.space != t1.dom:
        _fail(node, f"kentropy: measure on {t2.space}, kernel domain {t1.dom}")
    return T_FLOAT


def _check_kl(doc, node):
    t1 = _expect_measure(doc, node.args[0])
    t2 = _expect_measure(doc, node.args[1])
    if t1.space != t2.space:
        _fail(node, f"kl: measures on different spaces ({t1.space} vs {t2.space})")
    return T_FLOAT


def _check_condkl(doc, node):
    t = _check_same_shape_pair(doc, node, "condkl")
    tm = _expect_measure(doc, node.args[2])
    if tm.space != t.dom:
        _fail(node, f"condkl: measure on {tm.space}, kernel domain {t.dom}")
    return T_FLOAT


def _check_renyi(doc, node):
    _rat_arg(node.args[0])
    t1 = _expect_measure(doc, node.args[1])
    t2 = _expect_measure(doc, node.args[2])
    if t1.space != t2.space:
        _fail(node, f"renyi: measures on different spaces ({t1.space} vs {t2.space})")
    return T_FLOAT


def _check_indep(doc, node):
    x = _rv_arg(doc, node.args[0])
    y = _rv_arg(doc, node.args[1])
    tm = _expect_measure(doc, node.args[2])
    if not (x.domain == y.domain == tm.space):
        _fail(
            node,
            f"indep: rv domains {x.domain}, {y.domain} and measure space "
            f"{tm.space} must all agree",
        )
    return T_BOOL


def _check_condindep(doc, node):
    x = _rv_arg(doc, node.args[0])
    y = _rv_arg(doc, node.args[1])
    z = _rv_arg(doc, node.args[2])
    tm = _expect_measure(doc, node.args[3])
    if not (x.domain == y.domain == z.domain == tm.space):
        _fail(
            node,
            f"condindep: rv domains {x.domain}, {y.domain}, {z.domain} and "
            f"measure space {tm.space} must all agree",
        )
    return T_BOOL


def _check_traj(doc, node):
    chain = _chain_arg(doc, node.args[0])
    n = _int_arg(node.args[1])
    if not 1 <= n <= len(chain.steps):
        _fail(node.args[1], f"horizon {n} outside 1..{len(chain.steps)}")
    outs = chain.output_spaces()
    traj_space = outs[0]
    for i in range(1, n):
        traj_space = Product(traj_space, outs[i])
    return TKernel(chain.start, traj_space)


_CHECKERS = {
    "comp": _check_comp,
    "parallel": _check_parallel,
    "prod": _check_prod,
    "compProd": _check_comp_prod,
    "condKernel": _check_cond_kernel,
    "posterior": _check_posterior,
    "mcomp": _check_mcomp,
    "mcompProd": _check_mcomp_prod,
    "fst": _check_fst,
    "snd": _check_snd,
    "swapOn": _check_swap_on,
    "assocOn": _check_assoc_on,
    "assocInvOn": _check_assoc_inv_on,
    "det": _check_det,
    "const": _check_const,
    "copy": _check_copy,
    "discard": _check_discard,
    "idk": _check_idk,
    "rnDeriv": _check_rn_deriv,
    "singular": _check_singular,
    "entropy": _check_entropy,
    "kentropy": _check_kentropy,
    "kl": _check_kl,
    "condkl": _check_condkl,
    "renyi": _check_renyi,
    "indep": _check_indep,
    "condindep": _check_condindep,
    "traj": _check_traj,
}


# -- evaluation ----------------------------------------------------------------------


def eval_expr(doc: Document, node):
    """Evaluate a typechecked expression to a core value."""
    if isinstance(node, Name):
        sort, obj = _name_sorts(doc, node)[0]
        return obj
    args = node.args
    op = node.op
    if op == "comp":
        return alg.compose(eval_expr(doc, args[0]), eval_expr(doc, args[1]))
    if op == "parallel":
        return alg.parallel(eval_expr(doc, args[0]), eval_expr(doc, args[1]))
    if op == "prod":
        return alg.prod(eval_expr(doc, args[0]), eval_expr(doc, args[1]))
    if op == "compProd":
        return alg.comp_prod(eval_expr(doc, args[0]), eval_expr(doc, args[1]))
    if op == "condKernel":
        value = eval_expr(doc, args[0])
        if isinstance(value, Kernel):
            return cond_kernel(value)
        return cond_kernel_measure(value)
    if op == "posterior":
        return posterior(eval_expr(doc, args[0]), eval_expr(doc, args[1]))
    if op == "mcomp":
        return alg.comp_measure(eval_expr(doc, args[0]), eval_expr(doc, args[1]))
    if op == "mcompProd":
        return alg.comp_prod_measure(eval_expr(doc, args[0]), eval_expr(doc, args[1]))
    if op == "fst":
        value = eval_expr(doc, args[0])
        if isinstance(value, Kernel):
            return alg.marginal_fst(value)
        space = value.space
        return alg.pushforward(value, alg.fst_proj(space.left, space.right))
    if op == "snd":
        value = eval_expr(doc, args[0])
        if isinstance(value, Kernel):
            return alg.marginal_snd(value)
        space = value.space
        return alg.pushforward(value, alg.snd_proj(space.left, space.right))
    if op == "swapOn":
        return alg.swap_kernel(_space_arg(doc, args[0]), _space_arg(doc, args[1]))
    if op == "assocOn":
        a, b, c = (_space_arg(doc, arg) for arg in args)
        return alg.assoc_kernel(a, b, c)
    if op == "assocInvOn":
        a, b, c = (_space_arg(doc, arg) for arg in args)
        return alg.assoc_inv_kernel(a, b, c)
    if op == "det":
        return alg.deterministic(_rv_arg(doc, args[0]))
    if op == "const":
        return alg.const_kernel(_space_arg(doc, args[0]), eval_expr(doc, args[1]))
    if op == "copy":
        return alg.copy_kernel(_space_arg(doc, args[0]))
    if op == "discard":
        return alg.discard_kernel(_space_arg(doc, args[0]))
    if op == "idk":
        return alg.identity_kernel(_space_arg(doc, args[0]))
    if op == "rnDeriv":
        return rn_deriv(eval_expr(doc, args[0]), eval_expr(doc, args[1]))
    if op == "singular":
        return singular_part(eval_expr(doc, args[0]), eval_expr(doc, args[1]))
    if op == "entropy":
        return entropy(eval_expr(doc, args[0]))
    if op == "kentropy":
        return kernel_entropy(eval_expr(doc, args[0]), eval_expr(doc, args[1]))
    if op == "kl":
        return kl_div(eval_expr(doc, args[0]), eval_expr(doc, args[1]))
    if op == "condkl":
        return cond_kl(
            eval_expr(doc, args[0]), eval_expr(doc, args[1]), eval_expr(doc, args[2])
        )
    if op == "renyi":
        return renyi_div(
            _rat_arg(args[0]), eval_expr(doc, args[1]), eval_expr(doc, args[2])
        )
    if op == "indep":
        return indep_fun(
            _rv_arg(doc, args[0]), _rv_arg(doc, args[1]), eval_expr(doc, args[2])
        )
    if op == "condindep":
        z = _rv_arg(doc, args[2])
        return cond_indep_fun(
            _rv_arg(doc, args[0]),
            _rv_arg(doc, args[1]),
            PartitionSigma.generated_by(z),
            eval_expr(doc, args[3]),
        )
    if op == "traj":
        return traj_kernel(_chain_arg(doc, args[0]), _int_arg(args[1]))
    raise UnknownName(f"unknown operator {op!r}", node.line, node.col)

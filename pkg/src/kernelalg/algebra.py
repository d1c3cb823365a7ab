"""Composition algebra of finite kernels.

Notation used in docstrings below (and in the README):

    compose(eta, kappa)        eta . kappa, feed the output of kappa into eta
    parallel(kappa, eta)       kappa on the left leg, eta on the right leg
    prod(kappa, eta)           same input to both, pair the outputs
    comp_prod(kappa, eta)      sequential pair: (first output, second output)
    comp_measure(kappa, mu)    push a measure through a kernel
    comp_prod_measure(mu, k)   joint measure (input, output)

All operations are exact.  Composition gates on structural space equality:
products are binary trees and no rebracketing ever happens implicitly.  Use
assoc_kernel / assoc_inv_kernel / rebracket_kernel to move between
bracketings explicitly.
"""

from __future__ import annotations

from .errors import NotAProductCodomain, SpaceMismatch
from .measures import Kernel, Measure, dirac, zero_measure
from .scalar import ONE, ZERO
from .spaces import UNIT, Product, SpaceExpr
from .variables import RandomVariable

__all__ = [
    "deterministic",
    "identity_kernel",
    "copy_kernel",
    "discard_kernel",
    "const_kernel",
    "swap_kernel",
    "assoc_kernel",
    "assoc_inv_kernel",
    "fst_proj",
    "snd_proj",
    "prod_mk_right",
    "prod_mk_left",
    "rebracket_kernel",
    "compose",
    "parallel",
    "prod",
    "comp_prod",
    "comp_prod_via_primitives",
    "marginal_fst",
    "marginal_snd",
    "marginals",
    "comp_measure",
    "comp_prod_measure",
    "pushforward",
    "measure_product",
    "add_kernels",
    "zero_kernel",
    "measure_as_kernel",
    "kernel_as_measure",
]


# -- structural kernels --------------------------------------------------------


def deterministic(f: RandomVariable) -> Kernel:
    """The kernel sending each atom to the Dirac measure at its image."""
    rows = tuple(dirac(f.codomain, f.table[a]) for a in f.domain.atoms)
    return Kernel._unchecked(f.domain, f.codomain, rows)


def identity_kernel(space: SpaceExpr) -> Kernel:
    return deterministic(RandomVariable.identity(space))


def copy_kernel(space: SpaceExpr) -> Kernel:
    """space -> space x space, each atom to the Dirac measure at (atom, atom)."""
    cod = Product(space, space)
    rows = tuple(dirac(cod, (a, a)) for a in space.atoms)
    return Kernel._unchecked(space, cod, rows)


def discard_kernel(space: SpaceExpr) -> Kernel:
    """space -> unit, every row the unique probability measure on unit."""
    row = Measure._unchecked(UNIT, (ONE,))
    return Kernel._unchecked(space, UNIT, (row,) * space.size)


def const_kernel(domain: SpaceExpr, measure: Measure) -> Kernel:
    """Every row equal to the given measure."""
    return Kernel._unchecked(domain, measure.space, (measure,) * domain.size)


def swap_kernel(left: SpaceExpr, right: SpaceExpr) -> Kernel:
    """(left x right) -> (right x left), deterministic coordinate swap."""
    dom = Product(left, right)
    cod = Product(right, left)
    return deterministic(
        RandomVariable(dom, cod, {(a, b): (b, a) for (a, b) in dom.atoms})
    )


def assoc_kernel(a: SpaceExpr, b: SpaceExpr, c: SpaceExpr) -> Kernel:
    """a x (b x c) -> (a x b) x c, deterministic rebracketing."""
    dom = Product(a, Product(b, c))
    cod = Product(Product(a, b), c)
    table = {(x, (y, z)): ((x, y), z) for (x, (y, z)) in dom.atoms}
    return deterministic(RandomVariable(dom, cod, table))


def assoc_inv_kernel(a: SpaceExpr, b: SpaceExpr, c: SpaceExpr) -> Kernel:
    """(a x b) x c -> a x (b x c), inverse rebracketing."""
    dom = Product(Product(a, b), c)
    cod = Product(a, Product(b, c))
    table = {((x, y), z): (x, (y, z)) for ((x, y), z) in dom.atoms}
    return deterministic(RandomVariable(dom, cod, table))


def fst_proj(left: SpaceExpr, right: SpaceExpr) -> RandomVariable:
    dom = Product(left, right)
    return RandomVariable(dom, left, {(a, b): a for (a, b) in dom.atoms})


def snd_proj(left: SpaceExpr, right: SpaceExpr) -> RandomVariable:
    dom = Product(left, right)
    return RandomVariable(dom, right, {(a, b): b for (a, b) in dom.atoms})


def prod_mk_right(kernel: Kernel, extra: SpaceExpr) -> Kernel:
    """Lift dom -> cod to (dom x extra) -> cod, ignoring the second coordinate."""
    dom = Product(kernel.domain, extra)
    rows = tuple(kernel.rows[kernel.domain.index_of(a)] for (a, _) in dom.atoms)
    return Kernel._unchecked(dom, kernel.codomain, rows)


def prod_mk_left(extra: SpaceExpr, kernel: Kernel) -> Kernel:
    """Lift dom -> cod to (extra x dom) -> cod, ignoring the first coordinate."""
    dom = Product(extra, kernel.domain)
    rows = tuple(kernel.rows[kernel.domain.index_of(b)] for (_, b) in dom.atoms)
    return Kernel._unchecked(dom, kernel.codomain, rows)


def rebracket_kernel(src: SpaceExpr, dst: SpaceExpr) -> Kernel:
    """Deterministic re-association between two bracketings of one leaf list.

    src and dst must have identical ordered leaf sequences; the kernel maps
    each atom to the same flat coordinate tuple re-nested for dst.
    """
    from .spaces import build_atom, flatten_atom

    if src.leaves() != dst.leaves():
        raise SpaceMismatch(
            f"spaces {src} and {dst} have different leaf sequences; "
            "rebracketing is only defined between bracketings of the same product"
        )
    table = {
        atom: build_atom(dst, flatten_atom(src, atom)) for atom in src.atoms
    }
    return deterministic(RandomVariable(src, dst, table))


# -- compositions ---------------------------------------------------------------


def compose(eta: Kernel, kappa: Kernel) -> Kernel:
    """Sequential composition: run kappa, feed its output into eta.

    (eta . kappa)(x)({z}) = sum_y kappa(x)({y}) * eta(y)({z}).
    """
    if kappa.codomain != eta.domain:
        raise SpaceMismatch(
            f"cannot compose: intermediate spaces differ "
            f"({kappa.codomain} vs {eta.domain})"
        )
    cod = eta.codomain
    n = cod.size
    out_rows = []
    for row in kappa.rows:
        acc = [ZERO] * n
        for yi, wy in enumerate(row.weights):
            if wy.is_zero():
                continue
            for zi, wz in enumerate(eta.rows[yi].weights):
                if not wz.is_zero():
                    acc[zi] = acc[zi] + wy * wz
        out_rows.append(Measure._unchecked(cod, tuple(acc)))
    return Kernel._unchecked(kappa.domain, cod, tuple(out_rows))


def measure_product(a: Measure, b: Measure) -> Measure:
    """Product measure on Product(a.space, b.space)."""
    cod = Product(a.space, b.space)
    weights = []
    for wa in a.weights:
        if wa.is_zero():
            weights.extend([ZERO] * b.space.size)
        else:
            weights.extend(wa * wb if not wb.is_zero() else ZERO for wb in b.weights)
    return Measure._unchecked(cod, tuple(weights))


def parallel(kappa: Kernel, eta: Kernel) -> Kernel:
    """Parallel composition on the product of domains and codomains.

    Row at (x, t) is the product measure kappa(x) (x) eta(t).
    """
    dom = Product(kappa.domain, eta.domain)
    cod = Product(kappa.codomain, eta.codomain)
    rows = []
    for ra in kappa.rows:
        for rb in eta.rows:
            rows.append(_product_row(cod, ra, rb))
    return Kernel._unchecked(dom, cod, tuple(rows))


def _product_row(cod, a: Measure, b: Measure) -> Measure:
    weights = []
    nb = len(b.weights)
    for wa in a.weights:
        if wa.is_zero():
            weights.extend([ZERO] * nb)
        else:
            weights.extend(wa * wb if not wb.is_zero() else ZERO for wb in b.weights)
    return Measure._unchecked(cod, tuple(weights))


def prod(kappa: Kernel, eta: Kernel) -> Kernel:
    """Same-input pairing: row at x is the product measure kappa(x) (x) eta(x).

    Equal to compose(parallel(kappa, eta), copy_kernel(domain)); the law suite
    checks that identity permanently.
    """
    if kappa.domain != eta.domain:
        raise SpaceMismatch(
            f"prod needs a shared domain, got {kappa.domain} and {eta.domain}"
        )
    cod = Product(kappa.codomain, eta.codomain)
    rows = tuple(
        _product_row(cod, ra, rb) for ra, rb in zip(kappa.rows, eta.rows)
    )
    return Kernel._unchecked(kappa.domain, cod, rows)


def comp_prod(kappa: Kernel, eta: Kernel) -> Kernel:
    """Sequential pairing kappa (x) eta: keep both stages' outputs.

    Needs eta's domain to be exactly Product(kappa.domain, kappa.codomain);
    then (kappa (x) eta)(x)({(y, z)}) = kappa(x)({y}) * eta((x, y))({z}).
    Bracketing is strict: a mismatched domain raises SpaceMismatch.
    """
    expected = Product(kappa.domain, kappa.codomain)
    if eta.domain != expected:
        raise SpaceMismatch(
            f"comp_prod: second kernel must have domain {expected}, got {eta.domain}"
        )
    y_size = kappa.codomain.size
    z_size = eta.codomain.size
    cod = Product(kappa.codomain, eta.codomain)
    out_rows = []
    for xi, row in enumerate(kappa.rows):
        weights = []
        for yi, wy in enumerate(row.weights):
            if wy.is_zero():
                weights.extend([ZERO] * z_size)
            else:
                second = eta.rows[xi * y_size + yi].weights
                weights.extend(
                    wy * wz if not wz.is_zero() else ZERO for wz in second
                )
        out_rows.append(Measure._unchecked(cod, tuple(weights)))
    return Kernel._unchecked(kappa.domain, cod, tuple(out_rows))


def comp_prod_via_primitives(kappa: Kernel, eta: Kernel) -> Kernel:
    """comp_prod built from copy, parallel, rebracketing and swap only.

    Kept alongside the direct formula as a permanent cross-check; the two
    must agree exactly on every input.
    """
    x_space = kappa.domain
    y_space = kappa.codomain
    expected = Product(x_space, y_space)
    if eta.domain != expected:
        raise SpaceMismatch(
            f"comp_prod: second kernel must have domain {expected}, got {eta.domain}"
        )
    z_space = eta.codomain
    idx = identity_kernel(x_space)
    idy = identity_kernel(y_space)
    k = copy_kernel(x_space)                                # X -> X x X
    k = compose(parallel(idx, kappa), k)                    # X -> X x Y
    k = compose(parallel(idx, copy_kernel(y_space)), k)     # X -> X x (Y x Y)
    k = compose(assoc_kernel(x_space, y_space, y_space), k) # X -> (X x Y) x Y
    k = compose(parallel(eta, idy), k)                      # X -> Z x Y
    return compose(swap_kernel(z_space, y_space), k)        # X -> Y x Z


def marginal_fst(kappa: Kernel) -> Kernel:
    """Compose with the deterministic first projection."""
    if not isinstance(kappa.codomain, Product):
        raise NotAProductCodomain(f"codomain {kappa.codomain} is not a product")
    cod = kappa.codomain
    return compose(deterministic(fst_proj(cod.left, cod.right)), kappa)


def marginal_snd(kappa: Kernel) -> Kernel:
    if not isinstance(kappa.codomain, Product):
        raise NotAProductCodomain(f"codomain {kappa.codomain} is not a product")
    cod = kappa.codomain
    return compose(deterministic(snd_proj(cod.left, cod.right)), kappa)


def marginals(kappa: Kernel):
    return marginal_fst(kappa), marginal_snd(kappa)


# -- measure-level operations ------------------------------------------------------


def comp_measure(kappa: Kernel, mu: Measure) -> Measure:
    """Push mu through kappa: (kappa . mu)({y}) = sum_x mu({x}) kappa(x)({y})."""
    if mu.space != kappa.domain:
        raise SpaceMismatch(
            f"measure on {mu.space} cannot feed kernel from {kappa.domain}"
        )
    acc = [ZERO] * kappa.codomain.size
    for xi, wx in enumerate(mu.weights):
        if wx.is_zero():
            continue
        for yi, wy in enumerate(kappa.rows[xi].weights):
            if not wy.is_zero():
                acc[yi] = acc[yi] + wx * wy
    return Measure._unchecked(kappa.codomain, tuple(acc))


def comp_prod_measure(mu: Measure, kappa: Kernel) -> Measure:
    """Joint measure of (input, output): weight mu({x}) * kappa(x)({y}) at (x, y)."""
    if mu.space != kappa.domain:
        raise SpaceMismatch(
            f"measure on {mu.space} cannot feed kernel from {kappa.domain}"
        )
    cod = Product(mu.space, kappa.codomain)
    n = kappa.codomain.size
    weights = []
    for wx, row in zip(mu.weights, kappa.rows):
        if wx.is_zero():
            weights.extend([ZERO] * n)
        else:
            weights.extend(wx * w if not w.is_zero() else ZERO for w in row.weights)
    return Measure._unchecked(cod, tuple(weights))


def pushforward(mu: Measure, f: RandomVariable) -> Measure:
    """Image measure of mu under a map, via the deterministic kernel."""
    return comp_measure(deterministic(f), mu)


def add_kernels(a: Kernel, b: Kernel) -> Kernel:
    if a.domain != b.domain or a.codomain != b.codomain:
        raise SpaceMismatch("kernel addition needs identical domain and codomain")
    rows = tuple(ra.add(rb) for ra, rb in zip(a.rows, b.rows))
    return Kernel._unchecked(a.domain, a.codomain, rows)


def zero_kernel(domain: SpaceExpr, codomain: SpaceExpr) -> Kernel:
    row = zero_measure(codomain)
    return Kernel._unchecked(domain, codomain, (row,) * domain.size)


def measure_as_kernel(mu: Measure) -> Kernel:
    """View a measure as a kernel from the one-point space."""
    return Kernel._unchecked(UNIT, mu.space, (mu,))


def kernel_as_measure(kappa: Kernel) -> Measure:
    """Inverse view for kernels from the one-point space."""
    if kappa.domain != UNIT:
        raise SpaceMismatch(f"kernel from {kappa.domain} is not a measure in disguise")
    return kappa.rows[0]

"""Entropy, divergences and sub-Gaussian certification over exact inputs.

This is the one float-valued layer of the package.  The contract throughout:
every decision that can be made exactly is made exactly, in rational
arithmetic, before anything is converted to float64.  In particular a
divergence is infinite iff an exact support condition says so; +inf is never
the artifact of a float log or division.  Finite results are float64 with
natural logarithms, summed in fixed atom order so results are reproducible.
Identities among finite values hold within TOLERANCE = 1e-9.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import comp_measure, comp_prod, comp_prod_measure, pushforward
from .conditioning import cond_distrib
from .errors import (
    AlphaOutOfRange,
    GridViolation,
    KernelAlgError,
    NonzeroMean,
    NotCertified,
    ScopeMismatch,
    SpaceMismatch,
)
from .measures import Kernel, Measure
from .spaces import Product
from .variables import RandomVariable, RealRV

__all__ = [
    "TOLERANCE",
    "entropy",
    "kernel_entropy",
    "cond_entropy",
    "kl_div",
    "cond_kl",
    "kl_chain_rule",
    "KLChainRuleReport",
    "data_processing",
    "DataProcessingReport",
    "renyi_div",
    "mgf",
    "PlainMeasureScope",
    "KernelScope",
    "SubgaussianCertificate",
    "certify_subgaussian",
    "certify_bounded_range",
    "certify_grid",
    "subgaussian_add_comp_prod",
    "hoeffding_check",
    "HoeffdingReport",
]

TOLERANCE = 1e-9

# Relative slack for float <= comparisons in grid checks; the analytic margin
# of every certified inequality dwarfs this by many orders of magnitude.
_GRID_SLACK = 1e-12


def entropy(mu: Measure) -> float:
    """Shannon entropy in nats, with the 0 log 0 = 0 convention."""
    mu.require_probability()
    acc = 0.0
    for w in mu.weights:
        if not w.is_zero():
            p = float(w)
            acc -= p * math.log(p)
    return acc


def kernel_entropy(kappa: Kernel, mu: Measure) -> float:
    """Row entropies of a Markov kernel averaged under mu."""
    kappa.require_markov()
    mu.require_probability()
    if mu.space != kappa.domain:
        raise SpaceMismatch(
            f"measure on {mu.space} does not match kernel domain {kappa.domain}"
        )
    acc = 0.0
    for w, row in zip(mu.weights, kappa.rows):
        if not w.is_zero():
            acc += float(w) * entropy(row)
    return acc


def cond_entropy(x: RandomVariable, y: RandomVariable, mu: Measure) -> float:
    """Conditional entropy of x given y under mu.

    Computed twice: once as the direct double sum over values of y and x
    using exact conditional ratios, and once through the conditional
    distribution kernel.  The two must agree within TOLERANCE; the direct
    value is returned.
    """
    if x.domain != mu.space or y.domain != mu.space:
        raise SpaceMismatch(
            f"maps on {x.domain} and {y.domain} do not live on {mu.space}"
        )
    mu.require_probability()
    direct = 0.0
    for b in y.codomain.atoms:
        fiber = y.preimage([b])
        pb = mu.mass_of(fiber)
        if pb.is_zero():
            continue
        for a in x.codomain.atoms:
            joint = mu.mass_of([w for w in fiber if x.table[w] == a])
            if joint.is_zero():
                continue
            p_cond = float(joint / pb)
            direct -= float(pb) * p_cond * math.log(p_cond)

    via_kernel = kernel_entropy(cond_distrib(x, y, mu), pushforward(mu, y))
    if abs(direct - via_kernel) > TOLERANCE:
        raise KernelAlgError(
            "conditional entropy paths disagree: "
            f"direct {direct!r} vs kernel {via_kernel!r}"
        )
    return direct


def kl_div(mu: Measure, nu: Measure) -> float:
    """Kullback-Leibler divergence in nats; +inf iff mu is not dominated by nu.

    Domination is decided exactly atom by atom before any float enters.
    """
    if mu.space != nu.space:
        raise SpaceMismatch(f"measures on {mu.space} and {nu.space} do not compare")
    mu.require_probability()
    nu.require_probability()
    for wm, wn in zip(mu.weights, nu.weights):
        if wn.is_zero() and not wm.is_zero():
            return math.inf
    acc = 0.0
    for wm, wn in zip(mu.weights, nu.weights):
        if not wm.is_zero():
            acc += float(wm) * math.log(float(wm / wn))
    return acc


def cond_kl(kappa: Kernel, eta: Kernel, mu: Measure) -> float:
    """Row KL divergences averaged under mu; +inf if any positive-mass row is."""
    if kappa.domain != eta.domain or kappa.codomain != eta.codomain:
        raise SpaceMismatch("conditional KL needs kernels of identical shape")
    kappa.require_markov()
    eta.require_markov()
    mu.require_probability()
    if mu.space != kappa.domain:
        raise SpaceMismatch(
            f"measure on {mu.space} does not match kernel domain {kappa.domain}"
        )
    acc = 0.0
    for w, ka, ea in zip(mu.weights, kappa.rows, eta.rows):
        if w.is_zero():
            continue
        term = kl_div(ka, ea)
        if math.isinf(term):
            return math.inf
        acc += float(w) * term
    return acc


def _agree(a: float, b: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return math.isinf(a) and math.isinf(b)
    return abs(a - b) <= TOLERANCE


@dataclass
class KLChainRuleReport:
    joint: float
    marginal: float
    conditional: float
    joint_conditional: float
    additive_form_holds: bool
    comp_prod_form_holds: bool

    def as_dict(self):
        return {
            "joint": self.joint,
            "marginal": self.marginal,
            "conditional": self.conditional,
            "jointConditional": self.joint_conditional,
            "additiveFormHolds": self.additive_form_holds,
            "compProdFormHolds": self.comp_prod_form_holds,
        }


def kl_chain_rule(mu: Measure, nu: Measure, kappa: Kernel, eta: Kernel) -> KLChainRuleReport:
    """Evaluate both chain-rule decompositions of a joint KL divergence.

    joint            KL of the two (input, output) joint measures
    marginal         KL of the inputs
    conditional      averaged row KL of the kernels under mu
    joint_conditional  KL of the two joints sharing the input marginal mu

    Checks joint = marginal + conditional and
    joint = marginal + joint_conditional, with exact infinity propagation.
    """
    joint = kl_div(comp_prod_measure(mu, kappa), comp_prod_measure(nu, eta))
    marginal = kl_div(mu, nu)
    conditional = cond_kl(kappa, eta, mu)
    joint_conditional = kl_div(comp_prod_measure(mu, kappa), comp_prod_measure(mu, eta))
    return KLChainRuleReport(
        joint=joint,
        marginal=marginal,
        conditional=conditional,
        joint_conditional=joint_conditional,
        additive_form_holds=_agree(joint, marginal + conditional),
        comp_prod_form_holds=_agree(joint, marginal + joint_conditional),
    )


@dataclass
class DataProcessingReport:
    divergence: str
    processed: float
    original: float
    joint: float
    dpi_holds: bool
    conditioning_holds: bool

    def as_dict(self):
        return {
            "divergence": self.divergence,
            "processed": self.processed,
            "original": self.original,
            "joint": self.joint,
            "dpiHolds": self.dpi_holds,
            "conditioningHolds": self.conditioning_holds,
        }


def data_processing(
    kind: str, kappa: Kernel, mu: Measure, nu: Measure, alpha: Fraction | None = None
) -> DataProcessingReport:
    """Check the data-processing inequality for KL or a Renyi order.

    processed = D(kappa . mu, kappa . nu) must not exceed original = D(mu, nu),
    nor joint = D of the two (input, output) joints, since marginalizing the
    output is itself processing by a deterministic kernel.
    """
    kappa.require_markov()
    if kind == "kl":
        div = kl_div
        label = "kl"
    elif kind == "renyi":
        if alpha is None:
            raise AlphaOutOfRange("renyi data processing needs an order alpha")
        div = lambda a, b: renyi_div(alpha, a, b)  # noqa: E731
        label = f"renyi({alpha})"
    else:
        raise KernelAlgError(f"unknown divergence kind {kind!r}")
    processed = div(comp_measure(kappa, mu), comp_measure(kappa, nu))
    original = div(mu, nu)
    joint = div(comp_prod_measure(mu, kappa), comp_prod_measure(nu, kappa))
    return DataProcessingReport(
        divergence=label,
        processed=processed,
        original=original,
        joint=joint,
        dpi_holds=processed <= original + TOLERANCE,
        conditioning_holds=processed <= joint + TOLERANCE,
    )


def renyi_div(alpha: Fraction, mu: Measure, nu: Measure) -> float:
    """Renyi divergence of order alpha in (0, 1), in nats.

    Densities are taken exactly against mu + nu; the result is +inf iff the
    supports are disjoint (decided exactly), and exactly 0.0 when mu == nu.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise AlphaOutOfRange(f"alpha must lie strictly in (0, 1), got {alpha}")
    if mu.space != nu.space:
        raise SpaceMismatch(f"measures on {mu.space} and {nu.space} do not compare")
    mu.require_probability()
    nu.require_probability()
    if mu == nu:
        return 0.0
    shared = any(
        not wm.is_zero() and not wn.is_zero()
        for wm, wn in zip(mu.weights, nu.weights)
    )
    if not shared:
        return math.inf
    a = float(alpha)
    total = 0.0
    for wm, wn in zip(mu.weights, nu.weights):
        if wm.is_zero() or wn.is_zero():
            continue
        m = wm + wn
        p = float(wm / m)
        q = float(wn / m)
        total += (p ** a) * (q ** (1.0 - a)) * float(m)
    return math.log(total) / (a - 1.0)


def mgf(x: RealRV, mu: Measure, t) -> float:
    """Moment generating function of an observable at an exact argument t."""
    if mu.space != x.domain:
        raise SpaceMismatch(
            f"observable on {x.domain} does not match measure space {mu.space}"
        )
    mu.require_probability()
    t = Fraction(t)
    acc = 0.0
    for w, v in zip(mu.weights, x.values):
        if not w.is_zero():
            acc += float(w) * math.exp(float(t * v))
    return acc


# -- sub-Gaussian certification ---------------------------------------------------


@dataclass(frozen=True)
class PlainMeasureScope:
    """Certify against a single probability measure."""

    measure: Measure

    def rows(self):
        return [self.measure.require_probability()]

    def describe(self):
        return "plainMeasure"


@dataclass(frozen=True)
class KernelScope:
    """Certify against every row of a Markov kernel at atoms the base measure hits."""

    kernel: Kernel
    measure: Measure

    def rows(self):
        self.kernel.require_markov()
        if self.measure.space != self.kernel.domain:
            raise SpaceMismatch(
                f"scope measure on {self.measure.space} does not match kernel "
                f"domain {self.kernel.domain}"
            )
        return [
            row
            for w, row in zip(self.measure.weights, self.kernel.rows)
            if not w.is_zero()
        ]

    def describe(self):
        return "kernelScope"


@dataclass(frozen=True)
class SubgaussianCertificate:
    variable: RealRV
    constant: Fraction
    scope: object
    method: tuple
    verified: bool
    # All expectations here are finite sums, so the integrability side
    # condition of the definition holds vacuously; recorded, not checked.
    integrability: str = "vacuous (finite sums)"

    def as_dict(self):
        method = {"name": self.method[0]}
        if self.method[0] == "gridCheck":
            method["T"] = str(self.method[1])
            method["step"] = str(self.method[2])
        return {
            "constant": str(self.constant),
            "scope": self.scope.describe(),
            "method": method,
            "verified": self.verified,
            "integrability": self.integrability,
        }


def _scope_rows(x: RealRV, scope):
    rows = scope.rows()
    for row in rows:
        if row.space != x.domain:
            raise SpaceMismatch(
                f"scope rows live on {row.space}, observable on {x.domain}"
            )
    return rows


def certify_bounded_range(x: RealRV, scope) -> SubgaussianCertificate:
    """Certificate with constant (range width)^2 / 4, the Hoeffding lemma route.

    Requires exact mean zero under every in-scope row; the range is taken over
    atoms carrying positive mass under some in-scope row, since that is where
    the variable lives almost surely.
    """
    rows = _scope_rows(x, scope)
    support = set()
    for row in rows:
        m = x.mean(row)
        if m != 0:
            raise NonzeroMean(f"in-scope row has exact mean {m}, expected 0")
        support.update(row.support())
    if support:
        values = [x.values[i] for i in support]
        lo, hi = min(values), max(values)
        constant = (hi - lo) ** 2 / 4
    else:
        constant = Fraction(0)
    return SubgaussianCertificate(
        variable=x,
        constant=constant,
        scope=scope,
        method=("boundedRange",),
        verified=True,
    )


def _grid_points(grid_t: Fraction, grid_step: Fraction):
    if grid_t <= 0 or grid_step <= 0:
        raise KernelAlgError("grid radius and step must be positive")
    points = []
    t = -grid_t
    while t <= grid_t:
        points.append(t)
        t += grid_step
    return points


def certify_grid(
    x: RealRV, scope, constant, grid_t, grid_step
) -> SubgaussianCertificate:
    """Verify mgf(t) <= exp(c t^2 / 2) on an explicit grid in [-T, T].

    This is an honest partial check: the certificate records the grid it was
    verified on.  Raises GridViolation at the first failing point.
    """
    constant = Fraction(constant)
    grid_t = Fraction(grid_t)
    grid_step = Fraction(grid_step)
    if constant < 0:
        raise KernelAlgError("sub-Gaussian constant must be nonnegative")
    rows = _scope_rows(x, scope)
    for t in _grid_points(grid_t, grid_step):
        bound = math.exp(float(constant * t * t / 2))
        for row in rows:
            value = mgf(x, row, t)
            if value > bound * (1.0 + _GRID_SLACK):
                raise GridViolation(t, value, bound)
    return SubgaussianCertificate(
        variable=x,
        constant=constant,
        scope=scope,
        method=("gridCheck", grid_t, grid_step),
        verified=True,
    )


def certify_subgaussian(
    x: RealRV,
    scope,
    method: str = "boundedRange",
    constant=None,
    grid_t=Fraction(10),
    grid_step=Fraction(1, 100),
) -> SubgaussianCertificate:
    """Dispatch to the bounded-range or explicit-grid certification route."""
    if method in ("boundedRange", "bounded"):
        return certify_bounded_range(x, scope)
    if method in ("gridCheck", "grid"):
        if constant is None:
            raise NotCertified("grid certification needs an explicit constant")
        return certify_grid(x, scope, constant, grid_t, grid_step)
    raise KernelAlgError(f"unknown certification method {method!r}")


def subgaussian_add_comp_prod(
    cert_x: SubgaussianCertificate,
    cert_y: SubgaussianCertificate,
    grid_t=Fraction(10),
    grid_step=Fraction(1, 100),
) -> SubgaussianCertificate:
    """Certificate for the coordinate sum under the sequential pairing.

    cert_x must hold over (kappa, nu) and cert_y over (eta, nu (x) kappa) with
    eta consuming kappa's (input, output) pairs; then the sum of the two
    observables on the paired outputs is sub-Gaussian with the summed constant
    over (kappa (x) eta, nu).  The summed certificate is re-verified on an
    explicit grid rather than taken on faith.
    """
    if not (cert_x.verified and cert_y.verified):
        raise NotCertified("both input certificates must be verified")
    sx, sy = cert_x.scope, cert_y.scope
    if not isinstance(sx, KernelScope) or not isinstance(sy, KernelScope):
        raise ScopeMismatch("summing certificates needs kernel scopes on both sides")
    kappa, nu = sx.kernel, sx.measure
    eta = sy.kernel
    if eta.domain != Product(kappa.domain, kappa.codomain):
        raise ScopeMismatch(
            f"second kernel must consume {Product(kappa.domain, kappa.codomain)}, "
            f"got {eta.domain}"
        )
    if sy.measure != comp_prod_measure(nu, kappa):
        raise ScopeMismatch(
            "second certificate's measure is not the joint of the first scope"
        )
    if cert_x.variable.domain != kappa.codomain or cert_y.variable.domain != eta.codomain:
        raise ScopeMismatch("certificate variables do not live on the scope codomains")

    pair_space = Product(kappa.codomain, eta.codomain)
    xv, yv = cert_x.variable, cert_y.variable
    combined = RealRV(
        pair_space,
        [xv.value(a) + yv.value(b) for (a, b) in pair_space.atoms],
    )
    scope = KernelScope(comp_prod(kappa, eta), nu)
    return certify_grid(
        combined, scope, cert_x.constant + cert_y.constant, grid_t, grid_step
    )


@dataclass
class HoeffdingReport:
    exact_tail: Fraction
    bound: float
    holds: bool
    n: int
    threshold: Fraction
    certificate: SubgaussianCertificate

    def as_dict(self):
        return {
            "exactTail": str(self.exact_tail),
            "bound": self.bound,
            "holds": self.holds,
        }


def hoeffding_check(
    x: RealRV, mu: Measure, sigma_sq, n: int, t
) -> HoeffdingReport:
    """Exact tail of an n-fold independent sum against exp(-t^2 / (2 n sigma^2)).

    The tail P(sum >= t) is computed by exact convolution of the value
    distribution, so `holds` compares an exact rational against the float
    bound with no statistical or rounding doubt on the left side.
    The variable must certify sub-Gaussian with constant sigma^2 first: by
    bounded range if that gives a constant <= sigma^2, otherwise by an
    explicit grid check at sigma^2.
    """
    sigma_sq = Fraction(sigma_sq)
    t = Fraction(t)
    if n < 1:
        raise KernelAlgError("n must be at least 1")
    if t <= 0:
        raise KernelAlgError("threshold t must be positive")
    if sigma_sq <= 0:
        raise NotCertified("sigma^2 must be positive")
    scope = PlainMeasureScope(mu)
    try:
        certificate = certify_bounded_range(x, scope)
        if certificate.constant > sigma_sq:
            certificate = certify_grid(
                x, scope, sigma_sq, Fraction(10), Fraction(1, 100)
            )
    except (NonzeroMean, GridViolation) as exc:
        raise NotCertified(
            f"variable does not certify sub-Gaussian at {sigma_sq}: {exc}"
        ) from exc

    # Exact law of the variable, then n-fold convolution.
    law: dict = {}
    for w, v in zip(mu.require_probability().weights, x.values):
        if not w.is_zero():
            law[v] = law.get(v, Fraction(0)) + w.as_fraction()
    total = dict(law)
    for _ in range(n - 1):
        nxt: dict = {}
        for s, p in total.items():
            for v, q in law.items():
                key = s + v
                nxt[key] = nxt.get(key, Fraction(0)) + p * q
        total = nxt
    tail = sum((p for s, p in total.items() if s >= t), Fraction(0))
    bound = math.exp(float(-(t * t) / (2 * n * sigma_sq)))
    return HoeffdingReport(
        exact_tail=tail,
        bound=bound,
        holds=tail <= Fraction(bound),
        n=n,
        threshold=t,
        certificate=certificate,
    )

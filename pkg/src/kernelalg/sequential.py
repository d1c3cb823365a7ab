"""Finite-horizon trajectory kernels for chains of Markov kernels.

A chain fixes a start space and a list of Markov steps, where step i maps the
left-nested history space (((start x out_1) x out_2) ... x out_i) to the next
output space.  The trajectory kernel up to horizon n is the iterated
sequential pairing of the steps; every rebracketing between the history
spaces and the growing trajectory product is inserted here, explicitly, so
callers never juggle associators.  Trajectories exclude the start coordinate:
the horizon-n trajectory space is the left-nested product of out_1 .. out_n.

Sampling is reproducible by construction: the generator is splitmix64 (the
exact algorithm is pinned below and in the README), and atoms are drawn by
inverse CDF against thresholds computed in exact arithmetic and scaled to
2**64, compared directly with the raw 64-bit draw.  No float is involved, so
two runs with one seed agree bit for bit on every platform.
"""

from __future__ import annotations

from bisect import bisect_right

from .algebra import comp_measure, comp_prod, deterministic, prod_mk_left, rebracket_kernel
from .errors import HorizonOutOfRange, KernelAlgError, SpaceMismatch
from .measures import Kernel, Measure
from .spaces import Product, SpaceExpr
from .variables import RandomVariable

__all__ = [
    "SplitMix64",
    "PRNG_ALGORITHM",
    "KernelChain",
    "markov_chain",
    "traj_kernel",
    "projection_consistency",
    "trajectory_law",
    "flatten_trajectory",
    "sample",
]

PRNG_ALGORITHM = "splitmix64"

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """The splitmix64 generator: 64-bit state, 64-bit output words.

    next_u64 advances the state by the golden-gamma increment and applies the
    standard two-round xor-shift-multiply finalizer.  Seed 0 produces the
    well-known first outputs 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, ...
    """

    __slots__ = ("seed", "state")

    algorithm = PRNG_ALGORITHM

    def __init__(self, seed: int):
        if not 0 <= seed <= _MASK:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = seed
        self.state = seed

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)


class _RowSampler:
    """Inverse-CDF thresholds of a probability row, scaled to 2**64."""

    __slots__ = ("thresholds",)

    def __init__(self, row: Measure):
        thresholds = []
        num, den = 0, 1
        for w in row.weights:
            if not w.is_zero():
                f = w.as_fraction()
                num = num * f.denominator + f.numerator * den
                den = den * f.denominator
            # threshold = ceil(cumulative * 2**64), exact
            thresholds.append(-((-num << 64) // den))
        self.thresholds = thresholds

    def draw(self, u: int) -> int:
        return bisect_right(self.thresholds, u)


class KernelChain:
    """A start space plus Markov steps over left-nested history spaces."""

    __slots__ = ("start", "steps", "initial")

    def __init__(self, start: SpaceExpr, steps, initial: Measure | None = None):
        steps = tuple(steps)
        history = start
        for i, step in enumerate(steps):
            if step.domain != history:
                raise SpaceMismatch(
                    f"step {i} must map the history space {history}, "
                    f"got domain {step.domain}"
                )
            step.require_markov()
            history = Product(history, step.codomain)
        if initial is not None:
            if initial.space != start:
                raise SpaceMismatch(
                    f"initial distribution on {initial.space}, chain starts in {start}"
                )
            initial.require_probability()
        self.start = start
        self.steps = steps
        self.initial = initial

    def __len__(self):
        return len(self.steps)

    def __eq__(self, other):
        if not isinstance(other, KernelChain):
            return NotImplemented
        return (
            self.start == other.start
            and self.steps == other.steps
            and self.initial == other.initial
        )

    def output_spaces(self):
        return tuple(step.codomain for step in self.steps)


def markov_chain(initial: Measure, step: Kernel, n: int) -> KernelChain:
    """A homogeneous chain: every step applies `step` to the last state only."""
    if step.domain != step.codomain:
        raise SpaceMismatch(
            f"a Markov chain step must be square, got {step.domain} -> {step.codomain}"
        )
    step.require_markov()
    initial.require_probability()
    if initial.space != step.domain:
        raise SpaceMismatch(
            f"initial distribution on {initial.space} does not match state space "
            f"{step.domain}"
        )
    steps = [step]
    history = step.domain
    for _ in range(1, n):
        steps.append(prod_mk_left(history, step))
        history = Product(history, step.codomain)
    return KernelChain(step.domain, steps, initial=initial)


def _check_horizon(chain: KernelChain, n: int):
    if not 1 <= n <= len(chain.steps):
        raise HorizonOutOfRange(
            f"horizon {n} outside 1..{len(chain.steps)}"
        )


def traj_kernel(chain: KernelChain, n: int) -> Kernel:
    """Joint kernel of the first n outputs, start space to trajectory space."""
    _check_horizon(chain, n)
    xi = chain.steps[0]
    history = Product(chain.start, chain.steps[0].codomain)
    for i in range(1, n):
        step = chain.steps[i]
        lift_dom = Product(chain.start, xi.codomain)
        lifted = compose_with_rebracket(step, lift_dom, history)
        xi = comp_prod(xi, lifted)
        history = Product(history, step.codomain)
    return xi


def compose_with_rebracket(step: Kernel, src: SpaceExpr, dst: SpaceExpr) -> Kernel:
    """Precompose a step with the canonical re-association src -> dst."""
    if step.domain != dst:
        raise SpaceMismatch(
            f"step domain {step.domain} is not the history space {dst}"
        )
    from .algebra import compose

    return compose(step, rebracket_kernel(src, dst))


def projection_consistency(chain: KernelChain, n: int, m: int) -> bool:
    """Does dropping the last n-m coordinates of the n-trajectory give the m one?"""
    _check_horizon(chain, n)
    if not 1 <= m <= n:
        raise HorizonOutOfRange(f"projection horizon {m} outside 1..{n}")
    big = traj_kernel(chain, n)
    small = traj_kernel(chain, m)
    if m == n:
        return big == small

    def drop(atom):
        for _ in range(n - m):
            atom = atom[0]
        return atom

    proj = RandomVariable.from_function(big.codomain, small.codomain, drop)
    from .algebra import compose

    return compose(deterministic(proj), big) == small


def trajectory_law(chain: KernelChain, n: int, initial: Measure | None = None) -> Measure:
    """Exact distribution of the horizon-n trajectory."""
    init = initial if initial is not None else chain.initial
    if init is None:
        raise KernelAlgError("chain has no initial distribution to push through")
    return comp_measure(traj_kernel(chain, n), init)


def flatten_trajectory(n: int, atom) -> tuple:
    """Unfold a left-nested trajectory atom into the tuple (out_1, ..., out_n)."""
    parts = []
    for _ in range(n - 1):
        atom, last = atom
        parts.append(last)
    parts.append(atom)
    return tuple(reversed(parts))


def sample(
    chain: KernelChain,
    n: int,
    seed: int,
    count: int,
    initial: Measure | None = None,
):
    """Draw `count` horizon-n trajectories, reproducibly for a given seed.

    Returns a list of n-tuples of atoms.  The empirical distribution converges
    to trajectory_law(chain, n); determinism is bit-exact per seed.
    """
    _check_horizon(chain, n)
    if count < 0:
        raise KernelAlgError("trajectory count must be nonnegative")
    init = initial if initial is not None else chain.initial
    if init is None:
        raise KernelAlgError("chain has no initial distribution to sample from")
    if init.space != chain.start:
        raise SpaceMismatch(
            f"initial distribution on {init.space}, chain starts in {chain.start}"
        )
    init.require_probability()

    rng = SplitMix64(seed)
    init_sampler = _RowSampler(init)
    row_samplers: list[dict] = [{} for _ in range(n)]
    out = []
    for _ in range(count):
        x = init.space.atoms[init_sampler.draw(rng.next_u64())]
        history = x
        traj = []
        for i in range(n):
            step = chain.steps[i]
            ri = step.domain.index_of(history)
            sampler = row_samplers[i].get(ri)
            if sampler is None:
                sampler = _RowSampler(step.rows[ri])
                row_samplers[i][ri] = sampler
            atom = step.codomain.atoms[sampler.draw(rng.next_u64())]
            traj.append(atom)
            history = (history, atom)
        out.append(tuple(traj))
    return out

"""Private release of all-pairs shortest distances, plus the two baselines.

Pipeline: build the shortcut graph, calibrate a Laplace scale (instance-exact
sensitivity by default, or the closed-form constant), add one noise draw per
edge of the augmented graph, and post-process with the hop-limited DP, which
reads only the public topology and the noisy weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csgraph

from .graphs import DistanceMatrix, exact_apsd
from .hoplimit import hop_limited_matrix
from .shortcut import construct_graph, sensitivity_bound

NOISE_EXACT = "exact-sensitivity"
NOISE_FORMULA = "paper-formula"
NOISE_OFF = "disabled"
NOISE_MODES = (NOISE_EXACT, NOISE_FORMULA, NOISE_OFF)

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def _finalize(z):
    # splitmix64 finalizer; operates on uint64 ndarrays (wrapping arithmetic)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _uniforms_open(seed, indices):
    """One uniform in the open interval (-1/2, 1/2) per index, stateless."""
    idx = np.atleast_1d(np.asarray(indices)).astype(np.uint64)
    state = np.uint64(seed & _MASK) + (idx + np.uint64(1)) * _GOLDEN
    mantissa = (_finalize(state) >> np.uint64(11)).astype(np.float64)
    return (mantissa + 0.5) * 2.0**-53 - 0.5


def _laplace_transform(scale, u):
    """Inverse-CDF map: X = -scale * sgn(u) * ln(1 - 2|u|)."""
    return -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def _mix_int(x):
    # splitmix64 finalizer over python ints (no numpy scalar overflow noise)
    x &= _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(seed, *parts):
    """Deterministic substream seed from a base seed and integer labels."""
    state = int(seed) & _MASK
    for part in parts:
        salted = (int(part) + 0x9E3779B97F4A7C15) & _MASK
        state = _mix_int(state ^ _mix_int(salted))
    return state


class LaplaceSampler:
    """Counter-based Laplace noise source.

    The same seed always reproduces the same stream, and draws are
    addressable by index: a draw keyed to an edge's canonical code does not
    move when unrelated edges appear elsewhere.
    """

    __slots__ = ("seed", "counter")

    def __init__(self, seed, counter=0):
        self.seed = int(seed)
        self.counter = int(counter)

    def uniform(self):
        u = float(_uniforms_open(self.seed, [self.counter])[0])
        self.counter += 1
        return u

    def laplace_at(self, scale, indices):
        """Vector of Laplace(scale) draws at explicit draw indices."""
        if scale <= 0:
            raise ValueError(f"noise scale must be positive, got {scale}")
        return _laplace_transform(float(scale), _uniforms_open(self.seed, indices))


def laplace_sample(b, sampler):
    """One Laplace(b) draw from the sampler's counter position."""
    if b <= 0:
        raise ValueError(f"noise scale must be positive, got {b}")
    return float(_laplace_transform(float(b), sampler.uniform()))


def full_hop_budget(n):
    """Hop budget under which the shortcut graph preserves all-pairs
    distances: ceil(2 * max(2, log_1.5 n))."""
    if n < 1:
        raise ValueError(f"vertex count must be >= 1, got {n}")
    return math.ceil(2.0 * max(2.0, math.log(n) / math.log(1.5)))


def anchor_hop_budget(n):
    """Hop budget preserving distances from the root separator and starting
    set to everything: ceil(max(2, log_1.5 n))."""
    if n < 1:
        raise ValueError(f"vertex count must be >= 1, got {n}")
    return math.ceil(max(2.0, math.log(n) / math.log(1.5)))


# c must exceed 2/log2(1.5) in paper-formula mode so the formula's hop
# budget covers the distance-preservation budget.
MIN_FORMULA_C = 2.0 / math.log2(1.5)


@dataclass(frozen=True)
class PrivacyParams:
    """Knobs of the release: budget, calibration mode, formula constant, and
    an optional hop-budget override (None means automatic)."""

    epsilon: float
    noise_mode: str = NOISE_EXACT
    c: float = 5.0
    hop_budget: int | None = None

    def __post_init__(self):
        if self.noise_mode not in NOISE_MODES:
            raise ValueError(f"unknown noise mode {self.noise_mode!r}")
        if self.noise_mode != NOISE_OFF and self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.noise_mode == NOISE_FORMULA and self.c <= MIN_FORMULA_C:
            raise ValueError(
                f"formula constant c={self.c} must exceed {MIN_FORMULA_C:.4f}"
            )
        if self.hop_budget is not None and self.hop_budget < 1:
            raise ValueError(f"hop budget must be >= 1, got {self.hop_budget}")


@dataclass(frozen=True)
class MechanismOutput:
    """Released distances plus release metadata."""

    distances: DistanceMatrix
    noise_scale: float
    hop_budget: int
    delta_used: float
    seed: int
    depth: int
    shortcut_count: int


class PreparedMechanism:
    """The deterministic half of the release, reusable across seeds.

    Builds the shortcut graph and the sensitivity account once; `release`
    then only draws noise and runs the hop-limited post-processing.
    """

    def __init__(self, g, t, params):
        self.params = params
        self.n = g.n
        self.width = t.width
        inter, trace = construct_graph(g, t)
        self.intermediate = inter
        self.trace = trace
        self.account = sensitivity_bound(trace, g)
        self._eu, self._ev, self._ew = inter.graph.edge_arrays()
        self._keys = self._eu * g.n + self._ev
        if params.noise_mode == NOISE_OFF:
            self.noise_scale = 0.0
        elif params.noise_mode == NOISE_EXACT:
            self.noise_scale = self.account.delta / params.epsilon
        else:
            p1 = self.width + 1
            log_n = math.log2(self.n) if self.n > 1 else 0.0
            self.noise_scale = params.c * p1 * p1 * log_n * log_n / params.epsilon
        if params.hop_budget is not None:
            self.hop_budget = params.hop_budget
        else:
            self.hop_budget = full_hop_budget(max(1, self.n))

    def release(self, seed, clamp=False):
        weights = self._ew
        if self.noise_scale > 0:
            sampler = LaplaceSampler(seed)
            weights = weights + sampler.laplace_at(self.noise_scale, self._keys)
        if clamp:
            weights = np.maximum(weights, 0.0)
        dist = hop_limited_matrix(self.n, self._eu, self._ev, weights, self.hop_budget)
        dist = np.minimum(dist, dist.T)
        np.fill_diagonal(dist, 0.0)
        return MechanismOutput(
            distances=DistanceMatrix(dist),
            noise_scale=self.noise_scale,
            hop_budget=self.hop_budget,
            delta_used=self.account.delta,
            seed=int(seed),
            depth=self.trace.max_depth,
            shortcut_count=self.trace.total_shortcuts,
        )


def prepare_mechanism(g, t, params):
    return PreparedMechanism(g, t, params)


def private_apsd(g, t, params, seed, clamp=False):
    """Run the full private release: shortcut graph, per-edge Laplace noise,
    hop-limited post-processing. Deterministic given (inputs, seed, params).

    With noise disabled the output equals the exact all-pairs distances.
    """
    return PreparedMechanism(g, t, params).release(seed, clamp=clamp)


def input_perturbation_apsd(g, epsilon, seed):
    """Baseline: Laplace(1/epsilon) on every input edge weight, then
    shortest distances in the noisy graph.

    Semantics on noisy graphs is the (n-1)-round min-plus relaxation, which
    tolerates negative edges; when all noisy weights stay non-negative this
    coincides with plain shortest paths and is computed that way.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    eu, ev, ew = g.edge_arrays()
    n = g.n
    if n == 0:
        return DistanceMatrix(np.zeros((0, 0)))
    sampler = LaplaceSampler(seed)
    noisy = ew
    if ew.size:
        noisy = ew + sampler.laplace_at(1.0 / epsilon, eu * n + ev)
    if ew.size and noisy.min() < 0 and n > 1:
        dist = hop_limited_matrix(n, eu, ev, noisy, n - 1)
    else:
        dist = csgraph.dijkstra(g.csr(weights=noisy), directed=True)
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(dist, 0.0)
    return DistanceMatrix(dist)


def output_perturbation_apsd(g, epsilon, seed):
    """Baseline: exact distances plus Laplace(n(n-1)/(2*epsilon)) per
    released pair (the distance vector has n(n-1)/2 coordinates, each
    1-Lipschitz in the weights)."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    n = g.n
    dist = np.array(exact_apsd(g).values)
    if n > 1:
        scale = n * (n - 1) / (2.0 * epsilon)
        iu, iv = np.triu_indices(n, k=1)
        sampler = LaplaceSampler(seed)
        vals = dist[iu, iv] + sampler.laplace_at(scale, iu * n + iv)
        dist[iu, iv] = vals
        dist[iv, iu] = vals
    np.fill_diagonal(dist, 0.0)
    return DistanceMatrix(dist)


def theoretical_error_bound(n, p, c, epsilon, gamma):
    """High-probability error bound (reporting only):
    2 c^2 log2(n/gamma) p^2 log2(n)^3 / epsilon."""
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if n < 1 or p <= 0 or c <= 0 or epsilon <= 0:
        raise ValueError("n, p, c and epsilon must be positive")
    log_n = math.log2(n)
    return 2.0 * c * c * math.log2(n / gamma) * p * p * log_n**3 / epsilon

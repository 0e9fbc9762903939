"""Explicit sphere coverings by spherical caps.

Every builder returns a :class:`HittingSet` of deduplicated unit vectors and
the covering level its construction guarantees.
"""

import math
from itertools import product

import numpy as np

from ..exceptions import BudgetError, HypothesisError, ParameterError
from .sets import (DEFAULT_BUDGET, HittingSet, Provenance, check_budget,
                   dedup_rows, normalize_rows)

GOLDEN_ALPHA = 2.0 + math.sqrt(5.0)
GOLDEN_BETA = 3.0 + math.sqrt(5.0)


def _check_int(name, value, low):
    if int(value) != value or value < low:
        raise ParameterError(f"{name} must be an integer >= {low}, got {value}")
    return int(value)


# -- spherical-coordinate grid ------------------------------------------------

def grid_tau(n, m):
    """Covering level of the spherical-coordinate grid (clipped at -1)."""
    return max(-1.0, 1.0 - math.pi ** 2 * (n - 1) / (8.0 * m * m))


def grid_cardinality(n, m):
    """Exact number of distinct grid points.

    One angle ranging over ``2m`` values gives ``2m`` points; each extra polar
    angle contributes the two poles plus ``m - 1`` interior circles.
    """
    count = 2 * m
    for _ in range(n - 2):
        count = 2 + (m - 1) * count
    return count


def _grid_points(n, m):
    if n == 2:
        phi = np.arange(2 * m) * math.pi / m
        return np.column_stack([np.cos(phi), np.sin(phi)])
    sub = _grid_points(n - 1, m)
    blocks = []
    pole = np.zeros((1, n)); pole[0, 0] = 1.0
    blocks.append(pole)
    for k in range(1, m):
        phi = k * math.pi / m
        blk = np.empty((sub.shape[0], n))
        blk[:, 0] = math.cos(phi)
        blk[:, 1:] = math.sin(phi) * sub
        blocks.append(blk)
    blocks.append(-pole)
    return np.vstack(blocks)


def build_grid(n, m, budget=DEFAULT_BUDGET):
    """Grid points in spherical coordinates at angular spacing ``pi/m``.

    Polar angles take the values ``k*pi/m`` for ``k = 0..m`` (both poles
    included) and the azimuth ``k*pi/m`` for ``k < 2m``. Every point of the
    sphere lies within chordal distance ``pi*sqrt(n-1)/(2m)`` of a grid point.
    """
    n = _check_int("n", n, 2)
    m = _check_int("m", m, 1)
    check_budget(grid_cardinality(n, m), budget, f"grid(n={n}, m={m})")
    V = dedup_rows(_grid_points(n, m))
    return HittingSet(n, V, grid_tau(n, m),
                      Provenance("grid", {"n": n, "m": m}), True)


# -- randomized ----------------------------------------------------------------

def sample_sphere(n, count, rng):
    """``count`` i.i.d. uniform points on the unit sphere of ``R^n``."""
    g = rng.standard_normal((count, n))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms == 0.0):  # pragma: no cover - measure zero
        bad = norms == 0.0
        g[bad] = rng.standard_normal((int(bad.sum()), n))
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def build_random(n, count, seed=0, budget=DEFAULT_BUDGET):
    """Normalized i.i.d. Gaussian vectors (numpy PCG64 seeded by ``seed``).

    The covering level is not certified: ``claimed_tau`` is ``nan``.
    """
    n = _check_int("n", n, 1)
    count = _check_int("count", count, 1)
    check_budget(count, budget, f"random(n={n}, count={count})")
    V = sample_sphere(n, count, np.random.default_rng(seed))
    return HittingSet(n, V, math.nan,
                      Provenance("random", {"n": n, "count": count, "seed": seed}),
                      False)


# -- ternary set H2 --------------------------------------------------------------

def h2_tau(n):
    return 2.0 / math.sqrt(math.log(n) + 5.0)


def build_h2(n, budget=DEFAULT_BUDGET):
    """All nonzero vectors of ``{-1, 0, 1}^n``, normalized."""
    n = _check_int("n", n, 1)
    check_budget(3 ** n - 1, budget, f"h2(n={n})")
    codes = np.arange(1, 3 ** n)
    digits = (codes[:, None] // 3 ** np.arange(n - 1, -1, -1)) % 3
    Z = np.where(digits == 2, -1.0, digits.astype(np.float64))
    return HittingSet(n, normalize_rows(Z), h2_tau(n),
                      Provenance("h2", {"n": n}), True)


# -- multi-level set H3 --------------------------------------------------------

def h3_tau(alpha, beta):
    return (alpha - 1.0) / math.sqrt(alpha * beta * (alpha + 1.0))


def h3_formulas(alpha, gamma):
    """Covering level and cardinality base of ``H3(alpha, gamma + 1)``.

    Returns ``(tau, base)`` where the set size is at most
    ``(base + o(1))**n``.
    """
    if alpha < 1.0 or gamma < alpha:
        raise ParameterError(
            f"need 1 <= alpha <= gamma, got alpha={alpha}, gamma={gamma}")
    tau = (alpha - 1.0) / math.sqrt(alpha * (alpha + 1.0) * (gamma + 1.0))
    r = (gamma - alpha) / gamma
    last = 1.0 if r == 0.0 else (gamma / (gamma - alpha)) ** r
    base = (2.0 ** ((gamma + alpha) / gamma)
            * alpha ** (-alpha / gamma)
            * (gamma + 1.0) ** (alpha * (gamma + 1.0) / gamma ** 2)
            * last)
    return tau, base


def _check_h3_params(alpha, beta):
    if alpha < 1.0 or beta < alpha + 1.0:
        raise ParameterError(
            f"need alpha >= 1 and beta >= alpha + 1, got {alpha}, {beta}")


def h3_levels(n, alpha, beta):
    """Number of levels ``m`` and block sizes ``(|I1|, ..., |Im|)``."""
    _check_h3_params(alpha, beta)
    x = math.log(alpha * n) / math.log(beta)
    m = max(1, math.ceil(x - 1e-12))
    tail = [math.floor(alpha * n / beta ** (k - 1) + 1e-12) for k in range(2, m + 1)]
    return m, (n - sum(tail),) + tuple(tail)


def _level_assignments(n, sizes):
    """Level vectors (entries 1..m) with at most ``sizes[k-1]`` entries at
    each level ``k >= 2``; level 1 is unrestricted."""
    m = len(sizes)
    out = []
    for levels in product(range(1, m + 1), repeat=n):
        counts = np.bincount(levels, minlength=m + 1)
        if all(counts[k] <= sizes[k - 1] for k in range(2, m + 1)):
            out.append(levels)
    return np.array(out, dtype=np.int64).reshape(-1, n)


def h3_raw_count(n, alpha, beta):
    """Number of signed level vectors materialized before deduplication."""
    m, sizes = h3_levels(n, alpha, beta)
    # count level patterns with per-level caps by dynamic programming over levels
    ways = {0: 1}  # positions used by levels >= 2 -> multinomial weight
    for k in range(2, m + 1):
        nxt = {}
        for used, w in ways.items():
            for c in range(0, min(sizes[k - 1], n - used) + 1):
                nxt[used + c] = nxt.get(used + c, 0) + w * math.comb(n - used, c)
        ways = nxt
    return sum(ways.values()) * 2 ** n


def build_h3(n, alpha=GOLDEN_ALPHA, beta=GOLDEN_BETA, budget=DEFAULT_BUDGET):
    """Multi-level sign vectors over all block partitions, normalized.

    Entries in block ``k`` take values in ``{±1, ±beta**((k-1)/2)}``. Taking
    the union over every partition with the prescribed block sizes, a level
    vector belongs to the set exactly when each level ``k >= 2`` is used by at
    most ``|I_k|`` coordinates; that characterization is enumerated directly.
    """
    n = _check_int("n", n, 1)
    m, sizes = h3_levels(n, alpha, beta)
    check_budget(h3_raw_count(n, alpha, beta), budget,
                 f"h3(n={n}, alpha={alpha:.6g}, beta={beta:.6g})")
    mags = beta ** ((np.arange(1, m + 1) - 1) / 2.0)
    L = _level_assignments(n, sizes)
    signs = np.array(list(product((1.0, -1.0), repeat=n)))
    absz = mags[L - 1]
    Z = (absz[:, None, :] * signs[None, :, :]).reshape(-1, n)
    V = dedup_rows(normalize_rows(Z))
    prov = Provenance("h3", {"n": n, "alpha": alpha, "beta": beta})
    return HittingSet(n, V, h3_tau(alpha, beta), prov, True)


def h3_witness(x, alpha=GOLDEN_ALPHA, beta=GOLDEN_BETA):
    """Member of ``build_h3(len(x), alpha, beta)`` close to the unit vector x.

    Coordinates are classified by magnitude: ``|x_i| <= 1/sqrt(alpha n)`` gets
    level 1, otherwise level ``k`` with
    ``beta**(k-1) < alpha n x_i**2 <= beta**k``, and the witness takes
    ``sign(x_i) * beta**((k-1)/2)`` before normalization. Its inner product
    with ``x`` is at least ``h3_tau(alpha, beta)``.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    m, _ = h3_levels(n, alpha, beta)
    thresholds = beta ** np.arange(m + 1) / (alpha * n)
    k = np.searchsorted(thresholds, x * x, side="left")
    k = np.clip(k, 0, m)
    mag = np.where(k == 0, 1.0, beta ** ((np.maximum(k, 1) - 1) / 2.0))
    z = np.where(x >= 0, 1.0, -1.0) * mag
    return z / np.linalg.norm(z)


# -- elementary sets -------------------------------------------------------------

def _simplex(n):
    # centered basis of R^{n+1} expressed in an orthonormal basis of the
    # hyperplane orthogonal to the all-ones vector
    A = np.column_stack([np.ones(n + 1), np.eye(n + 1)[:, :n]])
    Q, _ = np.linalg.qr(A)
    P = np.eye(n + 1) - 1.0 / (n + 1)
    return normalize_rows(P @ Q[:, 1:])


def build_classical(n, kind):
    """Elementary coverings: ``simplex`` (level 1/n), ``pm_basis`` (±e_i,
    level 1/sqrt(n)), ``antipodal`` ({e1, -e1}, level 0) and ``singleton``
    ({e1}, level -1)."""
    n = _check_int("n", n, 1)
    if kind == "simplex":
        V, tau = _simplex(n), 1.0 / n
    elif kind == "pm_basis":
        I = np.eye(n)
        V = np.empty((2 * n, n))
        V[0::2], V[1::2] = I, -I
        tau = 1.0 / math.sqrt(n)
    elif kind == "antipodal":
        V, tau = np.vstack([np.eye(n)[0], -np.eye(n)[0]]), 0.0
    elif kind == "singleton":
        V, tau = np.eye(n)[:1], -1.0
    else:
        raise ParameterError(f"unknown classical kind {kind!r}")
    if n == 1 and kind == "antipodal":
        tau = 1.0
    return HittingSet(n, V, tau, Provenance(kind, {"n": n}), True)


# -- composition -----------------------------------------------------------------

def kron_tau(tau, n2):
    return tau / math.sqrt(n2)


def append_tau(tau1, tau2):
    return tau1 * tau2 / math.sqrt(tau1 * tau1 + tau2 * tau2)


def kron_compose(H, n2):
    """``E^{n2} ⊠ H``: each vector of ``H`` placed in each of ``n2`` blocks.

    The covering level drops by ``sqrt(n2)``; requires ``H.claimed_tau >= 0``.
    """
    n2 = _check_int("n2", n2, 1)
    if H.claimed_tau < 0:
        raise HypothesisError(
            f"Kronecker composition needs tau >= 0, got {H.claimed_tau}")
    n1, k = H.n, len(H)
    V = np.zeros((n2 * k, n1 * n2))
    for i in range(n2):
        V[i * k:(i + 1) * k, i * n1:(i + 1) * n1] = H.vectors
    prov = Provenance("kron", {"n2": n2}, (H.provenance,))
    return HittingSet(n1 * n2, V, kron_tau(H.claimed_tau, n2), prov, H.certified)


def append_compose(H1, H2):
    """``(H1 ∨ 0) ∪ (0 ∨ H2)`` on ``R^{n1+n2}``; both levels must be positive."""
    for H in (H1, H2):
        if H.claimed_tau <= 0:
            raise HypothesisError(
                f"append composition needs tau > 0, got {H.claimed_tau}")
    n1, n2 = H1.n, H2.n
    V = np.zeros((len(H1) + len(H2), n1 + n2))
    V[:len(H1), :n1] = H1.vectors
    V[len(H1):, n1:] = H2.vectors
    prov = Provenance("append", {}, (H1.provenance, H2.provenance))
    return HittingSet(n1 + n2, V, append_tau(H1.claimed_tau, H2.claimed_tau),
                      prov, H1.certified and H2.certified)


def split_dims(n):
    """``(n1, n2, n3)`` with ``n1 = ceil(ln n)``, ``n2 = n // n1``,
    ``n3 = n - n1*n2``."""
    n1 = max(1, math.ceil(math.log(n)))
    n2 = n // n1
    return n1, n2, n - n1 * n2


def _compose_split(n, base, budget, what):
    n1, n2, n3 = split_dims(n)
    head = base(n1)
    tail = None
    if n3 == 1:
        tail = build_classical(1, "pm_basis")
    elif n3 > 1:
        tail = base(n3)
    check_budget(n2 * len(head) + (len(tail) if tail else 0), budget, what)
    head = kron_compose(head, n2)
    return head if tail is None else append_compose(head, tail)


def build_h4(n, budget=DEFAULT_BUDGET):
    """Kronecker/append composition of ternary sets on ``ceil(ln n)`` blocks."""
    n = _check_int("n", n, 2)

    def base(k):
        return build_classical(1, "pm_basis") if k == 1 else build_h2(k, budget)

    H = _compose_split(n, base, budget, f"h4(n={n})")
    prov = Provenance("h4", {"n": n}, (H.provenance,))
    return HittingSet(n, H.vectors, H.claimed_tau, prov, True)


def h5_tau(n, alpha, beta):
    _, n2, _ = split_dims(n)
    return h3_tau(alpha, beta) / math.sqrt(n2 + 1)


def build_h5(n, alpha=GOLDEN_ALPHA, beta=GOLDEN_BETA, budget=DEFAULT_BUDGET):
    """Kronecker/append composition of multi-level sets; level
    ``h3_tau / sqrt(n2 + 1)``."""
    n = _check_int("n", n, 2)
    _check_h3_params(alpha, beta)

    def base(k):
        return build_h3(k, alpha, beta, budget)

    H = _compose_split(n, base, budget, f"h5(n={n})")
    prov = Provenance("h5", {"n": n, "alpha": alpha, "beta": beta}, (H.provenance,))
    return HittingSet(n, H.vectors, h5_tau(n, alpha, beta), prov, True)


# -- provenance ------------------------------------------------------------------

def tau_from_provenance(prov):
    """Recompute the covering level a provenance record guarantees."""
    p = prov.params
    kind = prov.kind
    if kind == "grid":
        return grid_tau(p["n"], p["m"])
    if kind == "random":
        return math.nan
    if kind == "h2":
        return h2_tau(p["n"])
    if kind == "h3":
        return h3_tau(p["alpha"], p["beta"])
    if kind == "h4":
        return tau_from_provenance(prov.children[0])
    if kind == "h5":
        return h5_tau(p["n"], p["alpha"], p["beta"])
    if kind in ("simplex", "pm_basis", "antipodal", "singleton"):
        return build_classical(p["n"], kind).claimed_tau
    if kind == "kron":
        return kron_tau(tau_from_provenance(prov.children[0]), p["n2"])
    if kind == "append":
        return append_tau(*(tau_from_provenance(c) for c in prov.children))
    raise ParameterError(f"cannot derive tau for provenance kind {kind!r}")


def build(kind, n, m=None, alpha=GOLDEN_ALPHA, beta=GOLDEN_BETA, count=None,
          seed=0, budget=DEFAULT_BUDGET):
    """Dispatch to a builder by name (used by the CLI and spec strings)."""
    if kind == "grid":
        if m is None:
            raise ParameterError("grid needs m")
        return build_grid(n, m, budget)
    if kind == "random":
        if count is None:
            raise ParameterError("random needs count")
        return build_random(n, count, seed, budget)
    if kind == "h2":
        return build_h2(n, budget)
    if kind == "h3":
        return build_h3(n, alpha, beta, budget)
    if kind == "h4":
        return build_h4(n, budget)
    if kind == "h5":
        return build_h5(n, alpha, beta, budget)
    if kind in ("simplex", "pm_basis", "antipodal", "singleton"):
        return build_classical(n, kind)
    raise ParameterError(f"unknown hitting-set kind {kind!r}")


def from_spec(spec, n, seed=0, budget=DEFAULT_BUDGET):
    """Build from a compact spec string such as ``h5``, ``random:60``,
    ``grid:25`` or ``h3:4.236:5.236``."""
    parts = spec.split(":")
    kind = parts[0]
    if kind == "random":
        count = int(parts[1]) if len(parts) > 1 else 60
        return build_random(n, count, seed, budget)
    if kind == "grid":
        return build_grid(n, int(parts[1]), budget)
    if kind in ("h3", "h5") and len(parts) == 3:
        return build(kind, n, alpha=float(parts[1]), beta=float(parts[2]),
                     budget=budget)
    return build(kind, n, budget=budget)


__all__ = [
    "BudgetError", "GOLDEN_ALPHA", "GOLDEN_BETA", "append_compose",
    "append_tau", "build", "build_classical", "build_grid", "build_h2",
    "build_h3", "build_h4", "build_h5", "build_random", "from_spec",
    "grid_cardinality", "grid_tau", "h2_tau", "h3_formulas", "h3_levels",
    "h3_raw_count", "h3_tau", "h3_witness", "h5_tau", "kron_compose",
    "kron_tau", "sample_sphere", "split_dims", "tau_from_provenance",
]

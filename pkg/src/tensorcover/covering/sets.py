"""The HittingSet value type, its provenance record and text format."""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import BudgetError, ParameterError, ShapeError

DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class Provenance:
    """How a hitting set was built: a construction kind, its parameters and
    the provenance of any child sets it was composed from."""

    kind: str
    params: dict = field(default_factory=dict)
    children: tuple = ()

    def to_dict(self):
        out = {"kind": self.kind}
        if self.params:
            out["params"] = dict(self.params)
        if self.children:
            out["children"] = [c.to_dict() for c in self.children]
        return out

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], dict(d.get("params", {})),
                   tuple(cls.from_dict(c) for c in d.get("children", ())))

    def __str__(self):
        return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=True)

    @classmethod
    def parse(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class HittingSet:
    """A finite set of unit vectors whose caps at level ``claimed_tau`` cover
    the unit sphere in ``R^n``.

    ``certified`` is true when ``claimed_tau`` follows from a deterministic
    covering theorem; randomized sets carry ``claimed_tau = nan`` and
    ``certified = False``.
    """

    n: int
    vectors: np.ndarray
    claimed_tau: float
    provenance: Provenance
    certified: bool

    def __post_init__(self):
        V = np.array(self.vectors, dtype=np.float64)
        if V.ndim != 2 or V.shape[0] < 1 or V.shape[1] != self.n:
            raise ShapeError(
                f"vectors must be a non-empty (m, {self.n}) array, got {V.shape}")
        norms = np.linalg.norm(V, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise ParameterError("hitting-set vectors must be unit length")
        V /= norms[:, None]
        V.setflags(write=False)
        object.__setattr__(self, "vectors", V)
        object.__setattr__(self, "claimed_tau", float(self.claimed_tau))

    def __len__(self):
        return self.vectors.shape[0]

    @property
    def cardinality(self):
        return self.vectors.shape[0]

    @property
    def kind(self):
        return self.provenance.kind

    def __repr__(self):
        return (f"HittingSet(kind={self.kind!r}, n={self.n}, m={len(self)}, "
                f"claimed_tau={self.claimed_tau:.6g}, certified={self.certified})")


def dedup_rows(V, decimals=12):
    """Drop rows equal after rounding to ``decimals``; first occurrence wins."""
    key = np.round(V, decimals) + 0.0  # folds -0.0 into 0.0
    _, idx = np.unique(key, axis=0, return_index=True)
    return V[np.sort(idx)]


def normalize_rows(Z):
    Z = np.asarray(Z, dtype=np.float64)
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def check_budget(count, budget, what):
    if budget is not None and count > budget:
        raise BudgetError(
            f"{what} would hold {count} vectors, above the budget of {budget}")


# -- text format --------------------------------------------------------------

def format_hitting_set(H):
    header = (f"{H.n} {len(H)} {H.claimed_tau!r} {int(H.certified)} "
              f"{H.provenance}")
    lines = [header]
    for v in H.vectors:
        lines.append(" ".join(f"{x:.17e}" for x in v))
    return "\n".join(lines) + "\n"


def parse_hitting_set(text):
    rows = text.strip().splitlines()
    if not rows:
        raise ShapeError("empty hitting-set file")
    head = rows[0].split(None, 4)
    if len(head) < 4:
        raise ShapeError(f"malformed hitting-set header: {rows[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
        tau = float(head[2])
        certified = head[3].lower() in ("1", "true")
        prov = Provenance.parse(head[4]) if len(head) > 4 else Provenance("file")
        V = np.array([[float(t) for t in r.split()] for r in rows[1:]])
    except ValueError as exc:
        raise ShapeError(f"malformed hitting-set file: {exc}") from None
    if V.shape != (m, n):
        raise ShapeError(f"header says {m}x{n} vectors, file holds {V.shape}")
    if math.isnan(tau):
        certified = False
    return HittingSet(n, V, tau, prov, certified)


def save_hitting_set(path, H):
    with open(path, "w") as fh:
        fh.write(format_hitting_set(H))


def load_hitting_set(path):
    with open(path) as fh:
        return parse_hitting_set(fh.read())


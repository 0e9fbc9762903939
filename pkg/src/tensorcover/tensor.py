"""Dense tensors and multilinear-form algebra.

Tensors are plain ``numpy.ndarray`` objects of order 1 to 6 stored in
row-major (C) order. A *mode assignment* is a sequence with one entry per
mode holding either a vector or :data:`HOLE`; contracting all concrete
entries leaves a vector (one hole) or a matrix (two holes).
"""

import numpy as np

from .exceptions import ParameterError, ShapeError

HOLE = None

MAX_ORDER = 6


def check_tensor(T, min_order=1, max_order=MAX_ORDER, name="tensor"):
    """Validate and return ``T`` as a finite float64 array."""
    T = np.asarray(T, dtype=np.float64)
    if T.ndim < min_order or T.ndim > max_order:
        raise ShapeError(
            f"{name} must have order in [{min_order}, {max_order}], got {T.ndim}")
    if 0 in T.shape:
        raise ShapeError(f"{name} has an empty mode: shape {T.shape}")
    if not np.all(np.isfinite(T)):
        raise ShapeError(f"{name} has non-finite entries")
    return T


def _check_vector(x, dim, mode):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != dim:
        raise ShapeError(
            f"mode {mode + 1}: expected a vector of length {dim}, "
            f"got shape {x.shape}")
    return x


def outer(*xs):
    """Outer product ``x1 ⊗ x2 ⊗ ... ⊗ xd``."""
    out = np.asarray(xs[0], dtype=np.float64)
    for x in xs[1:]:
        out = np.multiply.outer(out, np.asarray(x, dtype=np.float64))
    return out


def multilinear_form(T, xs):
    """Evaluate ``T(x1, ..., xd) = <T, x1 ⊗ ... ⊗ xd>``.

    Raises
    ------
    ShapeError
        If the number of vectors differs from the order of ``T`` or a vector
        length does not match its mode.
    """
    T = np.asarray(T, dtype=np.float64)
    if len(xs) != T.ndim:
        raise ShapeError(f"expected {T.ndim} vectors, got {len(xs)}")
    xs = [_check_vector(x, n, k) for k, (x, n) in enumerate(zip(xs, T.shape))]
    out = T
    # contract the last mode first so the remaining axes keep their positions
    for x in reversed(xs):
        out = out @ x
    return float(out)


def partial_contract(T, assign):
    """Contract every concrete mode of ``assign`` against ``T``.

    ``assign`` has one entry per mode; entries equal to :data:`HOLE` are left
    open. One hole gives the vector ``T(•, x2, ..., xd)``, two holes give a
    matrix whose axes follow the hole order.
    """
    T = np.asarray(T, dtype=np.float64)
    if len(assign) != T.ndim:
        raise ShapeError(f"expected {T.ndim} mode entries, got {len(assign)}")
    holes = [k for k, a in enumerate(assign) if a is HOLE]
    if not holes:
        raise ParameterError(
            "assignment has no holes; use multilinear_form instead")
    if len(holes) > 2:
        raise ParameterError(
            f"at most two holes are supported, got {len(holes)}")
    out = T
    for k in reversed(range(T.ndim)):
        if assign[k] is HOLE:
            continue
        x = _check_vector(assign[k], T.shape[k], k)
        out = np.tensordot(out, x, axes=([k], [0]))
    return out


def frobenius_inner(A, B):
    """Frobenius inner product of two tensors of identical shape."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape != B.shape:
        raise ShapeError(f"shape mismatch: {A.shape} vs {B.shape}")
    return float(np.dot(A.ravel(), B.ravel()))


def frobenius_norm(A):
    return float(np.sqrt(frobenius_inner(A, A)))


def unfold(T, mode):
    """Mode-``mode`` flattening: rows indexed by that mode, row-major columns."""
    T = np.asarray(T, dtype=np.float64)
    return np.moveaxis(T, mode, 0).reshape(T.shape[mode], -1)


def is_symmetric(T, tol=1e-10):
    """Return ``(symmetric, max_deviation)`` over all index permutations."""
    from itertools import permutations

    T = np.asarray(T, dtype=np.float64)
    if len(set(T.shape)) > 1:
        return False, float("inf")
    dev = 0.0
    for perm in permutations(range(T.ndim)):
        dev = max(dev, float(np.max(np.abs(T - np.transpose(T, perm)))))
    return dev <= tol, dev


def symmetrize(T):
    """Average ``T`` over all index permutations."""
    from itertools import permutations

    T = np.asarray(T, dtype=np.float64)
    perms = list(permutations(range(T.ndim)))
    return sum(np.transpose(T, p) for p in perms) / len(perms)


# -- text format --------------------------------------------------------------

def format_tensor(T):
    """Serialize to text: ``d n1 ... nd`` then row-major values, 17 digits."""
    T = np.asarray(T, dtype=np.float64)
    lines = [" ".join([str(T.ndim)] + [str(n) for n in T.shape])]
    flat = T.ravel()
    width = T.shape[-1]
    for start in range(0, flat.size, width):
        lines.append(" ".join(f"{v:.17e}" for v in flat[start:start + width]))
    return "\n".join(lines) + "\n"


def parse_tensor(text):
    tokens = text.split()
    if not tokens:
        raise ShapeError("empty tensor file")
    try:
        d = int(tokens[0])
        shape = tuple(int(t) for t in tokens[1:1 + d])
        values = np.array([float(t) for t in tokens[1 + d:]])
    except ValueError as exc:
        raise ShapeError(f"malformed tensor file: {exc}") from None
    if len(shape) != d or any(n < 1 for n in shape):
        raise ShapeError(f"bad tensor header: order {d}, shape {shape}")
    if values.size != int(np.prod(shape)):
        raise ShapeError(
            f"tensor file has {values.size} values, shape {shape} needs "
            f"{int(np.prod(shape))}")
    return check_tensor(values.reshape(shape))


def save_tensor(path, T):
    with open(path, "w") as fh:
        fh.write(format_tensor(T))


def load_tensor(path):
    with open(path) as fh:
        return parse_tensor(fh.read())

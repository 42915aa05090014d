"""Brute-force reference math for small RBM instances.

Everything here is dense, exact, and slow by design; it serves as ground
truth for the hardware-style modules.
"""

import numpy as np

from .bits import ensure_bits
from .errors import DimensionError

# Enumeration cap: 2**20 joint states is the largest table kept exact.
MAX_EXACT_NODES = 20


class DenseRbm:
    """Plain real-valued RBM: weight matrix plus per-side bias vectors."""

    def __init__(self, weights, visible_bias=None, hidden_bias=None):
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 2:
            raise DimensionError(f"weights must be a matrix, got shape {w.shape}")
        self.weights = w
        self.n_visible, self.n_hidden = w.shape
        self.visible_bias = self._bias(visible_bias, self.n_visible, "visible bias")
        self.hidden_bias = self._bias(hidden_bias, self.n_hidden, "hidden bias")
        if not (np.isfinite(self.weights).all()
                and np.isfinite(self.visible_bias).all()
                and np.isfinite(self.hidden_bias).all()):
            raise ValueError("RBM parameters must be finite")

    @staticmethod
    def _bias(values, length, name):
        if values is None:
            return np.zeros(length, dtype=np.float64)
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (length,):
            raise DimensionError(f"{name} must have shape ({length},), got {arr.shape}")
        return arr

    @classmethod
    def from_grid(cls, grid):
        """Snapshot a quantized synapse grid into real-valued parameters."""
        return cls(grid.weights(), grid.visible_bias(), grid.hidden_bias())


def energy(rbm, v, h):
    """Joint energy of one (visible, hidden) configuration."""
    v = ensure_bits(v, rbm.n_visible, "visible state")
    h = ensure_bits(h, rbm.n_hidden, "hidden state")
    vf = v.astype(np.float64)
    hf = h.astype(np.float64)
    return float(-(rbm.visible_bias @ vf) - (rbm.hidden_bias @ hf)
                 - vf @ rbm.weights @ hf)


def joint_index(v, h, n_visible):
    """Flat state index: visible bits are the low bits, hidden bits the high."""
    v = ensure_bits(v)
    h = ensure_bits(h)
    iv = int(v @ (1 << np.arange(v.size, dtype=np.int64)))
    ih = int(h @ (1 << np.arange(h.size, dtype=np.int64)))
    return iv + (ih << n_visible)


def _all_patterns(width):
    codes = np.arange(1 << width, dtype=np.int64)
    return ((codes[:, None] >> np.arange(width)) & 1).astype(np.float64)


def exact_distribution(rbm):
    """Boltzmann distribution over all joint states, by full enumeration.

    Index layout follows joint_index: state = int(v) + int(h) << n_visible
    with bit k of each register at integer bit k.
    """
    total = rbm.n_visible + rbm.n_hidden
    if total > MAX_EXACT_NODES:
        raise ValueError(
            f"exact enumeration limited to {MAX_EXACT_NODES} total nodes, got {total}")
    vs = _all_patterns(rbm.n_visible)
    hs = _all_patterns(rbm.n_hidden)
    neg_energy = (vs @ rbm.visible_bias)[:, None] + (hs @ rbm.hidden_bias)[None, :]
    neg_energy = neg_energy + vs @ rbm.weights @ hs.T
    # Subtract the max before exponentiating so the partition sum never overflows.
    table = np.exp(neg_energy - neg_energy.max())
    flat = table.T.ravel()
    return flat / flat.sum()


def tv_distance(p, q):
    """Total-variation distance between two discrete distributions."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DimensionError(f"distributions differ in shape: {p.shape} vs {q.shape}")
    return 0.5 * float(np.abs(p - q).sum())


def gibbs_joint_counts(array, sweeps, rng, start=None):
    """Visit counts of (v, h) joint states along an alternating Gibbs chain.

    Each sweep samples h given v then v given h through the array; the
    recorded pair (v, h) is one draw from the chain whose stationary law
    is the Boltzmann distribution.  Index layout matches joint_index.
    """
    n_v, n_h = array.n_visible, array.n_hidden
    if n_v + n_h > MAX_EXACT_NODES:
        raise ValueError(
            f"joint-state counting limited to {MAX_EXACT_NODES} total nodes")
    counts = np.zeros(1 << (n_v + n_h), dtype=np.int64)
    v = np.zeros(n_v, dtype=np.uint8) if start is None else ensure_bits(start, n_v)
    pow_v = 1 << np.arange(n_v, dtype=np.int64)
    pow_h = 1 << np.arange(n_h, dtype=np.int64)
    for _ in range(sweeps):
        h = array.forward(v, rng)
        counts[int(v @ pow_v) + (int(h @ pow_h) << n_v)] += 1
        v = array.backward(h, rng)
    return counts


def cd_delta(v, h, v_bar, h_bar, eta):
    """Single-step contrastive-divergence weight change.

    Entries are eta * (v_i h_j - v_bar_i h_bar_j), so each lies in
    {-eta, 0, +eta} for binary states.
    """
    v = ensure_bits(v)
    h = ensure_bits(h)
    v_bar = ensure_bits(v_bar, v.size, "reconstructed visible state")
    h_bar = ensure_bits(h_bar, h.size, "reconstructed hidden state")
    positive = np.outer(v, h).astype(np.float64)
    negative = np.outer(v_bar, h_bar).astype(np.float64)
    return eta * (positive - negative)

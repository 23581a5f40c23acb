"""Floating-point oracles.  Nothing here is used to certify a result."""
from __future__ import annotations

import numpy as np

TOL = 1e-9


def as_array(gram) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in gram], dtype=float)


def eigen_psd(gram, tol: float = TOL) -> bool:
    """Eigenvalue PSD test: every eigenvalue at least -tol."""
    a = as_array(gram)
    if a.size == 0:
        return True
    return bool(np.linalg.eigvalsh(a).min() >= -tol)


def float_rank(gram, tol: float = TOL) -> int:
    a = as_array(gram)
    if a.size == 0:
        return 0
    return int((np.linalg.eigvalsh(a) > tol).sum())


def _projector(gram: np.ndarray, span: np.ndarray) -> np.ndarray:
    """Coordinate projector onto span (columns) for the form ``gram``."""
    if span.shape[1] == 0:
        return np.zeros_like(gram)
    s = span.T @ gram @ span
    return span @ np.linalg.pinv(s, rcond=1e-12) @ span.T @ gram


def alternating_projections(gram, v, a, b, rounds: int = 20):
    """Float iterates of P_B P_A; returns the list of norms ||x_n||."""
    g = as_array(gram)
    v = np.array([float(x) for x in v])
    pa = _projector(g, np.array([[float(x) for x in col] for col in a]).T)
    pb = _projector(g, np.array([[float(x) for x in col] for col in b]).T)
    norms = [float(np.sqrt(max(v @ g @ v, 0.0)))]
    x = v
    for _ in range(rounds):
        x = pb @ (pa @ x)
        norms.append(float(np.sqrt(max(x @ g @ x, 0.0))))
    return norms


def principal_cos2(gram, a, b) -> float:
    """Squared cosine of the smallest nonzero principal angle between two lines."""
    g = as_array(gram)
    u = np.array([float(x) for x in a])
    w = np.array([float(x) for x in b])
    return float((u @ g @ w) ** 2 / ((u @ g @ u) * (w @ g @ w)))

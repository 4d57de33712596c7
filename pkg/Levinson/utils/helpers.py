# Levinson/utils/helpers.py

import os
import tempfile
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from Levinson.core.potential import Potential
from Levinson.core.radial import Channel
from Levinson.exception import ConfigurationError, DomainError


def geometric_grid(low, high, points):
    """
    Log-spaced energy grid.

    Args:
        low (float): Smallest energy, > 0.
        high (float): Largest energy, > low.
        points (int): Number of grid points, at least 3.

    Returns:
        np.ndarray: Increasing energies from low to high.
    """
    if not 0 < low < high or points < 3:
        raise DomainError(f"Bad energy grid request: low={low}, high={high}, points={points}")
    return np.geomspace(low, high, points)


def box_grid(ch: Channel, L: float, points: int) -> Tuple[np.ndarray, float]:
    """
    Radial nodes of the finite-difference box [0, L].

    The n = 1 even channel uses a cell-centred grid (Neumann at the origin),
    every other channel a vertex grid with Dirichlet conditions at both ends.
    """
    if not L > 0 or points < 2:
        raise ConfigurationError(f"Box needs L > 0 and at least 2 points, got L={L}, points={points}")
    if ch.n == 1 and ch.l == 0:
        h = L / (points + 0.5)
        return (np.arange(points) + 0.5) * h, h
    h = L / (points + 1)
    return np.arange(1, points + 1) * h, h


def channel_box(
    V: Optional[Potential],
    ch: Channel,
    L: float,
    points: int,
    coupling: float = 1.0,
    shift: float = 0.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Tridiagonal matrix of -d^2/dr^2 + (mu^2 - 1/4)/r^2 + coupling * V + shift.

    Args:
        V (Potential or None): Potential; None for the free operator.
        ch (Channel): Partial-wave channel.
        L (float): Box length.
        points (int): Interior nodes.
        coupling (float): Factor t in front of V.
        shift (float): Constant added to the diagonal.

    Returns:
        tuple: (diagonal, off-diagonal) arrays.
    """
    r, h = box_grid(ch, L, points)
    diag = np.full(points, 2.0 / h ** 2) + ch.centrifugal / r ** 2 + shift
    if ch.n == 1 and ch.l == 0:
        diag[0] = 1.0 / h ** 2 + shift
    if V is not None and coupling != 0.0:
        diag = diag + coupling * V.evaluate(r)
    off = np.full(points - 1, -1.0 / h ** 2)
    return diag, off


def box_eigenvalues(V, ch, L, points, coupling=1.0, shift=0.0):
    """All eigenvalues of the channel box matrix, ascending."""
    diag, off = channel_box(V, ch, L, points, coupling, shift)
    return eigvalsh_tridiagonal(diag, off)


def atomic_write(path, content, mode="w"):
    """
    Write a file in one step: write to a sibling temp file, then rename.

    Args:
        path (str): Target path.
        content (str or bytes): File contents.
        mode (str): "w" for text, "wb" for bytes.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_")
    try:
        with os.fdopen(fd, mode) as f:
            f.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise

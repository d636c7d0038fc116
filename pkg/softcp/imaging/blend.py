# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------

"""
blend: Composite a lesion patch into a background.

soft_paste evaluates I_syn = I_soft + (1 - S) * I_g inside the translated patch window.
Hard paste is soft_paste with a binary S, the gaussian baseline softens the binary mask
with a normalized Gaussian, and poisson_paste solves the discrete Poisson equation with
the patch Laplacian as guidance and the background as Dirichlet boundary.
"""

import math
from dataclasses import dataclass

import numpy as np
from knack.log import get_logger
from scipy import ndimage, sparse
from scipy.sparse.linalg import cg

from softcp._constants import POISSON_DEFAULT_MAX_ITERATIONS, POISSON_DEFAULT_TOLERANCE
from softcp.common.shared import BlendModeType

logger = get_logger(__name__)

_NEIGHBORS_4 = ((-1, 0), (1, 0), (0, -1), (0, 1))


class PoissonConvergenceError(ArithmeticError):
    def __init__(self, residual, iterations):
        super(PoissonConvergenceError, self).__init__(
            'Poisson solve did not converge within {} iterations (residual {:.3g})'.format(iterations, residual))
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class PasteOffset(object):
    """Background coordinates of the patch's top-left corner."""
    row: int
    col: int

    def to_dict(self):
        return {'row': self.row, 'col': self.col}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d['row']), int(d['col']))


@dataclass(frozen=True)
class BlendMode(object):
    mode: BlendModeType = BlendModeType.soft
    sigma: float = 2.0
    tolerance: float = POISSON_DEFAULT_TOLERANCE
    max_iterations: int = POISSON_DEFAULT_MAX_ITERATIONS

    def __post_init__(self):
        object.__setattr__(self, 'mode', BlendModeType(self.mode))
        if self.sigma <= 0:
            raise ValueError('Gaussian sigma must be > 0, got {}'.format(self.sigma))
        if self.tolerance <= 0:
            raise ValueError('Poisson tolerance must be > 0, got {}'.format(self.tolerance))
        if self.max_iterations < 1:
            raise ValueError('Poisson max_iterations must be >= 1')

    def to_dict(self):
        result = {'mode': self.mode.value}
        if self.mode is BlendModeType.gaussian:
            result['sigma'] = self.sigma
        elif self.mode is BlendModeType.poisson:
            result['tolerance'] = self.tolerance
            result['max_iterations'] = self.max_iterations
        return result

    @classmethod
    def from_dict(cls, d):
        return cls(mode=d.get('mode', BlendModeType.soft.value),
                   sigma=float(d.get('sigma', 2.0)),
                   tolerance=float(d.get('tolerance', POISSON_DEFAULT_TOLERANCE)),
                   max_iterations=int(d.get('max_iterations', POISSON_DEFAULT_MAX_ITERATIONS)))


def paste_window(patch_shape, background_shape, at):
    """Slices of the background covered by a patch at offset; raises if it overflows."""
    h, w = patch_shape[:2]
    bh, bw = background_shape[:2]
    if at.row < 0 or at.col < 0 or at.row + h > bh or at.col + w > bw:
        raise ValueError('Patch {}x{} at ({}, {}) overflows background {}x{}'.format(
            h, w, at.row, at.col, bh, bw))
    return slice(at.row, at.row + h), slice(at.col, at.col + w)


def _check_channels(patch, background):
    if patch.shape[2] != background.shape[2]:
        raise ValueError('Channel mismatch: patch has {}, background has {}'.format(
            patch.shape[2], background.shape[2]))


def soft_copy(patch, soft):
    """I_soft = S * patch, broadcasting the single-channel mask across channels."""
    soft = np.asarray(soft, dtype=np.float64)
    if patch.shape[:2] != soft.shape:
        raise ValueError('Patch {} and soft-mask {} differ in size'.format(patch.shape[:2], soft.shape))
    return patch * soft[:, :, np.newaxis]


def soft_paste(i_soft, soft, background, at):
    """
    Soft-Paste a soft-copied patch into a background.

    Args:
        i_soft (np.ndarray): soft-copied patch (h, w, C).
        soft (np.ndarray): soft-mask (h, w) used for the copy.
        background (np.ndarray): image plane (H, W, C).
        at (PasteOffset): patch top-left in background coordinates.

    Returns:
        composite (np.ndarray): new image plane; background outside the window.
    """
    soft = np.asarray(soft, dtype=np.float64)
    if i_soft.shape[:2] != soft.shape:
        raise ValueError('Patch {} and soft-mask {} differ in size'.format(i_soft.shape[:2], soft.shape))
    _check_channels(i_soft, background)
    rows, cols = paste_window(soft.shape, background.shape, at)

    composite = background.copy()
    composite[rows, cols] = i_soft + (1.0 - soft)[:, :, np.newaxis] * background[rows, cols]
    return np.clip(composite, 0.0, 1.0, out=composite)


def merge_labels(m_p, lesion_class, m_g, at):
    """Pasted lesion pixels take lesion_class; every other pixel keeps its m_g label."""
    m_p = np.asarray(m_p, dtype=bool)
    rows, cols = paste_window(m_p.shape, m_g.shape, at)
    merged = m_g.copy()
    window = merged[rows, cols]
    window[m_p] = lesion_class
    return merged


def gaussian_mask(mask, sigma):
    """Binary mask convolved with a normalized Gaussian of radius ceil(3 sigma), replicate padding."""
    if sigma <= 0:
        raise ValueError('Gaussian sigma must be > 0, got {}'.format(sigma))
    radius = int(math.ceil(3.0 * sigma))
    blurred = ndimage.gaussian_filter(np.asarray(mask, dtype=np.float64), sigma=sigma,
                                      mode='nearest', radius=radius)
    return np.clip(blurred, 0.0, 1.0, out=blurred)


def _patch_laplacian(patch):
    padded = np.pad(patch, ((1, 1), (1, 1), (0, 0)), mode='edge')
    return (4.0 * patch - padded[:-2, 1:-1] - padded[2:, 1:-1]
            - padded[1:-1, :-2] - padded[1:-1, 2:])


# pylint: disable=too-many-locals
def poisson_paste(patch, omega, background, at,
                  tol=POISSON_DEFAULT_TOLERANCE, max_iter=POISSON_DEFAULT_MAX_ITERATIONS):
    """
    Gradient-domain paste (seamless cloning with patch-only guidance).

    For every pixel x of omega: 4 f(x) - sum f(N4(x)) = 4 g(x) - sum g(N4(x)), with g the
    patch (edge replicated past its own border) and f fixed to the background outside omega.
    Solved per channel by conjugate gradients down to an absolute residual <= tol.

    Args:
        patch (np.ndarray): image plane (h, w, C) supplying the guidance field.
        omega (np.ndarray): binary mask (h, w) of unknown pixels.
        background (np.ndarray): image plane (H, W, C).
        at (PasteOffset): patch top-left in background coordinates.
        tol (float): residual norm bound.
        max_iter (int): conjugate gradient iteration cap.

    Returns:
        composite (np.ndarray): new image plane clamped to [0, 1].
    """
    if tol <= 0:
        raise ValueError('Poisson tolerance must be > 0, got {}'.format(tol))
    omega = np.asarray(omega, dtype=bool)
    if patch.shape[:2] != omega.shape:
        raise ValueError('Patch {} and omega {} differ in size'.format(patch.shape[:2], omega.shape))
    _check_channels(patch, background)
    rows, cols = paste_window(omega.shape, background.shape, at)

    composite = background.copy()
    if not omega.any():
        return composite

    height, width = background.shape[:2]
    region = np.zeros((height, width), dtype=bool)
    region[rows, cols] = omega
    if region[0].any() or region[-1].any() or region[:, 0].any() or region[:, -1].any():
        raise ValueError('Poisson region touches the background border at offset ({}, {})'.format(at.row, at.col))

    ys, xs = np.nonzero(region)
    count = ys.size
    index = np.full((height, width), -1, dtype=np.intp)
    index[ys, xs] = np.arange(count)

    rhs = _patch_laplacian(patch)[ys - at.row, xs - at.col]
    entry_rows = [np.arange(count)]
    entry_cols = [np.arange(count)]
    entries = [np.full(count, 4.0)]
    for dy, dx in _NEIGHBORS_4:
        ny, nx = ys + dy, xs + dx
        neighbor = index[ny, nx]
        inside = neighbor >= 0
        entry_rows.append(np.nonzero(inside)[0])
        entry_cols.append(neighbor[inside])
        entries.append(np.full(int(inside.sum()), -1.0))
        rhs[~inside] += background[ny[~inside], nx[~inside]]

    system = sparse.csr_matrix(
        (np.concatenate(entries), (np.concatenate(entry_rows), np.concatenate(entry_cols))),
        shape=(count, count))

    for channel in range(background.shape[2]):
        b = rhs[:, channel]
        solution, info = cg(system, b, x0=background[ys, xs, channel], rtol=0.0, atol=tol, maxiter=max_iter)
        residual = float(np.linalg.norm(b - system @ solution))
        if info != 0 and residual > tol:
            raise PoissonConvergenceError(residual, max_iter)
        logger.debug('Poisson channel %s solved: %s unknowns, residual %.3g', channel, count, residual)
        composite[ys, xs, channel] = solution

    return np.clip(composite, 0.0, 1.0, out=composite)

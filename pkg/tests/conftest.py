"""Shared builders for the test suite."""

import numpy as np
import pytest
import scipy.linalg as sla

from linfnorm.problems import descriptor_tf
from linfnorm.reduced import ReducedModel
from linfnorm.structured import MatrixFactor, ScalarTerm, StructuredTF


def random_descriptor(n, m, p, seed, min_decay=0.1, max_decay=2.0, im_max=8.0):
    """Random stable state-space system with controlled pole locations.

    Eigenvalues are placed directly (real parts in [-max_decay, -min_decay],
    imaginary parts in [0, im_max] as conjugate pairs) and hidden behind an
    orthogonal similarity, so a bracketing frequency interval is known
    exactly.  Returns (tf, (omega_lo, omega_hi)).
    """
    rng = np.random.default_rng(seed)
    nb = n // 2
    re = -rng.uniform(min_decay, max_decay, nb)
    im = rng.uniform(0.0, im_max, nb)
    blocks = [np.array([[a, b], [-b, a]]) for a, b in zip(re, im)]
    if n % 2:
        blocks.append(np.array([[-rng.uniform(min_decay, max_decay)]]))
    a = sla.block_diag(*blocks)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    a = q @ a @ q.T
    b = rng.standard_normal((n, m))
    c = rng.standard_normal((p, n))
    wmax = float(im.max()) if nb else 1.0
    return descriptor_tf(np.eye(n), a, b, c), (0.0, 1.5 * wmax + 1.0)


def random_rational_reduced(dim, m, p, seed, **kwargs):
    """A small random rational model wrapped as a ReducedModel."""
    tf, interval = random_descriptor(dim, m, p, seed, **kwargs)
    rm = ReducedModel(tf=tf, dim=dim, provenance=[], parent_is_real=True)
    return rm, interval


def siso_one_pole():
    """H(s) = 1/(s+1)."""
    return descriptor_tf(np.array([[1.0]]), np.array([[-1.0]]),
                         np.array([[1.0]]), np.array([[1.0]]))


def siso_two_pole():
    """H(s) = 1/(s+1) + 1/(s+2), peak 1.5 at omega = 0."""
    return descriptor_tf(np.eye(2), np.diag([-1.0, -2.0]),
                         np.array([[1.0], [1.0]]), np.array([[1.0, 1.0]]))


def as_reduced(tf, provenance=(), parent_is_real=True):
    return ReducedModel(tf=tf, dim=tf.n, provenance=list(provenance),
                        parent_is_real=parent_is_real)


def constant_factor(mat):
    return MatrixFactor([(ScalarTerm(), np.atleast_2d(np.asarray(mat, dtype=float)))])


@pytest.fixture
def one_pole():
    return siso_one_pole()


@pytest.fixture
def two_pole():
    return siso_two_pole()

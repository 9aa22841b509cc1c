"""Shared fixtures and random instance generators."""

import numpy as np
import pytest

from reflectode.sysfun import ReflectionSystem


def random_system(rng, n, g_scale=0.4):
    """``F = Id``, small ``G``, entries of ``A``, ``B`` in ``[-2, 2]``."""
    F = np.eye(n)
    G = rng.uniform(-1, 1, (n, n))
    G *= g_scale / max(np.linalg.norm(G, 2), 1e-12) * rng.uniform(0.2, 1.0)
    A = rng.uniform(-2, 2, (n, n))
    B = rng.uniform(-2, 2, (n, n))
    return ReflectionSystem(F, G, A, B)


def random_polynomial_of(rng, M, degree=2):
    n = M.shape[0]
    out = np.zeros((n, n))
    P = np.eye(n)
    for _ in range(degree + 1):
        out += rng.uniform(-1, 1) * P
        P = P @ M
    return out


def commuting_system(rng, n):
    """System whose matrices are all polynomials in one random matrix, so
    that ``M+`` and ``M-`` commute."""
    W = rng.uniform(-1, 1, (n, n)) / np.sqrt(n)
    F = np.eye(n)
    G = 0.2 * random_polynomial_of(rng, W, 1)
    A = random_polynomial_of(rng, W)
    B = random_polynomial_of(rng, W)
    return ReflectionSystem(F, G, A, B)


def central_diff(f, t, h=1e-5):
    return (f(t + h) - f(t - h)) / (2 * h)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def example_415(beta, gamma):
    """``u' = beta v(-t)``, ``v' = gamma u(-t)``."""
    z = np.zeros((2, 2))
    return ReflectionSystem(np.eye(2), z, z, np.array([[0.0, -beta], [-gamma, 0.0]]))


def example_61(beta, gamma):
    """``u' = beta^2 v(-t)``, ``v' = gamma^2 u(-t)``."""
    z = np.zeros((2, 2))
    return ReflectionSystem(np.eye(2), z, z, np.array([[0.0, -beta**2], [-gamma**2, 0.0]]))


def first_example():
    """``u'(t) = -v(t)``, ``v'(-t) = -u(-t)``; ``X = [[cosh, -sinh], [-sinh, cosh]]``."""
    F = np.array([[1.0, 0.0], [0.0, 0.0]])
    G = np.array([[0.0, 0.0], [0.0, 1.0]])
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    B = np.array([[0.0, 0.0], [1.0, 0.0]])
    return ReflectionSystem(F, G, A, B)

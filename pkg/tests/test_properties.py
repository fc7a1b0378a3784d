"""Randomised (seeded) invariant sweeps across the supported domain.

Complements the value-based tests: every spec drawn here must satisfy the
structural contracts (normalisation, recurrence, defining equation, dual
energy routes, Hermiticity) regardless of where it lands.
"""

import cmath
import math

import numpy as np

from ratosc.coherent import CoherentSpec, coefficients, density, eigen_residual
from ratosc.observables import energy_expectation, moment_matrices, uncertainty
from ratosc.system import StateLabel, ladder_element, lowest_weights, wavefunction

RNG = np.random.default_rng(20260808)


def _random_specs(count):
    specs = []
    for _ in range(count):
        m = int(RNG.choice([0, 2, 4, 6, 8]))
        mu = int(RNG.choice(lowest_weights(m)))
        variant = str(RNG.choice(["nonlinear", "linearized"]))
        if variant == "nonlinear" and m > 0:
            az = 10.0 ** RNG.uniform(-2.0, 6.0)
        else:
            # rung weights are Poisson with mean |z|^2/2 here, so keep the
            # truncation depth (and the m = 0 state index) moderate
            az = RNG.uniform(0.0, 6.0)
        phase = RNG.uniform(0.0, 2.0 * math.pi)
        specs.append(CoherentSpec(variant, m, mu, az * cmath.exp(1j * phase)))
    return specs


def test_random_specs_satisfy_structural_contracts():
    tail_tol = 1e-14
    for spec in _random_specs(40):
        c = coefficients(spec, tail_tol)

        total = c.norm_sq()
        assert 1.0 - c.tail_mass - 1e-12 <= total <= 1.0 + 1e-12

        if spec.variant == "nonlinear":
            for k in range(c.K):
                elem = ladder_element(spec.m, spec.mu + (spec.m + 1) * (k + 1))
                defect = abs(elem * c.entries[k + 1] - spec.z * c.entries[k])
                assert defect <= 1e-12 * max(abs(spec.z * c.entries[k]), 1e-300)
            resid = eigen_residual(spec, tail_tol)
            assert resid <= max(1.0, spec.abs_z) * (tail_tol + 1e-10)

        closed = energy_expectation(spec, "closed_form")
        direct = energy_expectation(spec, "direct", tail_tol)
        assert abs(closed - direct) <= 1e-8 * max(abs(closed), 1.0)


def test_random_density_matches_wavefunction_superposition():
    for spec in _random_specs(8):
        c = coefficients(spec)
        if c.K > 40:
            continue  # keep the scalar cross-check cheap
        for x in RNG.uniform(-4.0, 4.0, 3):
            amplitude = sum(
                c.entries[k] * wavefunction(StateLabel(spec.m, spec.mu, k), float(x))
                for k in range(c.K + 1))
            assert abs(density(spec, float(x)) - abs(amplitude) ** 2) <= 1e-12


def test_random_moment_matrices_are_hermitian():
    for _ in range(3):
        m = int(RNG.choice([0, 2, 6]))
        mu = int(RNG.choice(lowest_weights(m)))
        K = int(RNG.integers(2, 9))
        mats = moment_matrices(m, mu, K)
        assert np.max(np.abs(mats.mx - mats.mx.T)) < 1e-9
        assert np.max(np.abs(mats.mx2 - mats.mx2.T)) < 1e-9
        assert np.max(np.abs(mats.mp2 - mats.mp2.T)) < 1e-9
        assert np.max(np.abs(mats.mp - np.conj(mats.mp.T))) < 1e-9
        assert np.max(np.abs(np.diag(mats.mp))) < 1e-12


def test_random_uncertainty_floor():
    for _ in range(10):
        m = int(RNG.choice([2, 4, 6]))
        mu = int(RNG.choice(lowest_weights(m)))
        variant = str(RNG.choice(["nonlinear", "linearized"]))
        z = complex(RNG.uniform(-2, 2), RNG.uniform(-2, 2))
        t = float(RNG.uniform(0.0, 1.0))
        result = uncertainty(CoherentSpec(variant, m, mu, z), t)
        assert result.product >= 0.5 - 1e-9

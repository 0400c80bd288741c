"""Reduced 1-D transmission problems: rays, dispersion function, gap
eigenvalues.  The electrostatic shell at xi' = 0 has the closed-form bound
state E = m (4 - eta^2) / (4 + eta^2), used as an analytic anchor."""

import math

import numpy as np
import pytest

from diracshell.clifford import ALPHA, ALPHA0, I4
from diracshell.shell_symbol import Frame, InteractionMatrix
from diracshell.spectra import SpectrumSet
from diracshell.transmission1d import (
    GapEdgeError,
    bound_state_trace,
    decaying_basis,
    dispersion_curve,
    dispersion_det,
    dispersion_det_raw,
    essential_rays,
    gap_eigenvalues,
    raw_column_selection,
    reduced_symbol,
)

INF = math.inf
EL = InteractionMatrix.electrostatic_lorentz
DP = InteractionMatrix.diagonal_pair
FREE = InteractionMatrix.zero()


def electrostatic_bound_energy(eta: float, m: float) -> float:
    return m * (4 - eta * eta) / (4 + eta * eta)


def test_essential_rays_examples():
    assert essential_rays(reduced_symbol(FREE, (0, 0), 1.0)) == \
        SpectrumSet([(-INF, -1.0), (1.0, INF)])
    assert essential_rays(reduced_symbol(FREE, (3, 4), 0.0, 2.0)) == \
        SpectrumSet([(-INF, -3.0), (7.0, INF)])
    assert essential_rays(reduced_symbol(FREE, (0, 0), 0.0)) == \
        SpectrumSet([(-INF, INF)])


def test_dispersion_rejects_outside_gap():
    sym = reduced_symbol(FREE, (1, 0), 1.0)
    with pytest.raises(GapEdgeError):
        dispersion_det(sym, 2.0)
    with pytest.raises(GapEdgeError):
        dispersion_det(sym, sym.gap_halfwidth)


def test_free_dispersion_profile_and_no_zeros():
    # orthonormalized free determinant is 1 - (E/g)^2: >= 0.5 on the middle
    # band |E| <= g/sqrt(2), positive on the whole open gap, -> 0 at edges
    sym = reduced_symbol(FREE, (1, 0), 1.0)
    g = sym.gap_halfwidth
    for frac in np.linspace(-0.999, 0.999, 101):
        val = abs(dispersion_det(sym, float(frac * g)))
        assert abs(val - (1.0 - frac * frac)) < 1e-10
        assert val > 0.0
        if abs(frac) <= 1.0 / math.sqrt(2.0):
            assert val >= 0.5 - 1e-12
    assert gap_eigenvalues(sym) == []


def test_decay_ansatz_square_identity():
    sym = reduced_symbol(EL(1.0, 0.0), (0.5, 0.0), 1.0)
    g = sym.gap_halfwidth
    for e in (-0.9, 0.1, 0.67):
        lam = e - sym.phi
        kappa = math.sqrt(g * g - lam * lam)
        for sign in (+1, -1):
            m_mat = (sym.xi[0] * ALPHA[0] + sym.xi[1] * ALPHA[1]
                     + sign * 1j * kappa * ALPHA[2] + sym.m * ALPHA0)
            assert np.max(np.abs(m_mat @ m_mat - lam * lam * np.asarray(I4))) < 1e-12


def test_electrostatic_analytic_bound_state():
    for eta, m in ((1.0, 1.0), (0.5, 1.0), (1.0, 0.5)):
        sym = reduced_symbol(EL(eta, 0.0), (0.0, 0.0), m)
        evs = gap_eigenvalues(sym)
        assert len(evs) == 1
        assert evs[0].energy == pytest.approx(electrostatic_bound_energy(eta, m),
                                              abs=1e-8)
        assert evs[0].multiplicity == 2
        assert evs[0].min_singular_value < 1e-8


def test_phi_shift_moves_eigenvalues_rigidly():
    base = gap_eigenvalues(reduced_symbol(EL(1.0, 0.0), (0.5, 0.0), 1.0, 0.0))
    shifted = gap_eigenvalues(reduced_symbol(EL(1.0, 0.0), (0.5, 0.0), 1.0, 0.25))
    assert len(base) == len(shifted) == 1
    assert shifted[0].energy - base[0].energy == pytest.approx(0.25, abs=1e-8)


def test_rotational_covariance_pairwise():
    for gam in (EL(1.0, 0.0), DP(0.6, 0.3), EL(0.0, 1.0)):
        for c in (0.5, 1.0):
            a = [e.energy for e in gap_eigenvalues(reduced_symbol(gam, (c, 0.0), 1.0))]
            b = [e.energy for e in gap_eigenvalues(reduced_symbol(gam, (0.0, c), 1.0))]
            assert len(a) == len(b)
            for x, y in zip(a, b):
                assert abs(x - y) < 1e-8


def test_eigenvalues_inside_gap_postcondition():
    for gam in (EL(1.0, 0.0), EL(0.0, 1.0), DP(0.5, 0.0)):
        for xi in (0.0, 0.5, 2.0):
            sym = reduced_symbol(gam, (xi, 0.0), 1.0)
            for ev in gap_eigenvalues(sym):
                assert abs(ev.energy - sym.phi) < sym.gap_halfwidth


def test_bound_state_transmission_and_ode_residual():
    sym = reduced_symbol(EL(1.0, 0.0), (0.5, 0.0), 1.0)
    ev = gap_eigenvalues(sym)[0]
    u_plus, u_minus, kappa = bound_state_trace(sym, ev.energy)
    # transmission condition at the interface
    res = np.linalg.norm(sym.a_plus @ u_plus + sym.a_minus @ u_minus)
    assert res < 1e-8
    # ODE residual of u(z) = u_pm e^(-/+ kappa z) on a test grid: both traces
    # must lie in the kernels of (M_-/+ - lam I)
    lam = ev.energy - sym.phi
    for side, u0 in ((+1, u_plus), (-1, u_minus)):
        m_mat = (sym.xi[0] * ALPHA[0] + sym.xi[1] * ALPHA[1]
                 - side * 1j * kappa * ALPHA[2] + sym.m * ALPHA0)
        for z in np.linspace(0.1, 3.0, 7):
            uz = u0 * math.exp(-kappa * z)
            assert np.linalg.norm(m_mat @ uz - lam * uz) < 1e-8


def test_raw_dispersion_is_holomorphic():
    # FD derivative along the real axis matches the complex-step derivative;
    # the orthonormalized determinant would fail this (norms are not
    # holomorphic), the fixed-column raw determinant must pass.
    sym = reduced_symbol(EL(1.0, 0.0), (0.5, 0.0), 1.0)
    for e0 in (-0.4, 0.1, 0.55):
        sel = raw_column_selection(sym, e0)

        def f(e):
            return dispersion_det_raw(sym, e, sel)

        d = 1e-6
        fd = (f(e0 + d) - f(e0 - d)) / (2 * d)
        h = 1e-8
        cs = (f(complex(e0, h)) - f(e0)) / complex(0, h)
        scale = max(1.0, abs(fd))
        assert abs(fd - cs) < 1e-6 * scale


def test_raw_and_orthonormal_dets_share_zeros():
    sym = reduced_symbol(EL(1.0, 0.0), (0.5, 0.0), 1.0)
    e_star = gap_eigenvalues(sym)[0].energy
    sel = raw_column_selection(sym, e_star)
    assert abs(dispersion_det_raw(sym, e_star, sel)) < 1e-7
    assert abs(dispersion_det(sym, e_star)) < 1e-7


def test_decaying_basis_orthonormal():
    sym = reduced_symbol(DP(0.6, 0.3), (0.5, 0.0), 1.0)
    for side in (+1, -1):
        w = decaying_basis(sym, 0.2, side)
        assert np.max(np.abs(w.conj().T @ w - np.eye(2))) < 1e-12


def test_dispersion_curve_free_empty_and_monotone():
    rows = dispersion_curve(FREE, 1.0, 0.0, [0.0, 0.5, 1.0], n_scan=128)
    assert [x for x, _ in rows] == [0.0, 0.5, 1.0]
    assert all(es == () for _, es in rows)


def test_dispersion_curve_el_matches_pointwise():
    rows = dispersion_curve(EL(1.0, 0.0), 1.0, 0.0, [0.0, 0.5])
    assert rows[0][1][0] == pytest.approx(0.6, abs=1e-8)
    direct = gap_eigenvalues(reduced_symbol(EL(1.0, 0.0), (0.5, 0.0), 1.0))
    assert rows[1][1][0] == pytest.approx(direct[0].energy, abs=1e-10)
    for x, es in rows:
        g = math.sqrt(x * x + 1.0)
        for e in es:
            assert abs(e) < g


def test_dispersion_curve_validation():
    with pytest.raises(ValueError):
        dispersion_curve(FREE, 1.0, 0.0, [])
    with pytest.raises(ValueError):
        dispersion_curve(FREE, 1.0, 0.0, [-0.5])


def test_gap_eigenvalues_validation():
    sym = reduced_symbol(FREE, (1, 0), 1.0)
    with pytest.raises(ValueError):
        gap_eigenvalues(sym, n_scan=8)
    with pytest.raises(ValueError):
        gap_eigenvalues(sym, tol=0.0)
    # closed gap: no search space
    assert gap_eigenvalues(reduced_symbol(FREE, (0, 0), 0.0)) == []


def test_general_frame_reduction_matches_standard():
    # the reduction along a tilted normal gives the same eigenvalues for
    # rotation-invariant couplings
    gam = EL(1.0, 0.0)
    nu = np.array([0.6, 0.0, 0.8])
    fr = Frame.from_normal(nu)
    tilted = gap_eigenvalues(reduced_symbol(gam, (0.5, 0.0), 1.0, frame=fr))
    std = gap_eigenvalues(reduced_symbol(gam, (0.5, 0.0), 1.0))
    assert len(tilted) == len(std) == 1
    assert tilted[0].energy == pytest.approx(std[0].energy, abs=1e-8)

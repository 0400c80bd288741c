"""Acceptance suite: one test per release criterion, each printing a
pass/fail line with the measured numbers.  Tolerances are pinned here, not
deferred to calibration."""

import math
import time
from pathlib import Path

import numpy as np

from diracshell.clifford import ALPHA, ALPHA0, I2, I4, anticommutator, dagger
from diracshell.shell_symbol import (
    Frame,
    InteractionMatrix,
    STANDARD_FRAME,
    closed_form_diag_det,
    diag_abs_det,
    h_basis,
    lambda_pm,
    ls_abs_det,
    ls_check_param,
)
from diracshell.spectra import SpectrumSet, free_spectrum
from diracshell.surfaces import Plane, Sphere
from diracshell.transmission1d import gap_eigenvalues, reduced_symbol
from diracshell.fd_oracle import (
    BatteryCase,
    FDGrid,
    auto_half_length,
    gap_eigenvalues_fd,
    load_committed_battery,
)
from diracshell.limitops import (
    ConstantPotential,
    CouplingField,
    PotentialModel,
    RadialSOPotential,
    enumerate_limits,
    essential_spectrum,
)
from diracshell.cli import main

INF = math.inf
EL = InteractionMatrix.electrostatic_lorentz
DP = InteractionMatrix.diagonal_pair
CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def _report(name: str, ok: bool, detail: str):
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_01_algebraic_identity_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    exact_err = 0.0
    for j in range(3):
        for k in range(3):
            lhs = anticommutator(np.asarray(ALPHA[j]), np.asarray(ALPHA[k]))
            exact_err = max(exact_err, float(np.max(np.abs(
                lhs - 2.0 * (j == k) * np.asarray(I4)))))
    gens = [ALPHA0, *ALPHA]
    for a in gens:
        for b in gens:
            lhs = anticommutator(a, b)
            rhs = 2.0 * np.asarray(I4) if a is b else np.zeros((4, 4))
            exact_err = max(exact_err, float(np.max(np.abs(lhs - rhs))))

    tol_err = 0.0
    for _ in range(1000):
        xi = rng.normal(size=2)
        mu = rng.normal()
        rho = math.sqrt(xi @ xi + mu * mu)
        f1 = rng.normal(size=2) + 1j * rng.normal(size=2)
        f2 = rng.normal(size=2) + 1j * rng.normal(size=2)
        # orthogonality of the two flat mode families
        lp0, lm0 = lambda_pm(xi, 0.0, +1), lambda_pm(xi, 0.0, -1)
        tol_err = max(tol_err, float(abs(np.vdot(lm0 @ f2, lp0 @ f1))))
        # square and adjoint-swap of the parameter blocks
        lp, lm = lambda_pm(xi, mu, +1), lambda_pm(xi, mu, -1)
        tol_err = max(tol_err, float(np.max(np.abs(lp @ lp + mu * mu * np.asarray(I2)))))
        tol_err = max(tol_err, float(np.max(np.abs(dagger(lp) - lm))))
        # kernel membership of the h vectors
        hs = h_basis(xi, mu)
        sym_t = xi[0] * ALPHA[0] + xi[1] * ALPHA[1]
        for sign, pair in ((+1, hs[:2]), (-1, hs[2:])):
            op = sym_t + sign * 1j * rho * ALPHA[2] - 1j * mu * np.asarray(I4)
            for h in pair:
                tol_err = max(tol_err, float(np.linalg.norm(op @ h)))
    dt = time.perf_counter() - t0
    ok = exact_err == 0.0 and tol_err <= 1e-12 and dt < 5.0
    _report("criterion-01 identity suite",
            ok, f"exact error {exact_err}, max residual {tol_err:.3e}, {dt:.2f}s")


def test_criterion_02_ls_closed_forms():
    # The two closed-form candidates are compared on the flat (mu = 0)
    # section where they are both decidable; the quartic-margin form is the
    # one the numeric determinant reproduces.  Off that section neither
    # candidate holds; the derived full magnitude does (also checked).
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    quartic_bad = 0
    quadratic_bad = 0
    worst = 0.0
    for _ in range(200):
        g, e = rng.uniform(-2.0, 2.0, size=2)
        xi = rng.normal(size=2)
        val = ls_abs_det(DP(g, e), STANDARD_FRAME, xi, 0.0) ** 2
        forms = closed_form_diag_det(g, e, float(np.hypot(*xi)), 0.0)
        scale = max(1.0, forms.quartic)
        rel_q = abs(val - forms.quartic) / scale
        worst = max(worst, rel_q)
        if rel_q > 1e-9:
            quartic_bad += 1
        if abs(val - forms.quadratic) / max(1.0, forms.quadratic) > 1e-9:
            quadratic_bad += 1
    # zero locus gamma*eps = 1 at 20 boundary points
    locus_max = 0.0
    for _ in range(20):
        g = rng.uniform(0.2, 3.0) * rng.choice([-1.0, 1.0])
        xi = rng.normal(size=2)
        locus_max = max(locus_max,
                        ls_abs_det(DP(g, 1.0 / g), STANDARD_FRAME, xi, 0.0))
    # derived magnitude holds with mu free
    derived_worst = 0.0
    for _ in range(50):
        g, e = rng.uniform(-2.0, 2.0, size=2)
        xi = rng.normal(size=2)
        mu = rng.normal()
        val = ls_abs_det(DP(g, e), STANDARD_FRAME, xi, mu)
        want = diag_abs_det(g, e, float(np.hypot(*xi)), mu)
        derived_worst = max(derived_worst, abs(val - want) / max(1.0, want))
    dt = time.perf_counter() - t0
    matching = "quartic" if quartic_bad == 0 and quadratic_bad > 0 else "ambiguous"
    ok = (matching == "quartic" and locus_max < 1e-9
          and derived_worst < 1e-9 and dt < 5.0)
    _report("criterion-02 closed forms", ok,
            f"matching form: {matching} (max rel {worst:.2e}), zero locus "
            f"max |det| {locus_max:.2e}, derived-form rel {derived_worst:.2e}, "
            f"{dt:.2f}s")


def test_criterion_03_electrostatic_lorentz_grid():
    t0 = time.perf_counter()
    etas = np.linspace(-2.5, 2.5, 21)
    taus = np.linspace(-2.5, 2.5, 21)
    margins = np.array([[abs(et * et - ta * ta - 4.0) for ta in taus]
                        for et in etas])
    off = margins[margins > 0.0]
    assert (margins == 0.0).sum() >= 2          # grid meets the hyperbola
    assert off.min() >= 1e-6                    # classification margin
    mistakes = 0
    for i, et in enumerate(etas):
        for j, ta in enumerate(taus):
            rep = ls_check_param(EL(float(et), float(ta)), STANDARD_FRAME,
                                 n_grid=64)
            expected_pass = margins[i, j] > 0.0
            if rep.passed != expected_pass:
                mistakes += 1
    dt = time.perf_counter() - t0
    ok = mistakes == 0 and dt < 30.0
    _report("criterion-03 electrostatic+Lorentz grid", ok,
            f"21x21 grid, {int((margins == 0.0).sum())} hyperbola points, "
            f"min off-margin {off.min():.4g}, misclassifications {mistakes}, "
            f"{dt:.1f}s")


def test_criterion_04_free_operator_spectrum():
    got = free_spectrum(1, 0)
    want = SpectrumSet([(-INF, -1.0), (1.0, INF)])
    _report("criterion-04 free spectrum", got == want, f"{got}")


def test_criterion_05_slowly_oscillating_rays():
    t0 = time.perf_counter()
    descs = enumerate_limits(Sphere(1.0),
                             PotentialModel(phi=RadialSOPotential(0.0, 1.0)),
                             EL(1.0, 0.0), n_dirs=16)
    res = essential_spectrum(descs, m=2.0, xi_grid=[0.0])
    want = SpectrumSet([(-INF, -1.0), (1.0, INF)])
    dt = time.perf_counter() - t0
    ok = (res.spectrum == want
          and res.spectrum.intervals_within(-1.0, 1.0) == ()
          and res.hull.intervals_within(-1.0, 1.0) == ()
          and dt < 1.0)
    _report("criterion-05 slowly oscillating rays", ok,
            f"{res.spectrum}, gap clean, {dt:.2f}s")


def test_criterion_06_vanishing_coupling_conic():
    field = CouplingField.vanishing(
        lambda smp: EL(math.exp(-np.linalg.norm(smp.point)), 0.0))
    descs = enumerate_limits(Plane(), PotentialModel(phi=ConstantPotential(0.0)),
                             field, n_dirs=8)
    res = essential_spectrum(descs, m=1.0, xi_grid=np.linspace(0.0, 2.0, 5),
                             n_scan=128)
    shell_empty = all(not es for rows in res.shell_curves.values()
                      for _, es in rows)
    want = SpectrumSet([(-INF, -1.0), (1.0, INF)])
    ok = shell_empty and res.spectrum == want and res.spectrum == res.rays
    _report("criterion-06 vanishing coupling", ok,
            f"shell contributions empty: {shell_empty}, {res.spectrum}")


def test_criterion_07_oracle_equivalence_battery():
    t0 = time.perf_counter()
    doc = load_committed_battery()
    assert len(doc["results"]) >= 8
    worst = 0.0
    free_ok = True
    for row in doc["results"]:
        case = BatteryCase.from_jsonable(row["case"])
        sym = case.symbol()
        disp = [e.energy for e in gap_eigenvalues(sym)]
        fd = row["eigenvalues"]
        assert len(disp) == len(fd), (case.label, disp, fd)
        for a, b in zip(sorted(disp), sorted(fd)):
            worst = max(worst, abs(a - b) / max(1e-12, abs(b)))
        if case.p1 == 0.0 and case.p2 == 0.0:
            free_ok = free_ok and disp == [] and fd == []
    # live re-derivation guard on two reduced-size cases
    for label in ("el_1_0_xi05_m1", "dp_06_03_xi05_m1"):
        row = next(r for r in doc["results"] if r["case"]["label"] == label)
        case = BatteryCase.from_jsonable(row["case"])
        sym = case.symbol()
        live = gap_eigenvalues_fd(sym, FDGrid(auto_half_length(sym), 120))
        assert len(live) == len(row["eigenvalues"])
        for a, b in zip(live, row["eigenvalues"]):
            worst = max(worst, abs(a - b) / max(1e-12, abs(b)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-3 and free_ok and dt < 600.0
    _report("criterion-07 oracle battery", ok,
            f"{len(doc['results'])} cases, worst relative gap {worst:.2e}, "
            f"free cases empty: {free_ok}, {dt:.1f}s")


def test_criterion_08_rotational_covariance():
    doc = load_committed_battery()
    worst = 0.0
    for row in doc["results"]:
        case = BatteryCase.from_jsonable(row["case"])
        c = case.xi_norm
        gam = case.interaction()
        a = [e.energy for e in gap_eigenvalues(
            reduced_symbol(gam, (c, 0.0), case.m, case.phi))]
        b = [e.energy for e in gap_eigenvalues(
            reduced_symbol(gam, (0.0, c), case.m, case.phi))]
        assert len(a) == len(b)
        for x, y in zip(a, b):
            worst = max(worst, abs(x - y))
    _report("criterion-08 rotational covariance", worst <= 1e-8,
            f"worst axis-swap deviation {worst:.2e}")


def test_criterion_09_frame_invariance():
    rng = np.random.default_rng(909)
    nu = np.array([0.48, -0.6, 0.64])
    nu /= np.linalg.norm(nu)
    base = Frame.from_normal(nu)
    worst = 0.0
    for gam in (DP(0.7, -0.3), EL(1.2, 0.4)):
        for mu in (0.0, 0.5):
            ref = ls_abs_det(gam, base, (0.6, -0.8), mu)
            for _ in range(20):
                th = rng.uniform(0, 2 * math.pi)
                t1 = math.cos(th) * base.t1 + math.sin(th) * base.t2
                t2 = -math.sin(th) * base.t1 + math.cos(th) * base.t2
                fr = Frame(t1=t1, t2=t2, nu=nu)
                worst = max(worst, abs(ls_abs_det(gam, fr, (0.6, -0.8), mu) - ref))
    _report("criterion-09 frame invariance", worst <= 1e-10,
            f"worst |det| deviation over 20 frames x couplings: {worst:.2e}")


def test_criterion_10_reproducibility(tmp_path):
    worst = []
    for cfg_name in ("sphere_so.toml", "plane_el.toml", "cone_decay.toml"):
        cfg = str(CONFIG_DIR / cfg_name)
        out_a = tmp_path / (cfg_name + ".a")
        out_b = tmp_path / (cfg_name + ".b")
        assert main(["spectrum", cfg, "--out", str(out_a)]) == 0
        assert main(["spectrum", cfg, "--out", str(out_b)]) == 0
        same = ((out_a / "spectrum.json").read_bytes()
                == (out_b / "spectrum.json").read_bytes()
                and (out_a / "dispersion.csv").read_bytes()
                == (out_b / "dispersion.csv").read_bytes())
        worst.append((cfg_name, same))
    ok = all(s for _, s in worst)
    _report("criterion-10 reproducibility", ok,
            ", ".join(f"{n}: {'identical' if s else 'DIFFERS'}" for n, s in worst))

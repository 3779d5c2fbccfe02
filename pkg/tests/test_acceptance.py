"""Acceptance suite: one test per criterion, each printing a PASS line with
the measured margins.  Tolerances are pinned here, not tuned elsewhere."""

import itertools
import math

import numpy as np
import pytest

from driftlab import (
    Domain,
    Grid,
    Spectrum,
    WeightFunction,
    box_spectrum,
    interval_spectrum,
    ou_spectrum,
    product_spectrum,
    sphere_spectrum,
    torus_spectrum,
)
from driftlab.bounds import (
    ConstantsBundle,
    cheng_yang_upper,
    conjecture_check,
    constant_c_general,
    immersed_gap_bound,
    gaussian_soliton_gap,
    hile_protter_check,
    ppw_check,
    product_manifold_gap,
    recursion_audit,
    recursion_constant,
    self_shrinker_c,
    yang_first_check,
    yang_second_check,
)
from driftlab.cli import main as cli_main
from driftlab.model_space import GeometrySpec
from test_bounds import sample_admissible

PI = np.pi


def _gauss_c():
    dom = Domain.box([-6.0, -6.0], [6.0, 6.0])
    grid = Grid.for_domain(dom, 65)
    return constant_c_general(dom, WeightFunction.quadratic(0.25, 2),
                              GeometrySpec.flat(2), grid)


def _catalog(interval_ext, box_ext, gauss_box_ext):
    """(label, spectrum, n, c) members of the verification catalog."""
    torus_c = constant_c_general(
        Domain.flat_torus([2 * PI]), WeightFunction.constant(0.0, 1),
        GeometrySpec(n=1, p=1, mean_curv_sq_max=1.0, pos_vec_sq_range=(1.0, 1.0)),
        Grid.for_domain(Domain.flat_torus([2 * PI]), 64))
    return [
        ("interval_oracle", interval_spectrum(PI, 22), 1, 0.0),
        ("box_oracle", box_spectrum([PI, PI], 22), 2, 0.0),
        ("torus_oracle", torus_spectrum([2 * PI], 22), 1, torus_c),
        ("interval_fd", interval_ext[0], 1, 0.0),
        ("box_fd", box_ext[0], 2, 0.0),
        ("gauss_box_fd", gauss_box_ext[0], 2, _gauss_c()),
    ]


class TestAcceptance:
    def test_criterion_1_solver_vs_oracle(self, interval_ext, box_ext):
        spec, elapsed = interval_ext
        exact = np.array([(j * PI / PI) ** 2 for j in range(1, 11)])
        rel = np.abs(spec.values()[:10] - exact) / exact
        assert np.max(rel) < 1e-4
        assert elapsed < 10.0

        bspec, belapsed = box_ext
        # independent enumeration oracle for the box values
        sums = sorted(i * i + j * j for i in range(1, 12) for j in range(1, 12))[:6]
        brel = np.abs(bspec.values()[:6] - np.array(sums, dtype=float)) / np.array(sums)
        assert np.max(brel) < 5e-4
        assert belapsed < 10.0
        print(f"\nACCEPTANCE 1 PASS: interval rel err {np.max(rel):.2e} "
              f"({elapsed:.1f}s), box rel err {np.max(brel):.2e} ({belapsed:.1f}s)")

    def test_criterion_2_ornstein_uhlenbeck(self, ou_ext):
        spec, elapsed = ou_ext
        err = np.abs(spec.values()[:5] - np.arange(5.0))
        assert np.max(err) < 1e-4
        assert elapsed < 30.0
        print(f"\nACCEPTANCE 2 PASS: truncated OU abs err {np.max(err):.2e} "
              f"({elapsed:.1f}s)")

    def test_criterion_3_cross_route(self, cross_route_pair):
        s1, s2 = cross_route_pair
        rel = np.abs(np.subtract(s1.eigenvalues, s2.eigenvalues)) / np.abs(s1.eigenvalues)
        assert np.max(rel) < 1e-3
        print(f"\nACCEPTANCE 3 PASS: route disagreement {np.max(rel):.2e} "
              f"on first {len(s1)} eigenvalues")

    def test_criterion_4_universal_suite(self, interval_ext, box_ext, gauss_box_ext):
        worst = ("", np.inf)
        for label, s, n, c in _catalog(interval_ext, box_ext, gauss_box_ext):
            for k in range(1, 21):
                for fn in (ppw_check, hile_protter_check, yang_first_check,
                           yang_second_check):
                    chk = fn(s, n, k, c)
                    assert chk.holds, (label, chk)
                    assert chk.verdict in ("holds", "holds_strictly"), (label, chk)
                    if np.isfinite(chk.slack) and chk.slack < worst[1]:
                        worst = (f"{label}/{chk.name}@k={k}", chk.slack)
        print(f"\nACCEPTANCE 4 PASS: 480 universal checks, min slack "
              f"{worst[1]:.3g} at {worst[0]}")

    def test_criterion_5_cheng_yang_machinery(self, interval_ext, box_ext,
                                              gauss_box_ext):
        for label, s, n, c in _catalog(interval_ext, box_ext, gauss_box_ext):
            mu = s.values() + c
            states = {r.state.k: r.state for r in recursion_audit(s, n, c, k_max=20)}
            for k in range(1, 21):
                assert states[k].F_k >= -1e-10, (label, k)
            for k in range(1, 20):
                factor = recursion_constant(n, k) * ((k + 1) / k) ** (4.0 / n)
                assert states[k + 1].F_k <= factor * states[k].F_k + 1e-10, (label, k)
            lam = s.values()
            for k in range(1, 21):
                assert lam[k] <= cheng_yang_upper(lam[0], n, k, c) + 1e-10, (label, k)
        print("\nACCEPTANCE 5 PASS: F_k >= 0, recursion steps, and the "
              "explicit upper bound hold on all 6 catalog spectra")

    def test_criterion_6_gap_bounds(self, interval_ext, box_ext, gauss_box_ext):
        margins = []
        for s, n in ((interval_ext[0], 1), (box_ext[0], 2)):
            bundle = ConstantsBundle.flat(n)
            lam = s.values()
            for k in range(1, 21):
                gap = lam[k] - lam[k - 1]
                bound = immersed_gap_bound(lam[0], bundle, k)
                assert gap <= bound, (n, k)
                margins.append(bound - gap)
        gs = gauss_box_ext[0].values()
        for k in range(1, 21):
            gap = gs[k] - gs[k - 1]
            bound = gaussian_soliton_gap(gs[0], 2, k, min_Xsq=0.0)
            assert gap <= bound, k
            margins.append(bound - gap)
        for n in (2, 3):
            s = sphere_spectrum(n, math.sqrt(n), 52)
            geom = GeometrySpec(n=n, p=1, mean_curv_sq_max=float(n),
                                pos_vec_sq_range=(float(n), float(n)))
            c = self_shrinker_c(geom, n)
            assert c == pytest.approx(0.75 * n)
            bundle = ConstantsBundle(n=n, p=1, c=c)
            lam = s.values()
            for k in range(1, 51):
                gap = lam[k] - lam[k - 1]
                bound = immersed_gap_bound(lam[0], bundle, k)
                assert gap <= bound, (n, k)
                margins.append(bound - gap)
        print(f"\nACCEPTANCE 6 PASS: 140 gap-bound checks, min margin "
              f"{min(margins):.3g}")

    def test_criterion_7_conjecture_report(self, box_ext, gauss_box_ext,
                                           tmp_path, capsys):
        rows = conjecture_check(interval_spectrum(PI, 22), 1, 20)
        for r in rows:
            assert r.holds  # 2k+1 <= 3k for every k >= 1
            assert r.slack >= -1e-10
        reported = 0
        for s, n in ((box_ext[0], 2), (gauss_box_ext[0], 2)):
            out = conjecture_check(s, n, 20)
            assert len(out) == 20
            reported += sum(1 for r in out
                            if r.verdict in ("holds", "holds_strictly", "violated",
                                             "inconclusive"))
        # exit code is unaffected by conjecture verdicts
        import json
        cfg = tmp_path / "conj.json"
        cfg.write_text(json.dumps({"experiments": [{
            "id": "iv", "spectrum": {"kind": "oracle", "name": "interval",
                                     "params": {"length": PI, "k": 22}},
            "geometry": {"n": 1}, "suite": ["conjecture"], "k_max": 20}]}))
        assert cli_main(["conjecture", str(cfg), "iv", "--kmax", "20"]) == 0
        capsys.readouterr()
        print(f"\nACCEPTANCE 7 PASS: interval conjecture holds at every k; "
              f"{reported} box/Gaussian verdicts reported without assertion")

    def test_criterion_8_implication_property(self):
        rng = np.random.default_rng(7)
        accepted = 0
        counterexamples = 0
        while accepted < 1000:
            n = int(rng.integers(1, 5))
            length = int(rng.integers(3, 10))
            mu = sample_admissible(rng, n, length)
            if mu is None:
                continue
            s = Spectrum.from_values(mu)
            ks = range(1, length)
            if not all(yang_first_check(s, n, k).holds for k in ks):
                continue
            accepted += 1
            for k in ks:
                if not (hile_protter_check(s, n, k).holds and ppw_check(s, n, k).holds):
                    counterexamples += 1
        assert accepted == 1000 and counterexamples == 0
        print("\nACCEPTANCE 8 PASS: 1000 admissible sequences, 0 counterexamples")

    def test_criterion_9_product_composition(self):
        left = ou_spectrum(1, 0.5, 20)
        right = sphere_spectrum(1, 1.0, 20)
        got = product_spectrum(left, right, 8).eigenvalues
        brute = tuple(sorted(a + b for a, b in itertools.product(
            left.eigenvalues, right.eigenvalues))[:8])
        assert got == brute
        worst = 0.0
        for m in (1, 2, 3):
            for lam1 in (0.3, 1.0, 4.7):
                for k in (1, 2, 10):
                    got_b = product_manifold_gap(lam1, m, k, 0.0, 0.0)
                    want = 4 * lam1 * math.sqrt((1 + 4 / m) / m) * k ** (1 / m)
                    worst = max(worst, abs(got_b - want) / want)
        assert worst < 1e-14
        print(f"\nACCEPTANCE 9 PASS: product spectrum exact; constant-weight "
              f"specialization matches to {worst:.1e}")

    def test_criterion_10_determinism(self, verify_runs):
        (out1, code1), (out2, code2) = verify_runs
        assert code1 == 0 and code2 == 0
        for name in ("report.json", "report.csv", "plotdata.csv"):
            b1 = (out1 / name).read_bytes()
            b2 = (out2 / name).read_bytes()
            assert b1 == b2, f"{name} differs between runs"
        print("\nACCEPTANCE 10 PASS: repeated verify runs are byte-identical "
              "(exit code 0, zero violations)")

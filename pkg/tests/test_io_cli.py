import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from smale_lab import io
from smale_lab.cli import CriticalPointsReport, parse_path, run
from smale_lab.deform import BlowupProbe, SaturationReport, blowup_probe, circle_saturate
from smale_lab.experiments import ExperimentSummary, SaturationSummary, reverify, saturation_probe, verify
from smale_lab.polycore import Polynomial, from_roots
from smale_lab.rootfind import RootFindReport, all_roots, cluster_multiplicities
from smale_lab.search import SearchConfig, SearchResult, maximize_rho
from smale_lab.smale import RhoReport, rho
from smale_lab.surface import (
    ArcSegment,
    ContinuationTrace,
    Monodromy,
    PathSpec,
    SurfaceAtlas,
    branch_points,
    continue_critical_point,
    lasso,
    monodromy,
)
from tests.helpers import z3_family

Z3_DOC = '{"coeffs":[[0,0],[-1,0],[0,0],[1,0]]}'
FAMILY = json.dumps({"poly": json.loads(Z3_DOC), "moving_root": -1, "anchor": -1 / math.sqrt(3)})

reals = st.floats(allow_nan=False, width=64)
finite = st.floats(allow_nan=False, allow_infinity=False)


def roundtrip(value, tp):
    back = io.loads(io.dumps(value), tp)
    assert back == value
    return back


class TestCodec:
    @given(finite, finite)
    def test_complex_exact(self, a, b):
        z = complex(a, b)
        back = io.loads(io.dumps({"z": z}), dict[str, complex])["z"]
        assert back == z and math.copysign(1, back.real) == math.copysign(1, a)

    def test_nonfinite_complex_rejected(self):
        with pytest.raises(io.DocumentError):
            io.loads("[1, Infinity]", complex)

    @given(reals)
    def test_float_exact(self, x):
        assert io.loads(io.dumps([x]), tuple[float, ...]) == (x,)

    @given(st.lists(st.tuples(finite, finite), min_size=1, max_size=8))
    def test_polynomial_exact(self, pairs):
        p = Polynomial([complex(a, b) for a, b in pairs])
        assert io.loads(io.dumps(p), Polynomial) == p

    def test_roots_document(self):
        p = io.parse_polynomial({"roots": [[1, 0], [-1, 0]]})
        assert p == from_roots([1, -1])
        q = io.parse_polynomial({"roots": [[2, 0]], "leading": [3, 0], "include_origin": False})
        assert q == Polynomial([-6, 3])

    @pytest.mark.parametrize(
        "doc, where",
        [
            ({"coeffs": [[0, 0], [1]]}, "poly.coeffs[1]"),
            ({"coeffs": [], "roots": []}, "poly"),
            ({"roots": [[1, 0]], "include_origin": 1}, "poly.include_origin"),
            ({"coeffs": [[0, 0]], "extra": 1}, "poly"),
            ([1, 2], "poly"),
            ({"roots": [[1, 0]], "leading": [0, 0]}, "poly"),
        ],
    )
    def test_malformed(self, doc, where):
        with pytest.raises(io.DocumentError) as exc:
            io.parse_polynomial(doc)
        assert exc.value.where == where

    def test_json_syntax_position(self):
        with pytest.raises(io.DocumentError) as exc:
            io.loads_document('{"coeffs": [1,', "--poly")
        assert "line 1 column" in str(exc.value)


class TestReportRoundTrip:
    def test_rho(self):
        roundtrip(rho(from_roots([1, 1j, -0.4])), RhoReport)

    def test_critical_points(self):
        rep = all_roots(from_roots([1, 1]))
        roundtrip(CriticalPointsReport(rep, tuple(cluster_multiplicities(rep))), CriticalPointsReport)
        roundtrip(rep, RootFindReport)

    def test_trace(self):
        tr = continue_critical_point(z3_family(), PathSpec.polyline([-1, -2 + 0.5j, -2]))
        roundtrip(tr, ContinuationTrace)

    def test_monodromy_and_atlas(self):
        fam = z3_family()
        roundtrip(monodromy(fam, lasso(-1, -3, 0.05)), Monodromy)
        roundtrip(branch_points(fam), SurfaceAtlas)
        roundtrip(branch_points(fam.__class__(fam.q, fam.fixed_roots, fam.base_u, fam.anchor_zeta, 3)), SurfaceAtlas)

    def test_saturation(self):
        roundtrip(circle_saturate(from_roots([0.3, 0.6j, 0.9])), SaturationReport)

    def test_probe(self):
        roundtrip(blowup_probe(z3_family(), 10.0, 4), BlowupProbe)

    def test_search(self):
        roundtrip(maximize_rho(SearchConfig(3, starts=4)), SearchResult)

    def test_experiments(self):
        roundtrip(verify([3, 4], 200, seed=1), ExperimentSummary)
        roundtrip(saturation_probe([4], 5, seed=1, boundary_samples=90), SaturationSummary)

    def test_infinite_distance(self):
        fam = z3_family()
        from smale_lab.surface import family_from_roots

        tr = continue_critical_point(family_from_roots((), 1.0, 0.5), PathSpec.polyline([1, 2]))
        assert tr.min_branch_distance == math.inf
        roundtrip(tr, ContinuationTrace)


class TestPathParsing:
    def test_polyline(self):
        path = parse_path([-1, [-2, 0.5], -2])
        assert path.start == -1 and path.end == -2 and len(path.segments) == 2

    def test_arc(self):
        path = parse_path([-1, {"center": [-1.1, 0], "radius": 0.1, "from_angle": 0, "to_angle": 0, "turns": 1}, -1])
        assert any(isinstance(s, ArcSegment) for s in path.segments)
        assert abs(path.end - path.start) < 1e-12

    @pytest.mark.parametrize(
        "doc, where",
        [
            ([], "--path"),
            ([-1, "x"], "--path[1]"),
            ([-1, {"center": 0, "radius": 1, "from_angle": 0}], "--path[1]"),
            ([-1, {"center": 0, "radius": -1, "from_angle": 0, "to_angle": 1}], "--path[1].radius"),
            ([-1, {"center": 0, "radius": 1, "from_angle": 0, "to_angle": 1, "turns": 0.5}], "--path[1].turns"),
        ],
    )
    def test_malformed(self, doc, where):
        with pytest.raises(io.DocumentError) as exc:
            parse_path(doc)
        assert exc.value.where == where


class TestCli:
    def invoke(self, capsys, *argv):
        code = run(list(argv))
        out, err = capsys.readouterr()
        return code, out, err

    def test_rho_example(self, capsys):
        code, out, _ = self.invoke(capsys, "rho", "--poly", Z3_DOC)
        assert code == 0
        rep = io.loads(out, RhoReport)
        assert abs(rep.rho - 2 / 3) < 1e-10

    def test_stdin(self, capsys, monkeypatch):
        import io as stdio

        monkeypatch.setattr("sys.stdin", stdio.StringIO(Z3_DOC))
        code, out, _ = self.invoke(capsys, "rho", "--poly", "-")
        assert code == 0 and abs(json.loads(out)["rho"] - 2 / 3) < 1e-10

    def test_verify_example(self, capsys):
        code, out, _ = self.invoke(capsys, "verify", "--degree", "2", "--samples", "1000", "--seed", "7")
        assert code == 0
        s = io.loads(out, ExperimentSummary)
        assert abs(s.rho_min - 0.5) < 1e-10 and abs(s.rho_max - 0.5) < 1e-10 and abs(s.rho_mean - 0.5) < 1e-10
        assert s.violations == () and s.sample_count == 1000

    def test_verify_deterministic(self, capsys, monkeypatch):
        outs = []
        for threads in ("1", "3"):
            monkeypatch.setenv("SMALE_LAB_THREADS", threads)
            code, out, _ = self.invoke(capsys, "verify", "--degree", "3-5", "--samples", "2500", "--seed", "4")
            outs.append(io.loads(out, ExperimentSummary).fingerprint())
        assert outs[0] == outs[1]

    def test_continue_example(self, capsys):
        code, out, _ = self.invoke(capsys, "continue", "--family", FAMILY, "--path", "[-1,-2]")
        assert code == 0
        tr = io.loads(out, ContinuationTrace)
        assert abs(tr.end.zeta + 1.21525) < 1e-5 and abs(tr.f_closed - 1.30382) < 1e-5

    def test_continue_csv(self, capsys, tmp_path):
        target = tmp_path / "trace.csv"
        code, out, _ = self.invoke(capsys, "continue", "--family", FAMILY, "--path", "[-1,-2]",
                                   "--format", "csv", "--out", str(target))
        lines = target.read_text().splitlines()
        assert code == 0 and out == ""
        assert lines[0] == "u_re,u_im,zeta_re,zeta_im,residual"
        assert float(lines[-1].split(",")[2]) == pytest.approx(-1.2152504370215302, abs=1e-12)

    def test_monodromy(self, capsys):
        loop = json.dumps([-1, [0.5 - 0.1, math.sqrt(3) / 2],
                           {"center": [0.5, math.sqrt(3) / 2], "radius": 0.1,
                            "from_angle": math.pi, "to_angle": math.pi, "turns": 1}, -1])
        code, out, _ = self.invoke(capsys, "monodromy", "--family", FAMILY, "--path", loop)
        assert code == 0 and json.loads(out)["permutation"] == [1, 0]

    def test_branch_points(self, capsys):
        code, out, _ = self.invoke(capsys, "branch-points", "--family", FAMILY)
        assert code == 0 and io.loads(out, SurfaceAtlas).sheet_count == 2

    def test_saturate_and_deform(self, capsys):
        doc = '{"roots": [[1, 0], [0.5, 0]]}'
        for cmd in ("saturate", "deform"):
            code, out, _ = self.invoke(capsys, cmd, "--poly", doc, "--samples", "360")
            rep = io.loads(out, SaturationReport)
            assert code == 0 and rep.all_on_circle and abs(rep.rho_trajectory[-1] - 2 / 3) < 1e-9

    def test_uncertified_step_exits_one(self, capsys):
        # a configuration where the best boundary position lowers rho
        doc = json.dumps({"roots": [[-0.96381, -0.26658], [-0.95085, -0.12022], [0.67404, 0.50808]]})
        code, out, _ = self.invoke(capsys, "deform", "--poly", doc, "--moving-root", "0")
        rep = io.loads(out, SaturationReport)
        assert code == 1 and not rep.steps[0].certificate_ok

    def test_search_and_tischler(self, capsys):
        for cmd in ("search", "tischler"):
            code, out, _ = self.invoke(capsys, cmd, "--degree", "3", "--starts", "4")
            assert code == 0 and abs(io.loads(out, SearchResult).best_rho - 2 / 3) < 1e-6

    def test_probe_blowup(self, capsys):
        code, out, _ = self.invoke(capsys, "probe-blowup", "--family", FAMILY, "--radius", "1e4", "--samples", "8")
        assert code == 0 and len(io.loads(out, BlowupProbe).rows) == 8
        code, _, _ = self.invoke(capsys, "probe-blowup", "--family", FAMILY, "--radius", "1")
        assert code == 1

    def test_critical_points(self, capsys):
        code, out, _ = self.invoke(capsys, "critical-points", "--poly", '{"roots": [[1, 0], [1, 0]]}')
        rep = io.loads(out, CriticalPointsReport)
        assert code == 0 and sum(c.multiplicity for c in rep.clusters) == 2

    @pytest.mark.parametrize(
        "argv, fragment",
        [
            (["rho", "--poly", '{"coeffs": [[0,0],[1,"x"]]}'], "--poly.coeffs[1]"),
            (["rho", "--poly", '{"coeffs": [[0,0],'], "--poly line 1"),
            (["rho", "--poly", '{"coeffs": [[1,0],[1,0],[1,0]]}'], "p(0)"),
            (["continue", "--family", FAMILY, "--path", '[-1, {"radius": 1}]'], "--path[1]"),
            (["continue", "--family", '{"poly": 3}', "--path", "[-1,-2]"], "--family.poly"),
            (["verify", "--degree", "5-3"], "--degree"),
        ],
    )
    def test_usage_errors(self, capsys, argv, fragment):
        code, _, err = self.invoke(capsys, *argv)
        assert code == 2 and fragment in err

    def test_argparse_errors(self, capsys):
        assert self.invoke(capsys, "nope")[0] == 2
        assert self.invoke(capsys, "rho")[0] == 2
        assert self.invoke(capsys, "rho", "--poly", Z3_DOC, "--format", "xml")[0] == 2

    def test_violations_reverify(self):
        from smale_lab.experiments import Violation

        # a degree-5 configuration above the bound would be recorded like this
        v = Violation("bound", 3, 0.9, (1 + 0j, -1 + 0j), from_roots([1, -1]))
        assert not reverify(io.loads(io.dumps(v), Violation))

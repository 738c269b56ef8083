import json
import math

import pytest

from anisospec import verify as vf
from anisospec.anisotropy import Euclidean, WeightedLq, Zero
from anisospec.errors import InvalidParams


# ------------------------------------------------------------ config

def test_empty_config_gives_defaults():
    cfgs = vf.parse_config("")
    assert set(cfgs) == set(vf.SUITES)
    assert all(c == vf.Config() for c in cfgs.values())


def test_global_keys_and_suite_overrides():
    cfgs = vf.parse_config("h = 0.05\nseed = 7\n\n[T2]\nh = 0.03\nworkers = 2\n")
    assert cfgs["T5"].h == 0.05 and cfgs["T5"].seed == 7
    assert cfgs["T2"].h == 0.03 and cfgs["T2"].workers == 2 and cfgs["T2"].seed == 7
    assert isinstance(cfgs["T2"].workers, int)


def test_comments_are_ignored():
    assert vf.parse_config("# tolerances\nfem_rel = 0.05\n")["T3"].fem_rel == 0.05


@pytest.mark.parametrize("text", [
    "bogus = 1\n",
    "[T9]\nh = 0.1\n",
    "[T2]\nbogus = 1\n",
    "h = abc\n",
    "h = 0\n",
    "fem_rel = -1\n",
    "workers = 1.5\n",
    "h = nan\n",
    "just a line\n",
])
def test_config_rejections(text):
    with pytest.raises(InvalidParams):
        vf.parse_config(text)


def test_load_config(tmp_path):
    path = tmp_path / "verify.ini"
    path.write_text("restarts = 1\n")
    assert vf.load_config(path)["afk"].restarts == 1


def test_fem_tolerance_rule():
    cfg = vf.Config()
    assert cfg.fem_tol(10.0, 0.0, 2.0) == pytest.approx(0.2)
    assert cfg.fem_tol(10.0, 0.0, 3.0) == pytest.approx(0.3)
    assert cfg.fem_tol(10.0, 1.0, 3.0) == pytest.approx(3.0)


# ------------------------------------------------------------ reports

def _report(cases):
    return vf.VerificationReport("T4", cases)


def test_report_summary_partitions_cases():
    cases = [
        vf._case("a", {}, 1.0, 1.0, 0.0, "close"),
        vf._case("b", {}, 1.0, 2.0, 0.5, "close"),
        vf.Case("c", {}, None, None, 0.0, "error", False, "MeshFailure: x"),
    ]
    rep = _report(cases)
    s = rep.summary
    assert s == {"total": 3, "passed": 1, "failed": 1, "errored": 1}
    assert s["passed"] + s["failed"] + s["errored"] == s["total"]
    assert not rep.passed
    text = rep.to_text()
    assert "PASS  a" in text and "FAIL  b" in text and "ERROR c" in text
    json.dumps(rep.to_dict())


def test_empty_report_does_not_pass():
    assert not _report([]).passed


@pytest.mark.parametrize("kind,expected,observed,tol,ok", [
    ("close", 1.0, 1.05, 0.1, True),
    ("close", 1.0, 1.2, 0.1, False),
    ("le", 1.0, 1.05, 0.1, True),
    ("le", 1.0, 1.2, 0.1, False),
    ("ge", 1.0, 0.95, 0.1, True),
    ("gt", 1.0, 1.0, 0.0, False),
    ("eq", 3, 3, 0.0, True),
])
def test_judging(kind, expected, observed, tol, ok):
    assert vf._case("x", {}, expected, observed, tol, kind).passed is ok


def test_unknown_suite_and_generator():
    with pytest.raises(InvalidParams):
        vf.run_suite("T7")
    with pytest.raises(InvalidParams):
        vf.shape("hexagon")


def test_shape_spec_round_trip():
    s = vf.shape("annulus", "ring", R=0.5, r=0.2, n=64)
    assert s.to_dict() == {"generator": "annulus", "R": 0.5, "n": 64, "r": 0.2}
    assert s.key == "ring"
    assert s.build().holes


def test_corpus_has_twelve_instances():
    assert len(vf.CORPUS) == 12
    assert len({e.spec.key for e in vf.CORPUS}) == 12


def test_normalized_has_unit_norm():
    from anisospec.anisotropy import sup_norm

    assert sup_norm(vf.normalized(WeightedLq(2.0, 4.0, 1.0))) == pytest.approx(1.0)
    assert vf.normalized(Euclidean()) == Euclidean()


def test_wulff_shape_is_convex_and_inscribed():
    from anisospec import geometry as geo

    m = vf.wulff_shape(WeightedLq(4.0, 1.0, 1.0))
    assert geo.is_convex(m)
    assert geo.area(vf._unit_area(m)) == pytest.approx(1.0, rel=1e-9)


# ------------------------------------------------------------ suites

def test_multiplicity_suite_passes():
    rep = vf.suite_theorem_T4_multiplicity()
    assert rep.passed, rep.to_text()
    assert rep.summary["total"] == 7


def test_t5_suite_passes_for_one_exponent():
    rep = vf.suite_theorem_T5(p_list=(2.0,))
    assert rep.passed, rep.to_text()


def test_blowup_suite_passes():
    rep = vf.suite_blowup()
    assert rep.passed, rep.to_text()


def test_blowup_suite_expects_zero_anisotropy_rejection():
    rep = vf.suite_blowup(h_list=(Zero(),), p_list=(2.0,))
    assert rep.passed and rep.cases[0].name.endswith("rejected")


def test_t2_small_matrix():
    rep = vf.suite_theorem_T2(shapes=(vf.shape("rect", "square", a=1.0, b=1.0),),
                              thetas=(0.0, math.pi / 2), p_list=(2.0,), h=0.04)
    assert rep.passed, rep.to_text()
    assert rep.summary["total"] == 4


def test_t2_mesh_failure_becomes_errored_case():
    rep = vf.suite_theorem_T2(shapes=(vf.shape("star", m=10),), thetas=(0.0,), p_list=(2.0,), h=0.02)
    assert rep.summary["errored"] == 1
    assert "MeshFailure" in rep.cases[0].error


def test_t3_suite_on_coarse_mesh():
    cfg = vf.Config(h=0.04, restarts=1)
    rep = vf.suite_theorem_T3(p_list=(2.0,), config=cfg)
    assert rep.passed, rep.to_text()


def test_run_suite_uses_per_suite_config():
    cfgs = vf.parse_config("[T4]\nworkers = 2\n")
    rep = vf.run_suite("T4", cfgs)
    assert rep.suite == "T4" and rep.passed

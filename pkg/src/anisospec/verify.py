"""Verification suites: closed forms against the finite-element solver,
shape inequalities, multiplicity tables, blow-up sequences and Wulff-shape
comparisons.

Every case records the inputs needed to replay it from the command line.
A case that raises is recorded as errored; errored cases never pass.
"""

import configparser
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import geometry as geo
from .anisotropy import (
    Directional,
    Euclidean,
    MaxOf,
    Quadratic,
    Rotated,
    Scaled,
    WeightedLq,
    Zero,
    classify,
    dominating_degenerate,
    polar_body,
    sup_norm,
    unit_ball_poly,
)
from .errors import AnisospecError, InvalidParams, ZeroAnisotropy
from .solver import SolverOptions, solve
from .spectra import (
    blowup_sequence,
    id_min_bound,
    ip_min_bound,
    isodiametric_check,
    lambda_degenerate,
    lambda_min,
    pi_p,
)


# ------------------------------------------------------------------ config

@dataclass(frozen=True)
class Config:
    geometric_tol: float = 1e-6
    curvature_tol: float = 1e-2
    fem_rel_p2: float = 0.02
    fem_rel: float = 0.03
    fem_err_factor: float = 3.0
    strict_factor: float = 5.0
    h: float = 0.02
    seed: int = 0
    restarts: int = 3
    workers: int = 1

    def solver_options(self):
        return SolverOptions(h=self.h, seed=self.seed, restarts=self.restarts)

    def fem_tol(self, expected, err, p):
        rel = self.fem_rel_p2 if p == 2.0 else self.fem_rel
        return max(rel * abs(expected), self.fem_err_factor * err)


SUITES = ("T2", "T3", "T4", "T5", "blowup", "afk")
_GLOBAL = "global"


def _coerce(name, raw):
    kind = {f.name: f.type for f in fields(Config)}[name]
    try:
        value = int(raw) if kind in (int, "int") else float(raw)
    except ValueError:
        raise InvalidParams(f"config key {name!r}: cannot parse {raw!r}") from None
    if not math.isfinite(value) or value < 0 or (name in ("h", "workers", "restarts") and value <= 0):
        raise InvalidParams(f"config key {name!r} out of range: {raw!r}")
    return value


def parse_config(text):
    """Global ``key = value`` lines, optionally followed by ``[suite]`` sections
    overriding keys for one suite.  Returns ``{suite: Config}``.
    """
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    parser.optionxform = str
    try:
        parser.read_string(f"[{_GLOBAL}]\n" + text)
    except configparser.Error as exc:
        raise InvalidParams(f"malformed config: {exc}") from None
    known = {f.name for f in fields(Config)}
    for section in parser.sections():
        if section not in (_GLOBAL, *SUITES):
            raise InvalidParams(f"unknown config section [{section}]; expected one of {SUITES}")
        unknown = set(parser[section]) - known
        if unknown:
            raise InvalidParams(f"unknown config keys {sorted(unknown)} in [{section}]")
    base = Config(**{k: _coerce(k, v) for k, v in parser[_GLOBAL].items()})
    out = {}
    for suite in SUITES:
        over = parser[suite] if parser.has_section(suite) else {}
        out[suite] = replace(base, **{k: _coerce(k, v) for k, v in over.items()})
    return out


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# ------------------------------------------------------------------ reports

@dataclass
class Case:
    name: str
    inputs: dict
    expected: object
    observed: object
    tolerance: float
    kind: str
    passed: bool
    error: str = None


@dataclass
class VerificationReport:
    suite: str
    cases: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def summary(self):
        errored = sum(c.error is not None for c in self.cases)
        passed = sum(c.passed for c in self.cases)
        return {"total": len(self.cases), "passed": passed,
                "failed": len(self.cases) - passed - errored, "errored": errored}

    @property
    def passed(self):
        return bool(self.cases) and all(c.passed for c in self.cases)

    def to_dict(self):
        return {"suite": self.suite, "summary": self.summary, "passed": self.passed,
                "runtime": self.runtime, "cases": [asdict(c) for c in self.cases]}

    def to_text(self):
        lines = [f"suite {self.suite}: {self.summary['passed']}/{self.summary['total']} passed, "
                 f"{self.summary['errored']} errored, {self.runtime:.1f}s"]
        for c in self.cases:
            status = "ERROR" if c.error else ("PASS" if c.passed else "FAIL")
            detail = c.error or f"observed={_fmt(c.observed)} expected={_fmt(c.expected)} tol={_fmt(c.tolerance)}"
            lines.append(f"  {status:5s} {c.name}: {detail}")
        return "\n".join(lines)


def _fmt(x):
    return f"{x:.6g}" if isinstance(x, float) else str(x)


def _judge(kind, expected, observed, tol):
    if kind == "close":
        return abs(observed - expected) <= tol
    if kind == "le":
        return observed <= expected + tol
    if kind == "ge":
        return observed >= expected - tol
    if kind == "gt":
        return observed > expected
    if kind == "eq":
        return observed == expected
    raise InvalidParams(f"unknown case kind {kind!r}")


def _case(name, inputs, expected, observed, tol, kind):
    return Case(name, inputs, expected, observed, tol, kind, bool(_judge(kind, expected, observed, tol)))


def _run(suite, jobs, workers):
    """Run job thunks (each returning a list of Case) in a bounded pool, in order."""
    start = time.perf_counter()

    def guarded(job):
        name, inputs, thunk = job
        try:
            return thunk()
        except (AnisospecError, ArithmeticError, np.linalg.LinAlgError) as exc:
            return [Case(name, inputs, None, None, 0.0, "error", False, f"{type(exc).__name__}: {exc}")]

    with ThreadPoolExecutor(max_workers=max(1, int(workers))) as pool:
        results = list(pool.map(guarded, jobs))
    report = VerificationReport(suite, [c for r in results for c in r])
    report.runtime = time.perf_counter() - start
    return report


# ------------------------------------------------------------------ corpus

@dataclass(frozen=True)
class ShapeSpec:
    """Named generator call; ``build`` produces the membrane."""

    name: str
    params: tuple = ()
    label: str = ""

    def build(self):
        return geo.GENERATORS[self.name](**dict(self.params))

    def to_dict(self):
        return {"generator": self.name, **dict(self.params)}

    @property
    def key(self):
        return self.label or self.name


def shape(name, label="", **params):
    if name not in geo.GENERATORS:
        raise InvalidParams(f"unknown generator {name!r}; expected one of {sorted(geo.GENERATORS)}")
    return ShapeSpec(name, tuple(sorted(params.items())), label)


@dataclass(frozen=True)
class CorpusEntry:
    spec: ShapeSpec
    diameter_equality: bool
    curved: bool


CORPUS = (
    CorpusEntry(shape("rect", "square", a=1.0, b=1.0), True, False),
    CorpusEntry(shape("rect", "rect_1x2", a=1.0, b=2.0), True, False),
    CorpusEntry(shape("rect", "rect_3x4", a=3.0, b=4.0), True, False),
    CorpusEntry(shape("rotated_rect", "rotated_rect", a=1.0, b=0.5, phi=math.pi / 12), True, False),
    CorpusEntry(shape("disk", "disk_2048", r=0.5, n=2048), True, True),
    CorpusEntry(shape("annulus", "annulus_025", R=0.5, r=0.25, n=256), False, True),
    CorpusEntry(shape("annulus", "annulus_040", R=0.5, r=0.4, n=256), False, True),
    CorpusEntry(shape("cropped_disk", "cropped_disk", r=0.5, h=0.3, n=512), True, True),
    CorpusEntry(shape("asterisk", "asterisk_9", m=9, length=1.0, width=0.1), True, False),
    CorpusEntry(shape("star", "star_10", m=10, R=0.5, r=0.15), True, False),
    CorpusEntry(shape("s_chain", "s_chain_1", k=1, n=64), False, True),
    CorpusEntry(shape("s_counterexample", "s_counterexample"), True, False),
)

T2_SHAPES = (
    shape("rect", "square", a=1.0, b=1.0),
    shape("annulus", "annulus_030", R=0.5, r=0.3, n=256),
    shape("rotated_rect", "rotated_rect", a=1.0, b=0.5, phi=math.pi / 12),
    shape("s_chain", "s_chain_1", k=1, n=64),
)
T2_THETAS = (0.0, math.pi / 6, math.pi / 2)
P_LIST = (1.5, 2.0, 3.0)


def normalized(h):
    n = sup_norm(h)
    if n == 0:
        raise ZeroAnisotropy("cannot normalise the zero anisotropy")
    return h if abs(n - 1) <= 1e-15 else Scaled(1 / n, h)


T3_ANISOTROPIES = (
    Euclidean(),
    Directional(1.0, math.pi / 2),
    normalized(WeightedLq(2.0, 1.0, 0.25)),
    normalized(MaxOf((Directional(1.0, 0.0), Directional(1.0, math.pi / 2)))),
    normalized(Quadratic(((1.0, 0.0), (0.0, 0.25)))),
    normalized(WeightedLq(4.0, 1.0, 1.0)),
    normalized(Rotated(0.3, Quadratic(((1.0, 0.2), (0.2, 0.5))))),
)

T4_CASES = (
    (shape("disk", "disk", r=0.5, n=256), {"attainment": 0, "design": "attained"}),
    (shape("cropped_disk", "cropped_disk", r=0.5, h=0.3, n=512), {"attainment": 1}),
    (shape("rect", "rectangle", a=1.0, b=1.0), {"attainment": 2}),
    (shape("asterisk", "asterisk_9", m=9, length=1.0, width=0.1), {"attainment": 9}),
    (shape("star", "star_10", m=10, R=0.5, r=0.15), {"attainment": 0, "extremizers": 10}),
)

BLOWUP_ANISOTROPIES = (Euclidean(), WeightedLq(3.0, 1.0, 1.0))

AFK_ANISOTROPIES = (Euclidean(), Quadratic(((4.0, 0.0), (0.0, 1.0))), WeightedLq(4.0, 1.0, 1.0))
AFK_SHAPES = (
    shape("rect", "square", a=1.0, b=1.0),
    shape("rect", "rect_1x2", a=1.0, b=2.0),
    shape("rotated_rect", "rotated_rect", a=1.0, b=0.5, phi=math.pi / 12),
)


def _as_spec(s):
    return s.spec if isinstance(s, CorpusEntry) else s


# ------------------------------------------------------------------ suites

def suite_theorem_T2(shapes=T2_SHAPES, thetas=T2_THETAS, p_list=P_LIST, h=None, config=None):
    """FEM least level for Directional(1, theta) against c^p lambda_1d(L_theta)."""
    cfg = config or Config()
    if h is not None:
        cfg = replace(cfg, h=float(h))
    if not (shapes and thetas and p_list):
        raise InvalidParams("T2 needs nonempty shapes, thetas and p_list")
    opts = cfg.solver_options()
    jobs = []
    for s in map(_as_spec, shapes):
        for theta in thetas:
            for p in p_list:
                aniso = Directional(1.0, float(theta))
                inputs = {"shape": s.to_dict(), "anisotropy": aniso.to_dict(), "p": float(p), "h": cfg.h}
                name = f"{s.key} theta={float(theta):.6g} p={float(p):g}"

                def thunk(s=s, aniso=aniso, p=float(p), inputs=inputs, name=name):
                    m = s.build()
                    closed = lambda_degenerate(m, aniso, p)
                    fem, _ = solve(m, aniso, p, opts)
                    tol = cfg.fem_tol(closed.value, fem.error_estimate, p)
                    extra = {**inputs, "error_estimate": fem.error_estimate}
                    return [
                        _case(name, extra, closed.value, fem.value, tol, "close"),
                        _case(name + " upper bound", extra, closed.value, fem.value, 1e-9, "ge"),
                    ]

                jobs.append((name, inputs, thunk))
    return _run("T2", jobs, cfg.workers)


def suite_theorem_T3(shapes=(shape("rect", "square", a=1.0, b=1.0),), anisotropies=T3_ANISOTROPIES,
                     p_list=(2.0,), h=None, config=None):
    """Euclidean maximality over unit-norm H, strict gaps for polyhedral H,
    and strict excess over the dominating degenerate minorant for positive H.
    """
    cfg = config or Config()
    if h is not None:
        cfg = replace(cfg, h=float(h))
    for a in anisotropies:
        if abs(sup_norm(a) - 1) > 1e-9:
            raise InvalidParams(f"anisotropy {a!r} is not normalised to sup norm 1")
    opts = cfg.solver_options()
    jobs = []
    for s in map(_as_spec, shapes):
        for p in p_list:
            p = float(p)
            name = f"{s.key} p={p:g}"
            inputs = {"shape": s.to_dict(), "p": p, "h": cfg.h}

            def thunk(s=s, p=p, name=name, inputs=inputs):
                m = s.build()
                ref, _ = solve(m, Euclidean(), p, opts)
                ref_tol = cfg.fem_tol(ref.value, ref.error_estimate, p)
                cases = []
                for a in anisotropies:
                    fem, _ = solve(m, a, p, opts)
                    tol = cfg.fem_tol(fem.value, fem.error_estimate, p)
                    inp = {**inputs, "anisotropy": a.to_dict()}
                    label = f"{name} {type(a).__name__}({_short(a)})"
                    cases.append(_case(label + " <= euclidean", inp, ref.value, fem.value, tol + ref_tol, "le"))
                    if _is_polyhedral(a):
                        gap = ref.value - fem.value
                        cases.append(_case(label + " strict gap", inp, tol + ref_tol, gap, 0.0, "gt"))
                    if classify(a).kind == "positive":
                        closed = lambda_degenerate(m, dominating_degenerate(a), p)
                        margin = cfg.strict_factor * (tol + closed.error_estimate)
                        cases.append(_case(label + " exceeds degenerate minorant", inp,
                                           margin, fem.value - closed.value, 0.0, "gt"))
                return cases

            jobs.append((name, inputs, thunk))
    return _run("T3", jobs, cfg.workers)


def _short(a):
    d = a.to_dict()
    d.pop("kind", None)
    return ",".join(f"{k}={v:.4g}" if isinstance(v, float) else k for k, v in d.items())


def _is_polyhedral(a):
    inner = a.child if isinstance(a, Scaled) else a
    return isinstance(inner, MaxOf) and all(isinstance(c, Directional) for c in inner.children)


def suite_theorem_T4_multiplicity(cases=T4_CASES, config=None):
    """Attainment multiplicities and extremizer counts against a table."""
    cfg = config or Config()
    jobs = []
    for spec, expected in cases:
        spec = _as_spec(spec)
        inputs = {"shape": spec.to_dict()}

        def thunk(spec=spec, expected=expected, inputs=inputs):
            m = spec.build()
            out = []
            if "attainment" in expected:
                out.append(_case(f"{spec.key} attainment multiplicity", inputs, expected["attainment"],
                                 geo.attainment_multiplicity(m), 0.0, "eq"))
            if "extremizers" in expected:
                _, ext = lambda_min(m, 2.0)
                out.append(_case(f"{spec.key} extremizers", inputs, expected["extremizers"],
                                 len(ext.anisotropies), 0.0, "eq"))
            if "design" in expected:
                out.append(_case(f"{spec.key} optimal design", inputs, expected["design"],
                                 geo.has_optimal_design(m), 0.0, "eq"))
            return out

        jobs.append((spec.key, inputs, thunk))
    return _run("T4", jobs, cfg.workers)


def _width_from_level(value, p):
    return pi_p(p) * ((p - 1) / value) ** (1 / p)


def suite_theorem_T5(shapes=CORPUS, p_list=P_LIST, config=None):
    """Diameter and area bounds for the least level and the isodiametric inequality.

    Corpus entries carry the expected equality flag; bare shape specs have it
    recomputed from the width profile.
    """
    cfg = config or Config()
    jobs = []
    for entry in shapes:
        spec = _as_spec(entry)
        inputs = {"shape": spec.to_dict()}

        def thunk(entry=entry, spec=spec, inputs=inputs):
            m = spec.build()
            curved = entry.curved if isinstance(entry, CorpusEntry) else True
            tol = cfg.curvature_tol if curved else cfg.geometric_tol
            if isinstance(entry, CorpusEntry):
                expect_eq = entry.diameter_equality
            else:
                expect_eq = abs(geo.width_profile(m).sup_width - geo.diameter(m)) <= tol * geo.diameter(m)
            convex = geo.is_convex(m)
            out = []
            for p in p_list:
                p = float(p)
                inp = {**inputs, "p": p}
                lhs, rhs, holds, equal = id_min_bound(m, p, tol)
                out.append(_case(f"{spec.key} p={p:g} id-min", inp, rhs, lhs, tol * rhs, "ge"))
                out.append(_case(f"{spec.key} p={p:g} id-min equality", inp, expect_eq, equal, 0.0, "eq"))
                if convex:
                    lhs2, rhs2, _, equal2 = ip_min_bound(m, p, cfg.curvature_tol)
                    out.append(_case(f"{spec.key} p={p:g} ip-min", inp, rhs2, lhs2,
                                     cfg.curvature_tol * rhs2, "le"))
                    out.append(_case(f"{spec.key} p={p:g} ip-min equality", inp,
                                     spec.name == "disk", equal2, 0.0, "eq"))
                    # Both bounds together pin the sup width between the
                    # area-equivalent diameter and the diameter.
                    width = _width_from_level(lhs, p)
                    implied = 2 * math.sqrt(geo.area(m) / math.pi) <= width * (1 + cfg.curvature_tol) \
                        and width <= geo.diameter(m) * (1 + tol)
                    out.append(_case(f"{spec.key} p={p:g} bounds imply isodiametric", inp,
                                     True, bool(implied), 0.0, "eq"))
            a, bound, ok = isodiametric_check(m)
            out.append(_case(f"{spec.key} isodiametric", inputs, bound, a, 1e-12 * bound, "le"))
            return out

        jobs.append((spec.key, inputs, thunk))
    return _run("T5", jobs, cfg.workers)


def suite_blowup(h_list=BLOWUP_ANISOTROPIES, p_list=(2.0, 3.0), k_max=32, config=None):
    """Unit-area rectangles thinning along the dominating direction: bounds
    must increase, grow by 10^3 and scale like k^p."""
    cfg = config or Config()
    if not (isinstance(k_max, int) and k_max >= 8):
        raise InvalidParams("k_max must be an integer >= 8")
    jobs = []
    for a in h_list:
        for p in p_list:
            p = float(p)
            inputs = {"anisotropy": a.to_dict(), "p": p, "k_max": k_max}
            name = f"{type(a).__name__} p={p:g}"

            def thunk(a=a, p=p, inputs=inputs, name=name):
                if isinstance(a, Zero):
                    try:
                        blowup_sequence(a, p, k_max)
                    except ZeroAnisotropy:
                        return [_case(name + " rejected", inputs, True, True, 0.0, "eq")]
                    return [_case(name + " rejected", inputs, True, False, 0.0, "eq")]
                seq = blowup_sequence(a, p, k_max)
                ks = np.array([k for k, _, _ in seq], dtype=float)
                vals = np.array([b.value for _, _, b in seq])
                areas = np.array([ar for _, ar, _ in seq])
                slope = float(np.polyfit(np.log(ks), np.log(vals), 1)[0])
                return [
                    _case(name + " unit area", inputs, 1.0, float(np.max(np.abs(areas - 1)) + 1), 1e-12, "close"),
                    _case(name + " increasing", inputs, True, bool(np.all(np.diff(vals) > 0)), 0.0, "eq"),
                    _case(name + " growth", inputs, 1e3 * vals[0], float(vals[-1]), 0.0, "gt"),
                    _case(name + " exponent", inputs, p, slope, 0.05 * p, "close"),
                ]

            jobs.append((name, inputs, thunk))
    return _run("blowup", jobs, cfg.workers)


def wulff_shape(a, n=128):
    """Polygonal D_H polar (the Wulff shape of H) as a membrane.

    Polar vertices cluster where D_H is flat; vertices closer than half the
    mean spacing to the previous kept one are dropped, which keeps the
    polygon convex and inscribed.
    """
    v = polar_body(unit_ball_poly(a, n)).array
    spacing = 0.5 * np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)) / len(v)
    kept = [v[0]]
    for q in v[1:]:
        if np.linalg.norm(q - kept[-1]) >= spacing and np.linalg.norm(q - kept[0]) >= spacing:
            kept.append(q)
    return geo.Membrane(tuple(map(tuple, np.array(kept).tolist())))


def _unit_area(m):
    return geo.scale_membrane(m, 1 / math.sqrt(geo.area(m)))


def _is_smooth(a):
    if isinstance(a, Euclidean):
        return True
    if isinstance(a, Quadratic):
        return classify(a).kind == "positive"
    if isinstance(a, WeightedLq):
        return 1 < a.q < math.inf and a.wx > 0 and a.wy > 0
    return False


def suite_afk(h_list=AFK_ANISOTROPIES, p_list=(2.0,), h=None, shapes=AFK_SHAPES, config=None):
    """Unit-area membranes against the unit-area Wulff shape of H."""
    cfg = config or Config()
    if h is not None:
        cfg = replace(cfg, h=float(h))
    for a in h_list:
        if not _is_smooth(a):
            raise InvalidParams(f"{a!r} is outside the smooth positive sub-grammar")
    opts = cfg.solver_options()
    jobs = []
    for a in h_list:
        for p in p_list:
            p = float(p)
            inputs = {"anisotropy": a.to_dict(), "p": p, "h": cfg.h}
            name = f"{type(a).__name__}({_short(a)}) p={p:g}"

            def thunk(a=a, p=p, inputs=inputs, name=name):
                wulff = _unit_area(wulff_shape(a))
                ref, _ = solve(wulff, a, p, opts)
                ref_tol = cfg.fem_tol(ref.value, ref.error_estimate, p)
                cases = []
                for s in map(_as_spec, shapes):
                    fem, _ = solve(_unit_area(s.build()), a, p, opts)
                    tol = cfg.fem_tol(fem.value, fem.error_estimate, p) + ref_tol
                    cases.append(_case(f"{name} {s.key} >= wulff", {**inputs, "shape": s.to_dict()},
                                       ref.value, fem.value, tol, "ge"))
                # A finer polygon of the same body is its own optimiser.
                again, _ = solve(_unit_area(wulff_shape(a, 256)), a, p, opts)
                tol = cfg.fem_tol(again.value, again.error_estimate, p) + ref_tol
                cases.append(_case(f"{name} wulff equality", inputs, ref.value, again.value, tol, "close"))
                return cases

            jobs.append((name, inputs, thunk))
    return _run("afk", jobs, cfg.workers)


def run_suite(name, configs=None):
    """Run a suite with its default matrix under the per-suite config."""
    if name not in SUITES:
        raise InvalidParams(f"unknown suite {name!r}; expected one of {SUITES}")
    configs = configs or {s: Config() for s in SUITES}
    cfg = configs[name]
    if name == "T2":
        return suite_theorem_T2(config=cfg)
    if name == "T3":
        return suite_theorem_T3(config=cfg)
    if name == "T4":
        return suite_theorem_T4_multiplicity(config=cfg)
    if name == "T5":
        return suite_theorem_T5(config=cfg)
    if name == "blowup":
        return suite_blowup(config=cfg)
    if name == "afk":
        return suite_afk(config=cfg)
    raise InvalidParams(f"unknown suite {name!r}; expected one of {SUITES}")

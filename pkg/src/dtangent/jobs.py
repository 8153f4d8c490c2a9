"""Job files, report assembly and the golden-file corpus runner.

A job is a YAML mapping::

    variables: [x, y]
    ideal: ["x*y"]
    point: ["0", "0"]
    max_index: 4
    tasks: [all]
    cosection: ["1"]          # optional, one entry per generator
    jets: [["t", "t"]]        # optional, polynomials in t
    sweep: {order: 3, grid: 1, seed: null}
    caps: {generators: 512, seconds: null}

Reports are plain dicts serialized with sorted keys and canonical
polynomial printing, so reruns are byte-identical.
"""
from __future__ import annotations

import difflib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import __version__
from .cone import (
    Extends,
    InvalidCosectionError,
    JET_RING,
    cosection_check,
    curvilinear_obstruction,
    curvilinear_sweep,
    normal_cone,
    obstruction_complex,
    t2_coordinates,
)
from .dga import DEFAULT_GENERATOR_CAP, Budget, InvariantError, ResourceLimitError
from .poly import (
    NotOnLocusError,
    ParseError,
    PointedModel,
    format_rational,
    parse_polynomial,
    parse_rational,
)
from .tangent import all_brackets, check_bracket_axioms, classify, tangent_dims, zariski_tangent

TASKS = ("tangent", "classify", "bracket", "cone", "obstruct", "cosection")
ALL_TASKS = TASKS + ("all",)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2
EXIT_RESOURCE = 3


class JobError(ValueError):
    """Bad job input; carries a 1-based line and column when known."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class SweepSettings:
    order: int = 3
    grid: int = 1
    seed: int | None = None


@dataclass(frozen=True)
class Caps:
    generators: int = DEFAULT_GENERATOR_CAP
    seconds: float | None = None


@dataclass(frozen=True)
class JobSpec:
    model: PointedModel
    tasks: tuple
    max_index: int = 4
    cosection: tuple | None = None
    jets: tuple = ()
    sweep: SweepSettings = field(default_factory=SweepSettings)
    caps: Caps = field(default_factory=Caps)

    def expanded_tasks(self):
        if "all" in self.tasks:
            chosen = [t for t in TASKS if t != "cosection" or self.cosection is not None]
        else:
            chosen = list(self.tasks)
        return [t for t in TASKS if t in chosen]


# parsing


def _node_at(root, *path):
    node = root
    for key in path:
        if isinstance(node, yaml.MappingNode):
            node = next((v for k, v in node.value if k.value == key), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
        else:
            return None
        if node is None:
            return None
    return node


class _Locator:
    def __init__(self, root):
        self.root = root

    def error(self, message, *path, offset=0):
        node = _node_at(self.root, *path) if path else None
        if node is None:
            node = _node_at(self.root, *path[:1]) if path else None
        if node is None:
            return JobError(message)
        mark = node.start_mark
        col = mark.column + 1
        if isinstance(node, yaml.ScalarNode) and node.style in ("'", '"'):
            col += 1
        if isinstance(node, yaml.ScalarNode):
            col += offset
        return JobError(message, mark.line + 1, col)


def _scalar_text(value, what, loc, *path):
    if isinstance(value, bool) or value is None or isinstance(value, (list, dict)):
        raise loc.error(f"{what} must be a string", *path)
    if isinstance(value, float):
        raise loc.error(f"{what}: decimal numbers are not allowed, write a/b", *path)
    return str(value)


def _string_list(data, key, loc, required=True):
    value = data.get(key)
    if value is None:
        if required:
            raise loc.error(f"missing field '{key}'")
        return None
    if not isinstance(value, list):
        raise loc.error(f"field '{key}' must be a list", key)
    return [_scalar_text(v, f"{key} entry {i + 1}", loc, key, i) for i, v in enumerate(value)]


def _poly(text, variables, loc, *path):
    try:
        return parse_polynomial(text, variables)
    except ParseError as exc:
        raise loc.error(str(exc), *path, offset=exc.offset) from None


def _int_field(data, key, default, loc, minimum=None, parent=None):
    path = (parent, key) if parent else (key,)
    value = data.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise loc.error(f"field '{key}' must be an integer", *path)
    if minimum is not None and value < minimum:
        raise loc.error(f"field '{key}' must be at least {minimum}", *path)
    return value


def parse_job(text: str) -> JobSpec:
    """Parse and validate a job document; raises JobError or NotOnLocusError."""
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or str(exc)
        if mark is not None:
            raise JobError(f"syntax error: {problem}", mark.line + 1, mark.column + 1) from None
        raise JobError(f"syntax error: {problem}") from None
    loc = _Locator(root)
    if not isinstance(data, dict):
        raise JobError("job must be a mapping of fields")
    known = {"variables", "ideal", "point", "max_index", "tasks", "cosection", "jets", "sweep", "caps"}
    for key in data:
        if key not in known:
            raise loc.error(f"unknown field '{key}'", key)

    variables = _string_list(data, "variables", loc)
    if not variables:
        raise loc.error("at least one variable is required", "variables")
    for i, v in enumerate(variables):
        if not v.isidentifier():
            raise loc.error(f"variable '{v}' is not an identifier", "variables", i)
    if len(set(variables)) != len(variables):
        raise loc.error("variables must be distinct", "variables")
    variables = tuple(variables)

    ideal = [_poly(s, variables, loc, "ideal", i) for i, s in enumerate(_string_list(data, "ideal", loc))]

    point_text = _string_list(data, "point", loc, required=False)
    if point_text is None:
        point = (0,) * len(variables)
    else:
        if len(point_text) != len(variables):
            raise loc.error(f"point has {len(point_text)} coordinates, expected {len(variables)}", "point")
        point = []
        for i, s in enumerate(point_text):
            try:
                point.append(parse_rational(s))
            except (ParseError, ValueError) as exc:
                raise loc.error(str(exc), "point", i) from None
        point = tuple(point)

    max_index = _int_field(data, "max_index", 4, loc, minimum=1)

    tasks = _string_list(data, "tasks", loc, required=False) or ["all"]
    for i, t in enumerate(tasks):
        if t not in ALL_TASKS:
            raise loc.error(f"unknown task '{t}' (expected one of {', '.join(ALL_TASKS)})", "tasks", i)

    cos_text = _string_list(data, "cosection", loc, required=False)
    cosection = None
    if cos_text is not None:
        if len(cos_text) != len(ideal):
            raise loc.error(f"cosection has {len(cos_text)} components, ideal has {len(ideal)}", "cosection")
        cosection = tuple(_poly(s, variables, loc, "cosection", i) for i, s in enumerate(cos_text))
    if "cosection" in tasks and cosection is None:
        raise loc.error("task 'cosection' needs a 'cosection' field", "tasks")
    if cosection is not None and "cosection" not in tasks and "all" not in tasks:
        raise loc.error("'cosection' given but the cosection task is not requested", "cosection")

    jets = []
    raw_jets = data.get("jets") or []
    if not isinstance(raw_jets, list):
        raise loc.error("field 'jets' must be a list of lists", "jets")
    for i, jet in enumerate(raw_jets):
        if not isinstance(jet, list) or len(jet) != len(variables):
            raise loc.error(f"jet {i + 1} must list {len(variables)} polynomials in t", "jets", i)
        comps = []
        for k, s in enumerate(jet):
            s = _scalar_text(s, f"jet {i + 1} entry {k + 1}", loc, "jets", i, k)
            comps.append(_poly(s, JET_RING, loc, "jets", i, k))
        jets.append(tuple(comps))

    sweep_data = data.get("sweep") or {}
    if not isinstance(sweep_data, dict):
        raise loc.error("field 'sweep' must be a mapping", "sweep")
    sweep = SweepSettings(
        order=_int_field(sweep_data, "order", 3, loc, minimum=2, parent="sweep"),
        grid=_int_field(sweep_data, "grid", 1, loc, minimum=0, parent="sweep"),
        seed=_int_field(sweep_data, "seed", None, loc, parent="sweep"),
    )
    caps_data = data.get("caps") or {}
    if not isinstance(caps_data, dict):
        raise loc.error("field 'caps' must be a mapping", "caps")
    seconds = caps_data.get("seconds")
    if seconds is not None and (isinstance(seconds, bool) or not isinstance(seconds, (int, float)) or seconds <= 0):
        raise loc.error("field 'seconds' must be a positive number", "caps", "seconds")
    caps = Caps(
        generators=_int_field(caps_data, "generators", DEFAULT_GENERATOR_CAP, loc, minimum=1, parent="caps"),
        seconds=seconds,
    )

    model = PointedModel(variables, tuple(ideal), point)
    model.check_on_locus()
    for i, jet in enumerate(jets):
        if tuple(p.constant_term() for p in jet) != model.point:
            raise loc.error(f"jet {i + 1} does not start at the point", "jets", i)
    return JobSpec(model, tuple(tasks), max_index, cosection, tuple(jets), sweep, caps)


def job_dict(job: JobSpec) -> dict:
    """The canonical field tree of a job (also used as the report's input echo)."""
    m = job.model
    out = {
        "variables": list(m.variables),
        "ideal": [str(f) for f in m.generators],
        "point": [format_rational(c) for c in m.point],
        "max_index": job.max_index,
        "tasks": list(job.tasks),
    }
    if job.cosection is not None:
        out["cosection"] = [str(s) for s in job.cosection]
    if job.jets:
        out["jets"] = [[str(p) for p in jet] for jet in job.jets]
    out["sweep"] = {"order": job.sweep.order, "grid": job.sweep.grid, "seed": job.sweep.seed}
    out["caps"] = {"generators": job.caps.generators, "seconds": job.caps.seconds}
    return out


def format_job(job: JobSpec) -> str:
    return yaml.safe_dump(job_dict(job), sort_keys=False, default_flow_style=None, allow_unicode=True)


# running


def _fr(v):
    return [format_rational(c) for c in v]


def _matrix(m):
    return [_fr(row) for row in m]


@dataclass
class Report:
    data: dict
    status: int = EXIT_OK

    def to_json(self):
        return json.dumps(self.data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_text(self):
        return render_text(self.data)


def _jet_order(model, jet):
    """The order n at which the jet is examined: the t-adic valuation of s(jet)."""
    values = [f.substitute(list(jet)) for f in model.generators]
    vals = [min(e[0] for e in v.terms) for v in values if v]
    if vals:
        return max(1, min(vals))
    return max(p.degree() for p in jet) + 1 if any(jet) else 1


def _obstruct_jets(job, table, cx):
    out = []
    basis = table.bases[1] if table is not None and len(table.bases) > 1 else None
    for jet in job.jets:
        n = _jet_order(job.model, jet)
        res = curvilinear_obstruction(job.model, list(jet), n)
        entry = {"jet": [str(p) for p in jet], "order": n}
        if isinstance(res, Extends):
            entry.update(status="extends", corrected_jet=[str(p) for p in res.jet])
        else:
            if not cx.in_kernel_of_delta(res.vector):
                raise InvariantError(f"obstruction class {res.vector} is not in ker delta")
            entry.update(status="obstructed", vector=_fr(res.vector), reduced=_fr(res.reduced))
            if basis is not None:
                coords = t2_coordinates(res.vector, basis, cx)
                body = format_rational(coords[0]) if len(coords) == 1 else "(" + ", ".join(_fr(coords)) + ")"
                entry["small_extension"] = f"{body} ⊗ t^{n}"
        out.append(entry)
    return out


def run_job(job: JobSpec, timing: bool = False) -> Report:
    """Run every requested task; failures of internal checks give status 2, caps give 3."""
    budget = Budget(job.caps.generators, job.caps.seconds)
    results = {}
    data = {
        "tool": {"name": "dtangent", "version": __version__},
        "input": job_dict(job),
        "results": results,
        "errors": [],
    }
    status = EXIT_OK
    tasks = job.expanded_tasks()
    model = job.model
    clock = {}
    try:
        table = None
        need_table = {"tangent", "classify", "bracket", "obstruct"} & set(tasks)
        if need_table:
            start = time.perf_counter()
            N = max(job.max_index, 3) if "classify" in tasks else job.max_index
            table = tangent_dims(model, N, budget)
            table.fiber.check_composites()
            clock["tangent"] = time.perf_counter() - start
        if "tangent" in tasks:
            dims = table.dims[: job.max_index]
            z = zariski_tangent(model)
            if dims[0] != z:
                raise InvariantError(f"dim T^1 = {dims[0]} but the Jacobian kernel has dimension {z}")
            results["tangent"] = {
                "dims": dims,
                "bases": [[_fr(v) for v in b] for b in table.bases[: job.max_index]],
                "zariski_tangent": z,
                "provenance": table.provenance,
            }
        if "classify" in tasks:
            budget.check_time()
            c = classify(model, max(job.max_index, 3), table)
            results["classify"] = {"kind": c.kind, "certificate": c.certificate}
        if "bracket" in tasks:
            budget.check_time()
            brackets = {}
            for (i, j), b in sorted(all_brackets(table).items()):
                if i > j:
                    continue
                entry = {"constants": [[_fr(v) for v in row] for row in b.constants]}
                if table.dims[i + j - 1] == 1:
                    entry["matrix"] = _matrix(b.matrix())
                brackets[f"T{i} x T{j}"] = entry
            problems = check_bracket_axioms(table)
            results["bracket"] = {"tables": brackets, "axioms": "pass" if not problems else problems}
            if problems:
                status = EXIT_INVARIANT
                data["errors"].extend(problems)
        cone = cx = sweep = None
        if {"cone", "obstruct", "cosection"} & set(tasks):
            budget.check_time()
            start = time.perf_counter()
            cx = obstruction_complex(model)
            cone = normal_cone(model)
            clock["cone"] = time.perf_counter() - start
        if "cone" in tasks:
            t2 = cx.obstruction_dim()
            if table is not None and len(table.dims) > 1 and t2 != table.dims[1]:
                raise InvariantError(f"ker delta / im ds has dimension {t2}, T^2 has {table.dims[1]}")
            results["cone"] = {
                "cone_ring": list(cone.ring),
                "cone_ideal": cone.cone_strings(),
                "fiber_ring": list(cone.fiber_ring),
                "fiber_ideal": cone.fiber_strings(),
                "ds": _matrix(cx.ds),
                "delta": _matrix(cx.delta),
                "obstruction_dim": t2,
            }
        if {"obstruct", "cosection"} & set(tasks):
            budget.check_time()
            start = time.perf_counter()
            sweep = curvilinear_sweep(model, job.sweep.order, job.sweep.grid, job.sweep.seed,
                                      cone=cone, complex_=cx)
            clock["sweep"] = time.perf_counter() - start
        if "obstruct" in tasks:
            classes = sorted({(c.order, tuple(_fr(c.vector))) for c in sweep.nonzero()})
            results["obstruct"] = {
                "jets": _obstruct_jets(job, table, cx),
                "sweep": {
                    "directions": sweep.directions,
                    "nonzero_classes": [{"order": n, "vector": list(v)} for n, v in classes],
                    "all_in_cone": sweep.all_in_cone,
                    "all_in_kernel": sweep.all_in_kernel,
                    "spans_cone": sweep.spans_cone,
                },
            }
            if sweep.failures:
                status = EXIT_INVARIANT
                data["errors"].extend(sweep.failures)
        if "cosection" in tasks:
            budget.check_time()
            try:
                rep = cosection_check(model, list(job.cosection), sweep=sweep, cone=cone)
            except InvalidCosectionError as exc:
                results["cosection"] = {"valid": False, "reason": str(exc)}
                status = max(status, EXIT_INPUT)
                data["errors"].append(f"invalid input: {exc}")
            else:
                verdict = {True: "pass", False: "fail"}
                results["cosection"] = {
                    "valid": True,
                    "certificate": rep.certificate,
                    "sigma_at_point": _fr(rep.sigma_at_point),
                    "descends": verdict[rep.descends],
                    "vanishes_on_cone": verdict[rep.vanishes_on_cone],
                    "kills_classes": verdict[rep.kills_classes],
                    "classes_checked": rep.classes_checked,
                }
                if not rep.passed:
                    status = EXIT_INVARIANT
                    data["errors"].append("cosection verdicts fail although the descent invariant holds")
    except InvariantError as exc:
        status = EXIT_INVARIANT
        data["errors"].append(f"invariant failure: {exc}")
    except ResourceLimitError as exc:
        status = EXIT_RESOURCE
        data["errors"].append(f"resource cap: {exc}")
    data["status"] = {EXIT_OK: "ok", EXIT_INPUT: "input error", EXIT_INVARIANT: "invariant failure", EXIT_RESOURCE: "resource cap"}[status]
    if timing:
        data["timing"] = {k: round(v, 4) for k, v in clock.items()}
    return Report(data, status)


def render_text(data: dict) -> str:
    inp = data["input"]
    lines = [f"model: V({', '.join(inp['ideal'])}) in Q[{', '.join(inp['variables'])}] "
             f"at ({', '.join(inp['point'])})"]
    r = data["results"]
    if "tangent" in r:
        dims = r["tangent"]["dims"]
        lines.append("tangent: " + ", ".join(f"T{i + 1} = {d}" for i, d in enumerate(dims)))
    if "classify" in r:
        lines.append(f"class: {r['classify']['kind']} ({r['classify']['certificate']})")
    if "bracket" in r:
        for name, b in r["bracket"]["tables"].items():
            if "matrix" in b:
                lines.append(f"bracket {name}: {b['matrix']}")
        lines.append(f"bracket axioms: {r['bracket']['axioms']}")
    if "cone" in r:
        lines.append(f"cone ideal: ({', '.join(r['cone']['cone_ideal'])})")
        lines.append(f"cone fibre: ({', '.join(r['cone']['fiber_ideal']) or '0'}) "
                     f"in Q[{', '.join(r['cone']['fiber_ring'])}]")
    if "obstruct" in r:
        for j in r["obstruct"]["jets"]:
            what = j.get("small_extension") or j["status"]
            lines.append(f"jet ({', '.join(j['jet'])}) at order {j['order']}: {what}")
        s = r["obstruct"]["sweep"]
        lines.append(f"sweep: {len(s['nonzero_classes'])} nonzero classes from {s['directions']} directions, "
                     f"in cone: {s['all_in_cone']}")
    if "cosection" in r:
        c = r["cosection"]
        if c["valid"]:
            lines.append(f"cosection ({c['certificate']}): descends {c['descends']}, "
                         f"vanishes on cone {c['vanishes_on_cone']}, kills classes {c['kills_classes']}")
        else:
            lines.append(f"cosection: {c['reason']}")
    for e in data["errors"]:
        lines.append(f"error: {e}")
    lines.append(f"status: {data['status']}")
    return "\n".join(lines) + "\n"


def explain(job: JobSpec) -> str:
    """Resolution generators, linearized matrices and the minimal model, as text."""
    table = tangent_dims(job.model, job.max_index, Budget(job.caps.generators, job.caps.seconds))
    out = [f"model: {job.model}", "", "resolution generators (name : degree : differential):",
           table.resolution.dump(), "", "linearized complex at the point:"]
    fiber = table.fiber
    for j in range(1, fiber.top + 1):
        m = fiber.maps.get(j) or []
        out.append(f"d_{j}: V_{j} ({len(fiber.names[j])}) -> V_{j - 1} ({len(fiber.names[j - 1])}), "
                   f"rank {fiber.map_rank(j)}")
        for row in m:
            out.append("  [" + " ".join(format_rational(c) for c in row) + "]")
    out += ["", "minimal model (quadratic part):", table.minimal.dump() or "(empty)", "",
            "tangent dims: " + " ".join(str(d) for d in table.dims)]
    return "\n".join(out) + "\n"


# the corpus


@dataclass
class CorpusResult:
    lines: list
    passed: int = 0
    failed: int = 0
    missing: int = 0

    @property
    def exit_code(self):
        return EXIT_INVARIANT if self.failed else EXIT_OK

    def summary(self):
        total = self.passed + self.failed + self.missing
        if total == 0:
            return "0 jobs"
        return f"{total} jobs: {self.passed} passed, {self.failed} failed, {self.missing} without golden"


def golden_path(job: Path) -> Path:
    return job.with_name(job.stem + ".expected.json")


def run_corpus(directory, write_missing: bool = True) -> CorpusResult:
    """Compare each job's report with its golden; missing goldens get a candidate file."""
    directory = Path(directory)
    jobs = sorted(p for p in directory.iterdir() if p.suffix in (".yaml", ".yml")) if directory.is_dir() else []
    result = CorpusResult([])
    for path in jobs:
        try:
            job = parse_job(path.read_text(encoding="utf-8"))
        except (JobError, NotOnLocusError) as exc:
            text = json.dumps({"input_error": str(exc)}, sort_keys=True, indent=2) + "\n"
        else:
            text = run_job(job).to_json()
        golden = golden_path(path)
        if not golden.exists():
            result.missing += 1
            if write_missing:
                cand = path.with_name(path.stem + ".candidate.json")
                cand.write_text(text, encoding="utf-8")
                result.lines.append(f"MISSING {path.name}: wrote candidate {cand.name}")
            else:
                result.lines.append(f"MISSING {path.name}")
            continue
        expected = golden.read_text(encoding="utf-8")
        if expected == text:
            result.passed += 1
            result.lines.append(f"PASS {path.name}")
        else:
            result.failed += 1
            result.lines.append(f"FAIL {path.name}")
            diff = difflib.unified_diff(expected.splitlines(), text.splitlines(),
                                        golden.name, "actual", lineterm="")
            result.lines.extend("  " + line for line in diff)
    return result

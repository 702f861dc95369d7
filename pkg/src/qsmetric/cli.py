"""Command line front end.

Usage::

    qsmetric metric      [--config FILE] [--out FILE] [--format csv|json] [--seed N] [--fd-step H]
    qsmetric gauge-check [--config FILE] [--trials N] [--debug-no-connection] ...
    qsmetric evolve      [--config FILE] ...
    qsmetric geodesic    [--config FILE] [--steps N] ...
    qsmetric kg          [--config FILE] ...
    qsmetric accept      --criterion N ...

Configs are JSON objects with ``"version": 1``; unknown keys are rejected.
Exit status is 0 on success, 2 for configuration errors and 3 for numerical
failures (including failed checks). Errors are written to standard error as
``{"error": ..., "detail": ...}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import acceptance
from . import evolution as ev
from . import fields as fl
from . import geometry as geo
from . import models as md
from .errors import QSMetricError
from .hilbert import HermitianOperator, normalize

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


class ConfigError(Exception):
    pass


class CliExit(Exception):
    def __init__(self, code, error=None, detail=None):
        super().__init__(detail)
        self.code, self.error, self.detail = code, error, detail


# -- config schema -------------------------------------------------------------

_NUM = {"type": "number"}
_COMPLEX = {"oneOf": [_NUM, {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}]}
_VECTOR = {"type": "array", "items": _COMPLEX, "minItems": 1}
_POSINT = {"type": "integer", "minimum": 1}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


def _kind(name, required=(), **props):
    return _obj({"kind": {"const": name}, **props}, ["kind", *required])


FAMILY_SCHEMA = {"oneOf": [
    _kind("bloch"),
    _kind("gaussian", ["sigma"], sigma={"type": "number", "exclusiveMinimum": 0}, center=_NUM,
          n_points={"type": "integer", "minimum": 401}, half_width={"type": "number", "minimum": 5}),
    _kind("random", dim={"type": "integer", "minimum": 1, "maximum": 16},
          params={"type": "integer", "minimum": 1, "maximum": 4}, seed={"type": "integer", "minimum": 0}),
    _kind("constant", ["state"], state=_VECTOR, params=_POSINT),
    _kind("pure_gauge", ["state"], state=_VECTOR),
]}

HAMILTONIAN_SCHEMA = {"oneOf": [
    _kind("rabi", omega=_NUM),
    _kind("identity", energy=_NUM, dim=_POSINT),
    _kind("random", dim={"type": "integer", "minimum": 1, "maximum": 64}, seed={"type": "integer", "minimum": 0}),
    _kind("matrix", ["entries"], entries={"type": "array", "items": _VECTOR, "minItems": 1}),
]}

_RANGE = {"type": "array", "items": [_NUM, _NUM, _POSINT], "minItems": 3, "maxItems": 3}
_BASE = {"version": {"const": 1}, "command": {"type": "string"}, "seed": {"type": "integer", "minimum": 0}}

SCHEMAS = {
    "metric": _obj({
        **_BASE,
        "family": FAMILY_SCHEMA,
        "grid": {"type": "array", "items": _RANGE, "minItems": 1},
        "analytic": {"type": "boolean"},
        "connection": {"type": "boolean"},
        "fd_step": {"type": "number", "exclusiveMinimum": 0},
    }, ["version"]),
    "gauge-check": _obj({
        **_BASE,
        "family": FAMILY_SCHEMA,
        "gauge": {"oneOf": [
            _obj({"terms": {"type": "array", "items": {
                "type": "array", "items": [{"type": "array", "items": {"type": "integer", "minimum": 0}}, _NUM],
                "minItems": 2, "maxItems": 2}}}, ["terms"]),
            _obj({"random_degree": {"type": "integer", "minimum": 0, "maximum": 6}, "scale": _NUM},
                 ["random_degree"]),
        ]},
        "trials": _POSINT,
        "point_range": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
        "analytic": {"type": "boolean"},
        "fd_step": {"type": "number", "exclusiveMinimum": 0},
        "tolerances": _obj({"metric": _NUM, "connection": _NUM}),
    }, ["version"]),
    "evolve": _obj({
        **_BASE,
        "hamiltonian": HAMILTONIAN_SCHEMA,
        "psi0": _VECTOR,
        "hbar": {"type": "number", "exclusiveMinimum": 0},
        "time": {"oneOf": [
            _obj({"t_end": {"type": "number", "exclusiveMinimum": 0}, "steps": _POSINT}, ["t_end", "steps"]),
            _obj({"dt_speed": {"type": "number", "exclusiveMinimum": 0}, "steps": _POSINT}, ["dt_speed", "steps"]),
        ]},
    }, ["version"]),
    "geodesic": _obj({
        **_BASE,
        "hamiltonian": HAMILTONIAN_SCHEMA,
        "psi0": _VECTOR,
        "hbar": {"type": "number", "exclusiveMinimum": 0},
        "fraction": {"type": "number", "exclusiveMinimum": 0},
        "steps": _POSINT,
        "tilt": _NUM,
    }, ["version"]),
    "kg": _obj({
        **_BASE,
        "grid": _obj({
            "dims": {"type": "array", "items": {"type": "integer", "minimum": 5}, "minItems": 4, "maxItems": 4},
            "spacing": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                        "minItems": 4, "maxItems": 4},
            "origin": {"type": "array", "items": _NUM, "minItems": 4, "maxItems": 4},
        }, ["dims", "spacing"]),
        "mass": {"type": "number", "minimum": 0},
        "c": {"type": "number", "exclusiveMinimum": 0},
        "hbar": {"type": "number", "exclusiveMinimum": 0},
        "waves": {"type": "array", "minItems": 1, "items": _obj({
            "k": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
            "amplitude": _COMPLEX,
        }, ["k"])},
        "field_file": {"type": "string"},
        "export": {"type": "string"},
        "mode": {"enum": ["analytic", "grid"]},
        "nodes": {"type": "array", "items": {"type": "array", "items": {"type": "integer"},
                                             "minItems": 4, "maxItems": 4}},
        "all_interior_nodes": {"type": "boolean"},
        "sign_convention": {"enum": [1, -1]},
        "include_connection": {"type": "boolean"},
        "boost": {"oneOf": [
            _obj({"rapidity": _NUM, "direction": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3}},
                 ["rapidity"]),
            _obj({"matrix": {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 4,
                                                          "maxItems": 4}, "minItems": 4, "maxItems": 4}},
                 ["matrix"]),
        ]},
    }, ["version"]),
    "accept": _obj({**_BASE, "criterion": {"type": "integer", "minimum": 1, "maximum": 12}}, ["version"]),
}


def load_config(path, command: str) -> dict:
    if path is None:
        return {"version": 1}
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    try:
        jsonschema.Draft7Validator(SCHEMAS[command]).validate(cfg)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from exc
    if cfg.get("command", command) != command:
        raise ConfigError(f"config is for command {cfg['command']!r}, not {command!r}")
    return cfg


# -- builders ------------------------------------------------------------------


def _complex(x) -> complex:
    return complex(x[0], x[1]) if isinstance(x, list) else complex(x)


def _vector(v) -> np.ndarray:
    return np.array([_complex(x) for x in v])


def build_family(spec: dict, seed: int) -> geo.StateFamily:
    kind = spec["kind"]
    if kind == "bloch":
        return md.bloch_family()
    if kind == "gaussian":
        return md.gaussian_family(md.GaussianFamilySpec(
            spec["sigma"], spec.get("center", 0.0), spec.get("n_points", 801), spec.get("half_width", 8.0)))
    if kind == "random":
        return md.random_family(spec.get("dim", 4), spec.get("params", 2), spec.get("seed", seed))
    if kind == "constant":
        return md.constant_family(_vector(spec["state"]), spec.get("params", 1))
    if kind == "pure_gauge":
        return md.pure_gauge_family(_vector(spec["state"]))
    raise ConfigError(f"unknown family kind {kind!r}")


def default_grid(spec: dict, family: geo.StateFamily) -> list:
    if spec["kind"] == "bloch":
        return [[np.pi / 6, 5 * np.pi / 6, 5], [0.0, 8 * np.pi / 5, 5]]
    if spec["kind"] == "gaussian":
        c = spec.get("center", 0.0)
        return [[c - spec["sigma"], c + spec["sigma"], 5]]
    return [[-1.0, 1.0, 5]] * family.param_count


def build_hamiltonian(spec: dict, hbar: float, seed: int):
    """Return ``(H, default_psi0)``."""
    kind = spec["kind"]
    if kind == "rabi":
        omega = spec.get("omega", 1.0)
        return 0.5 * hbar * omega * np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([1.0, 0.0])
    if kind == "identity":
        dim = spec.get("dim", 2)
        psi = np.zeros(dim)
        psi[0] = 1.0
        return spec.get("energy", 1.0) * np.eye(dim), psi
    if kind == "random":
        rng = md.rng_from_seed(spec.get("seed", seed))
        dim = spec.get("dim", 4)
        return md.random_hermitian(dim, rng), md.random_state(dim, rng)
    if kind == "matrix":
        try:
            H = HermitianOperator([_vector(row) for row in spec["entries"]]).entries
        except ValueError as exc:
            raise ConfigError(f"hamiltonian: {exc}") from exc
        psi = np.zeros(H.shape[0])
        psi[0] = 1.0
        return H, psi
    raise ConfigError(f"unknown hamiltonian kind {kind!r}")


def _threads() -> int:
    raw = os.environ.get("QSMETRIC_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"QSMETRIC_THREADS must be a non-negative integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("QSMETRIC_THREADS must be non-negative")
    return n or (os.cpu_count() or 1)


def _ordered_map(fn, items):
    items = list(items)
    n = min(_threads(), len(items)) or 1
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _sig(s) -> str:
    return ",".join(str(x) for x in s)


# -- commands ------------------------------------------------------------------


def cmd_metric(cfg: dict, args) -> tuple:
    spec = cfg.get("family", {"kind": "bloch"})
    fam = build_family(spec, args.seed)
    fd_step = args.fd_step or cfg.get("fd_step")
    if fd_step or not cfg.get("analytic", True):
        fam = fam.without_gradient(fd_step)
    grid = cfg.get("grid") or default_grid(spec, fam)
    if len(grid) != fam.param_count:
        raise ConfigError(f"grid has {len(grid)} axes, family has {fam.param_count} parameters")
    axes = [np.linspace(lo, hi, n) for lo, hi, n in grid]
    points = [np.array(p) for p in np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, len(axes))]
    m = fam.param_count
    pairs = [(i, j) for i in range(m) for j in range(i, m)]
    cross = [(i, j) for i in range(m) for j in range(i + 1, m)]
    with_conn = cfg.get("connection", False)

    def row(p):
        g = geo.metric(fam, p)
        F = geo.berry_curvature(fam, p)
        out = [*p.tolist(), *(g.entries[i, j] for i, j in pairs), *(F[i, j] for i, j in cross)]
        if with_conn:
            out += geo.berry_connection(fam, p).tolist()
        return [float(x) for x in out] + [_sig(g.signature)]

    columns = ([f"lam_{i + 1}" for i in range(m)] + [f"g_{i + 1}{j + 1}" for i, j in pairs]
               + [f"F_{i + 1}{j + 1}" for i, j in cross])
    if with_conn:
        columns += [f"A_{i + 1}" for i in range(m)]
    columns.append("signature")
    return (columns, _ordered_map(row, points)), None, True


def cmd_gauge_check(cfg: dict, args) -> tuple:
    trials = args.trials or cfg.get("trials", 200)
    tol = {"metric": 1e-6, "connection": 1e-5, **cfg.get("tolerances", {})}
    lo, hi = cfg.get("point_range", [-1.0, 1.0])
    gauge_cfg = cfg.get("gauge", {"random_degree": 3})
    rng = md.rng_from_seed(args.seed)
    fixed = build_family(cfg["family"], args.seed) if "family" in cfg else None
    fd_step = args.fd_step or cfg.get("fd_step")
    analytic = cfg.get("analytic", True) and not fd_step
    connection = not args.debug_no_connection
    metric_dev = shift_dev = 0.0
    for _ in range(trials):
        fam = fixed or md.random_family(4, int(rng.integers(1, 4)), int(rng.integers(2**32)))
        if not analytic:
            fam = fam.without_gradient(fd_step)
        m = fam.param_count
        if "terms" in gauge_cfg:
            terms = gauge_cfg["terms"] or [([0] * m, 0.0)]
            if any(len(e) != m for e, _ in terms):
                raise ConfigError(f"gauge exponents must have {m} entries")
            alpha = geo.polynomial_gauge([(tuple(e), c) for e, c in terms])
        else:
            alpha = geo.random_polynomial_gauge(m, rng, gauge_cfg["random_degree"], gauge_cfg.get("scale", 1.0))
        p = rng.uniform(lo, hi, size=m)
        gauged = geo.apply_gauge(fam, alpha)
        g0 = geo.metric(fam, p, connection=connection).entries
        g1 = geo.metric(gauged, p, connection=connection).entries
        metric_dev = max(metric_dev, float(np.max(np.abs(g1 - g0))))
        dalpha = alpha.grad(p, 1e-5) if analytic else geo.GaugeTransform(alpha.alpha).grad(p, fam.fd_step)
        shift = geo.berry_connection(gauged, p) - geo.berry_connection(fam, p) + dalpha
        shift_dev = max(shift_dev, float(np.max(np.abs(shift))))
    passed = metric_dev <= tol["metric"] and shift_dev <= tol["connection"]
    report = {
        "max_metric_deviation": metric_dev,
        "connection_shift_residual": shift_dev,
        "trials": trials,
        "debug_no_connection": args.debug_no_connection,
        "tolerances": tol,
        "passed": passed,
    }
    return None, report, passed


def _evolution_setup(cfg, args):
    hbar = cfg.get("hbar", 1.0)
    H, psi0 = build_hamiltonian(cfg.get("hamiltonian", {"kind": "rabi"}), hbar, args.seed)
    if "psi0" in cfg:
        psi0 = _vector(cfg["psi0"])
    if psi0.size != H.shape[0]:
        raise ConfigError("psi0 does not match the Hamiltonian dimension")
    try:
        psi0 = normalize(psi0)
    except QSMetricError as exc:
        raise ConfigError(f"psi0: {exc}") from exc
    return H, psi0, hbar


def cmd_evolve(cfg: dict, args) -> tuple:
    H, psi0, hbar = _evolution_setup(cfg, args)
    tcfg = cfg.get("time", {"t_end": np.pi, "steps": 1000})
    steps = args.steps or tcfg["steps"]
    speed = ev.anandan_speed(H, psi0, hbar)
    if "dt_speed" in tcfg:
        if speed < ev.ZERO_SPEED:
            raise ConfigError("dt_speed needs a state with non-zero energy spread")
        t = (tcfg["dt_speed"] / speed) * np.arange(steps + 1)
    else:
        t = np.linspace(0.0, tcfg["t_end"], steps + 1)
    trace = ev.evolve(H, psi0, t, hbar)
    dev = ev.speed_consistency(trace, H)
    dH = [float(np.sqrt(ev.variance(H, s))) for s in trace.states]
    rows = [[float(t[k]), dH[k], float(trace.step_s[k]), float(ev.anandan_speed(H, trace.states[k], hbar) * (t[k + 1] - t[k]))]
            for k in range(steps)]
    report = {
        "steps": steps,
        "path_length": float(trace.cumulative_s[-1]),
        "speed_consistency": dev,
        "delta_H": dH[0],
        "delta_H_drift": float(max(abs(x - dH[0]) for x in dH)),
    }
    return (["t", "delta_H", "ds_overlap", "ds_variance"], rows), report, True


def cmd_geodesic(cfg: dict, args) -> tuple:
    H, psi0, hbar = _evolution_setup(cfg, args)
    steps = args.steps or cfg.get("steps", 1000)
    speed = ev.anandan_speed(H, psi0, hbar)
    length = 2 * np.pi * cfg.get("fraction", 0.25)
    duration = length / speed if speed > ev.ZERO_SPEED else 1.0
    chart = None
    if cfg.get("tilt") and speed > ev.ZERO_SPEED:
        b = cfg["tilt"]
        rx = np.array([[np.cos(b / 2), -1j * np.sin(b / 2)], [-1j * np.sin(b / 2), np.cos(b / 2)]])
        chart = ev.BlochChart(rx @ ev.bloch_chart_for(H, psi0).rotation)
    res = ev.geodesic_vs_schrodinger(H, psi0, duration, hbar, steps, chart)
    rows = [[float(s), *map(float, a), *map(float, b)] for s, a, b in zip(res.s, res.schrodinger, res.geodesic)]
    report = {"max_deviation": res.deviation, "speed_drift": res.speed_drift,
              "path_length": float(res.s[-1]), "steps": steps}
    return (["s", "theta_schr", "phi_schr", "theta_geo", "phi_geo"], rows), report, True


def cmd_kg(cfg: dict, args) -> tuple:
    mass, c, hbar = cfg.get("mass", 1.0), cfg.get("c", 1.0), cfg.get("hbar", 1.0)
    if "field_file" in cfg:
        try:
            field = fl.read_field(cfg["field_file"], mass, c, hbar)
        except OSError as exc:
            raise ConfigError(f"cannot read field file: {exc}") from exc
    else:
        gcfg = cfg.get("grid", {"dims": [7, 7, 7, 7], "spacing": [0.25] * 4, "origin": [-0.75] * 4})
        grid = fl.SpacetimeGrid.uniform(gcfg["dims"], gcfg["spacing"], gcfg.get("origin", [0.0] * 4))
        waves = cfg.get("waves", [{"k": [0.3, 0.2, 0.1], "amplitude": 1.0}])
        field = fl.superpose(*(
            fl.plane_wave(grid, fl.on_shell_k(w["k"], mass, c, hbar), _complex(w.get("amplitude", 1.0)), mass, c, hbar)
            for w in waves))
    if "export" in cfg:
        fl.write_field(cfg["export"], field)
    mode = cfg.get("mode", "analytic" if field.waves else "grid")
    shape = field.grid.shape
    if cfg.get("all_interior_nodes"):
        nodes = [tuple(n) for n in np.ndindex(*(s - 2 for s in shape))]
        nodes = [tuple(i + 1 for i in n) for n in nodes]
    else:
        nodes = [tuple(n) for n in cfg.get("nodes", [[s // 2 for s in shape]])]
    sign = cfg.get("sign_convention", 1)
    conn = cfg.get("include_connection", False)
    idx = [(i, j) for i in range(4) for j in range(i, 4)]
    rows, hist = [], {}
    for node in nodes:
        g = fl.config_metric(field, node, conn, sign, mode)
        key = _sig(g.signature)
        hist[key] = hist.get(key, 0) + 1
        rows.append([*node, *(float(g.entries[i, j]) for i, j in idx), key])
    report = {"grid_residual": fl.kg_residual(field, "grid"),
              "analytic_residual": fl.kg_residual(field, "analytic") if field.waves else None,
              "mode": mode, "nodes": len(nodes), "signature_histogram": dict(sorted(hist.items()))}
    if "boost" in cfg:
        b = cfg["boost"]
        L = np.array(b["matrix"]) if "matrix" in b else fl.boost(b["rapidity"], b.get("direction", [1, 0, 0]))
        if not field.waves:
            raise ConfigError("the boost check needs plane-wave components")
        report["boost_deviation"] = max(
            fl.lorentz_boost_check(k, L, A, sign, seed=args.seed) for k, A in field.waves)
    columns = ["i0", "i1", "i2", "i3"] + [f"g_{i}{j}" for i, j in idx] + ["signature"]
    return (columns, rows), report, True


def cmd_accept(cfg: dict, args) -> tuple:
    n = args.criterion or cfg.get("criterion")
    if n is None:
        raise ConfigError("accept needs --criterion or a 'criterion' key")
    if n not in acceptance.CRITERIA:
        raise ConfigError(f"unknown criterion {n}")
    report = acceptance.run_criterion(n, args.seed)
    return None, report, report["passed"]


COMMANDS = {
    "metric": cmd_metric,
    "gauge-check": cmd_gauge_check,
    "evolve": cmd_evolve,
    "geodesic": cmd_geodesic,
    "kg": cmd_kg,
    "accept": cmd_accept,
}


# -- output --------------------------------------------------------------------


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def _report_rows(report: dict):
    if "checks" in report:
        cols = ["criterion", "check", "value", "op", "tol", "passed"]
        rows = [[report["criterion"], k, v["value"], v["op"], v["tol"], v["passed"]]
                for k, v in report["checks"].items()]
        return cols, rows
    flat = {k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in report.items()}
    return list(flat), [list(flat.values())]


def render(command: str, table, report, fmt: str) -> tuple[str, str]:
    """Return ``(main_output, extra_stdout)``."""
    if fmt == "json":
        doc = {"command": command}
        if table is not None:
            doc["table"] = {"columns": table[0], "rows": table[1]}
        if report is not None:
            doc["report"] = report
        return json.dumps(doc, indent=2) + "\n", ""
    if table is None:
        return _csv(*_report_rows(report)), ""
    return _csv(*table), (json.dumps(report) + "\n" if report is not None else "")


# -- entry point ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliExit(EXIT_CONFIG, "usage", message)


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="write the main output here instead of stdout")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--seed", type=_u64, default=0)
    common.add_argument("--fd-step", type=_positive, default=None,
                        help="use finite differences with this step instead of analytic gradients")
    common.add_argument("--debug-no-connection", action="store_true",
                        help="drop the connection term from the metric (negative control)")
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--steps", type=int, default=None)
    common.add_argument("--criterion", type=int, default=None)
    parser = _Parser(prog="qsmetric", description="Metric of quantum states: numerical checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        for name in ("trials", "steps"):
            if getattr(args, name) is not None and getattr(args, name) < 1:
                raise ConfigError(f"--{name} must be at least 1")
        _threads()
        cfg = load_config(args.config, args.command)
        if "seed" in cfg and "--seed" not in (argv if argv is not None else sys.argv[1:]):
            args.seed = cfg["seed"]
        table, report, ok = COMMANDS[args.command](cfg, args)
        main_out, extra = render(args.command, table, report, args.format)
        if args.out:
            Path(args.out).write_text(main_out, newline="")
            if extra:
                sys.stdout.write(extra)
        else:
            sys.stdout.write(main_out + (("\n" + extra) if extra else ""))
        return EXIT_OK if ok else EXIT_NUMERICAL
    except CliExit as exc:
        _error(exc.error, exc.detail)
        return exc.code
    except (ConfigError, jsonschema.ValidationError) as exc:
        _error("ConfigError", str(exc))
        return EXIT_CONFIG
    except (QSMetricError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        _error(type(exc).__name__, str(exc))
        return EXIT_NUMERICAL
    except Exception as exc:  # any other failure still maps onto the exit-code contract
        _error(type(exc).__name__, str(exc))
        return EXIT_NUMERICAL


def _error(kind, detail):
    sys.stderr.write(json.dumps({"error": kind, "detail": detail}) + "\n")


def main(argv=None) -> int:
    """Entry point; returns the exit status (used by the console script via ``sys.exit``)."""
    return run(argv)


def console():
    sys.exit(run())


if __name__ == "__main__":
    console()

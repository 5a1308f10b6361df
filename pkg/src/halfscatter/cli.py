"""``scatter`` command line front end.

    scatter reflect|spectrum|absorb|laser|kerr --config run.json [--out file] [--format csv|json]

The config is a JSON document; complex numbers are written as [re, im].
Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence

from . import __version__
from .core import Barrier, BoundaryCondition, Delta, PotentialSpec
from .delta import DeltaHalfLine, delta_halfline_reflection, mirror_distance
from .errors import DomainError, ScatterError, SpectralSingularityAtRealK
from .halfline import (HalfLineProblem, absorption_residual, boundary_from_external_reflection,
                       find_perfect_absorption, find_spectral_points, halfline_reflection)
from .nonlinear import (KerrPoint, kerr_laser_intensity, kerr_wavenumber_shift,
                        nl_spectral_singularity_amplitude)
from .numerics import ComplexRegion
from .slab import SlabLaserConfig, lasing_modes, solve_exact_lasing_point, threshold_gain_approx

COMMANDS = ("reflect", "spectrum", "absorb", "laser", "kerr")


class ConfigError(Exception):
    pass


# config parsing

def _get(obj: dict, key: str, where: str, default: Any = ...):
    if key in obj:
        return obj[key]
    if default is ...:
        raise ConfigError(f"missing field '{where}{key}'")
    return default


def _real(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{where}': expected a number, got {value!r}")
    return float(value)


def _complex(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        return complex(value[0], value[1])
    raise ConfigError(f"field '{where}': expected a number or [re, im], got {value!r}")


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field '{where}': expected an integer, got {value!r}")
    return value


def parse_bc(spec, where: str = "params.bc") -> BoundaryCondition:
    if spec == "dirichlet":
        return BoundaryCondition.dirichlet()
    if spec == "neumann":
        return BoundaryCondition.neumann()
    if not isinstance(spec, dict):
        raise ConfigError(f"field '{where}': expected 'dirichlet', 'neumann' or an object")
    if "gamma" in spec:
        g = spec["gamma"]
        if g == "inf":
            return BoundaryCondition.from_gamma(complex("inf"))
        return BoundaryCondition.from_gamma(_complex(g, where + ".gamma"))
    if "external_reflection" in spec:
        return boundary_from_external_reflection(_complex(spec["external_reflection"],
                                                          where + ".external_reflection"))
    if "alpha" in spec or "beta" in spec:
        alpha = _complex(_get(spec, "alpha", where + "."), where + ".alpha")
        beta = _complex(_get(spec, "beta", where + "."), where + ".beta")
        try:
            return BoundaryCondition(alpha, beta)
        except DomainError as exc:
            raise ConfigError(f"field '{where}': {exc}") from None
    raise ConfigError(f"field '{where}': need one of gamma, alpha/beta, external_reflection")


def parse_pieces(items, where: str = "params.pieces") -> PotentialSpec:
    if not isinstance(items, list):
        raise ConfigError(f"field '{where}': expected a list of pieces")
    pieces = []
    for i, item in enumerate(items):
        loc = f"{where}[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(f"field '{loc}': expected an object")
        kind = _get(item, "type", loc + ".")
        try:
            if kind == "delta":
                pieces.append(Delta(_complex(_get(item, "z", loc + "."), loc + ".z"),
                                    _real(_get(item, "a", loc + "."), loc + ".a")))
            elif kind == "barrier":
                a = _real(_get(item, "a", loc + "."), loc + ".a")
                L = _real(_get(item, "L", loc + "."), loc + ".L")
                n = item.get("n")
                v0 = item.get("v0")
                pieces.append(Barrier(a, L,
                                      n=None if n is None else _complex(n, loc + ".n"),
                                      v0=None if v0 is None else _complex(v0, loc + ".v0")))
            else:
                raise ConfigError(f"field '{loc}.type': unknown piece type {kind!r}")
        except DomainError as exc:
            raise ConfigError(f"field '{loc}': {exc}") from None
    try:
        return PotentialSpec(tuple(pieces))
    except DomainError as exc:
        raise ConfigError(f"field '{where}': {exc}") from None


def parse_sweep(cfg: dict, default_param: str) -> tuple[str, list[float]]:
    sw = _get(cfg, "sweep", "")
    if not isinstance(sw, dict):
        raise ConfigError("field 'sweep': expected an object")
    name = sw.get("parameter", default_param)
    if "values" in sw:
        vals = sw["values"]
        if not isinstance(vals, list):
            raise ConfigError("field 'sweep.values': expected a list")
        return name, [_real(v, f"sweep.values[{i}]") for i, v in enumerate(vals)]
    lo = _real(_get(sw, "from", "sweep."), "sweep.from")
    hi = _real(_get(sw, "to", "sweep."), "sweep.to")
    steps = _int(_get(sw, "steps", "sweep."), "sweep.steps")
    if steps < 1:
        raise ConfigError("field 'sweep.steps': must be >= 1")
    if steps == 1:
        return name, [lo]
    return name, [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]


def _halfline_problem(cfg: dict) -> tuple[HalfLineProblem, DeltaHalfLine | None]:
    kind = _get(cfg, "problem", "")
    params = _get(cfg, "params", "")
    if not isinstance(params, dict):
        raise ConfigError("field 'params': expected an object")
    bc = parse_bc(_get(params, "bc", "params."))
    if kind == "delta":
        z = _complex(_get(params, "z", "params."), "params.z")
        a = _real(_get(params, "a", "params."), "params.a")
        try:
            d = DeltaHalfLine(z, a, bc)
        except DomainError as exc:
            raise ConfigError(f"field 'params.a': {exc}") from None
        return d.problem, d
    if kind == "potential":
        pot = parse_pieces(_get(params, "pieces", "params."))
        return HalfLineProblem(pot, bc), None
    raise ConfigError(f"field 'problem': {kind!r} is not valid here (use 'delta' or 'potential')")


# output

def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return _fmt(v)
    return v


class Table:
    def __init__(self, columns: Sequence[str], rows: list[list]):
        self.columns = list(columns)
        self.rows = rows

    def render(self, fmt: str, meta: dict) -> str:
        if fmt == "json":
            doc = {"meta": meta,
                   "columns": self.columns,
                   "rows": [{c: _json_value(v) for c, v in zip(self.columns, r)} for r in self.rows]}
            return json.dumps(doc, indent=2, sort_keys=False) + "\n"
        buf = io.StringIO()
        for key, val in meta.items():
            buf.write(f"# {key}: {val}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()


def _threads() -> int:
    raw = os.environ.get("SCATTER_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"SCATTER_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def _pmap(fn: Callable, items: list) -> list:
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        # map yields in submission order, so rows keep the sweep order
        return list(pool.map(fn, items))


# commands

def cmd_reflect(cfg: dict) -> Table:
    prob, d = _halfline_problem(cfg)
    name, ks = parse_sweep(cfg, "k")
    if name != "k":
        raise ConfigError(f"field 'sweep.parameter': reflect sweeps k, got {name!r}")
    if any(not k > 0 for k in ks):
        raise ConfigError("field 'sweep': k values must be positive")

    def row(k):
        try:
            R = delta_halfline_reflection(d, k) if d is not None else halfline_reflection(prob, k)
        except SpectralSingularityAtRealK:
            nan = float("nan")
            return [k, nan, nan, float("inf"), nan, "SS"]
        return [k, R.real, R.imag, abs(R) ** 2, math.atan2(R.imag, R.real), ""]

    return Table(["k", "re_R", "im_R", "abs2_R", "arg_R", "flag"], _pmap(row, ks))


def _region(cfg: dict) -> ComplexRegion:
    reg = _get(cfg, "region", "")
    if not isinstance(reg, dict):
        raise ConfigError("field 'region': expected an object")
    vals = {key: _real(_get(reg, key, "region."), "region." + key)
            for key in ("re_min", "re_max", "im_min", "im_max")}
    grid_n = _int(reg.get("grid_n", 60), "region.grid_n")
    try:
        return ComplexRegion(grid_n=grid_n, **vals)
    except DomainError as exc:
        raise ConfigError(f"field 'region': {exc}") from None


def cmd_spectrum(cfg: dict) -> Table:
    prob, _ = _halfline_problem(cfg)
    pts = find_spectral_points(prob, _region(cfg))
    rows = [[p.kind.value, p.k.real, p.k.imag, p.residual, str(p.physical).lower()] for p in pts]
    return Table(["kind", "re_k", "im_k", "residual", "physical"], rows)


def cmd_absorb(cfg: dict) -> Table:
    prob, _ = _halfline_problem(cfg)
    iv = _get(cfg, "interval", "")
    if not (isinstance(iv, list) and len(iv) == 2):
        raise ConfigError("field 'interval': expected [lo, hi]")
    lo, hi = _real(iv[0], "interval[0]"), _real(iv[1], "interval[1]")
    if not 0 < lo < hi:
        raise ConfigError("field 'interval': need 0 < lo < hi")
    ks = find_perfect_absorption(prob, lo, hi)
    return Table(["k", "residual"], [[k, abs(absorption_residual(prob, k))] for k in ks])


def _modes(cfg: dict) -> list[int]:
    spec = _get(cfg, "modes", "")
    if isinstance(spec, list):
        return [_int(m, f"modes[{i}]") for i, m in enumerate(spec)]
    if isinstance(spec, dict):
        lo = _int(_get(spec, "from", "modes."), "modes.from")
        hi = _int(_get(spec, "to", "modes."), "modes.to")
        return list(range(lo, hi + 1))
    raise ConfigError("field 'modes': expected a list or {from, to}")


def cmd_laser(cfg: dict) -> Table:
    if _get(cfg, "problem", "") != "slab-laser":
        raise ConfigError("field 'problem': laser needs 'slab-laser'")
    p = _get(cfg, "params", "")
    try:
        slab = SlabLaserConfig(
            eta=_real(_get(p, "eta", "params."), "params.eta"),
            L=_real(_get(p, "L", "params."), "params.L"),
            a=_real(p.get("a", 0.0), "params.a"),
            eps_mirror=_complex(p.get("eps_mirror", 0.0), "params.eps_mirror"),
        )
    except DomainError as exc:
        raise ConfigError(f"field 'params': {exc}") from None
    found = lasing_modes(slab, _modes(cfg))
    for msg in found.diagnostics:
        print(f"scatter: {msg}", file=sys.stderr)

    def row(res):
        k_ex, g_ex = solve_exact_lasing_point(slab, res.k, res.g)
        return [res.m, res.k, res.vartheta, res.g_slab, res.g_mirror, res.g,
                threshold_gain_approx(slab, res.k), g_ex]

    return Table(["m", "k", "vartheta", "g_slab", "g_mirror", "g", "g_approx", "g_exact"],
                 _pmap(row, list(found)))


def cmd_kerr(cfg: dict) -> Table:
    if _get(cfg, "problem", "") != "kerr":
        raise ConfigError("field 'problem': kerr needs 'kerr'")
    p = _get(cfg, "params", "")
    b = _real(_get(p, "b", "params."), "params.b")
    k = _real(_get(p, "k", "params."), "params.k")
    re_eps = _real(_get(p, "re_eps", "params."), "params.re_eps")
    sigma = _complex(_get(p, "sigma", "params."), "params.sigma")
    if not sigma.imag > 0:
        raise ConfigError("field 'params.sigma': Im(sigma) must be positive (saturating gain)")
    if not (b > 0 and k > 0 and re_eps > 0):
        raise ConfigError("field 'params': need b, k, re_eps > 0")
    if "a" in p:
        a = _real(p["a"], "params.a")
    else:
        # threshold position for the chosen mode
        a = mirror_distance(k, b, re_eps, _int(p.get("m", 0), "params.m"))
    if not a > 0:
        raise ConfigError("field 'params.a': must be positive")
    g0 = 1 / (b * re_eps)
    name, vals = parse_sweep(cfg, "g")
    if name == "g":
        gs = vals
    elif name == "dg":
        gs = [g0 + v for v in vals]
    else:
        raise ConfigError(f"field 'sweep.parameter': kerr sweeps 'g' or 'dg', got {name!r}")
    bc = BoundaryCondition.dirichlet()

    def row(g):
        I = kerr_laser_intensity(g, g0, b, k, sigma)
        eps = complex(re_eps, -g * re_eps / k)
        kp = KerrPoint.from_optics(eps, sigma, b, k)
        if I < 0:
            amp, source = float("nan"), "below-threshold"
        elif I == 0:
            amp, source = 0.0, "threshold"
        else:
            hits = nl_spectral_singularity_amplitude(kp.at(a), bc, k,
                                                     u_max=10 * math.sqrt(2 * I) + 1)
            if hits.amplitudes:
                amp, source = hits.amplitudes[0], "exact"
            else:
                # k itself shifts when Re(sigma) != 0; fall back to I = |A+|^2 / 2
                amp, source = math.sqrt(2 * I), "intensity-law"
        return [g, I, amp, kerr_wavenumber_shift(g, g0, sigma, a, b, k) / k, source]

    return Table(["g", "I", "abs_A_plus", "dk_over_k", "source"], _pmap(row, gs))


HANDLERS = {"reflect": cmd_reflect, "spectrum": cmd_spectrum, "absorb": cmd_absorb,
            "laser": cmd_laser, "kerr": cmd_kerr}


def load_config(path: str) -> tuple[dict, str]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    try:
        cfg = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError:
        raise ConfigError(f"{path}: config is not UTF-8 text") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return cfg, hashlib.sha256(raw).hexdigest()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scatter", description="Half-line scattering calculations")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", help="output file (default: stdout)")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, digest = load_config(args.config)
        table = HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"scatter: config error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"scatter: config error: {exc}", file=sys.stderr)
        return 1
    except (ScatterError, ArithmeticError) as exc:
        print(f"scatter: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    meta = {"tool": f"halfscatter {__version__}", "command": args.command, "config_sha256": digest}
    text = table.render(args.format, meta)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

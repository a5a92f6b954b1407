"""Command-line driver.

Exit codes: 0 every selected check passed, 1 an identity failed, 2 the
configuration is invalid, 3 a computation ran out of its truncation window.
Reports are JSON with sorted keys and every scalar written as a string.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import click

from .backends import Heisenberg, Virasoro
from .formal import TruncationError
from .scalars import QQ, ParseError, parse_scalar
from .soundness import commutator_check, virasoro_bracket_check
from .twisted import (
    InconsistentModule,
    MatrixZeroModes,
    TwistedFockModule,
    VirasoroModule,
    WeylZeroModes,
    identity_sweep,
    induce,
    lemma_suite,
)
from .zhu import ZhuFamily, algebra_table, law_checks, u1_checks, z_oracle_checks

SUITES = ("backend", "jacobi", "lemmas", "laws", "iso", "all")

STABILITY_NOTE = (
    "results cover the stabilized range only; stabilization across cutoffs is an "
    "empirical certificate, not a proof that the truncated ideal is complete"
)


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


def rational(x, where: str):
    if isinstance(x, bool):
        raise ConfigError(f"{where}: expected a rational, got {x!r}")
    if isinstance(x, int):
        return QQ(x)
    if not isinstance(x, str):
        raise ConfigError(f"{where}: scalars are integers or strings such as \"1/2\", got {x!r}")
    try:
        s = parse_scalar(x)
    except ParseError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    if not s.is_rational():
        raise ConfigError(f"{where}: {x!r} is not rational")
    return s.to_rational()


def matrix(rows, where: str) -> list[list]:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ConfigError(f"{where}: expected a list of rows")
    return [[rational(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)]


def _int(x, where: str, low: int = 0) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < low:
        raise ConfigError(f"{where}: expected an integer >= {low}, got {x!r}")
    return x


DEFAULT_BOUNDS = {
    "ambient": 6,
    "stability": [6, 7, 8],
    "sweep_weight": 3,
    "l_bound": 3,
    "mode_bound": 3,
    "state_degree": 4,
    "lemma_weight": 3,
    "lemma_state_degree": 1,
    "bracket_weight": 8,
    "law_weight": None,
    "product_weight": 3,
    "u1_weight": 3,
    "induce_cutoff": 4,
}


@dataclass
class Session:
    raw: dict
    voa: Any
    module: Any = None
    bounds: dict = field(default_factory=dict)
    output: str | None = None

    def ambient(self, override: int | None) -> int:
        return override if override is not None else self.bounds["ambient"]


def load_config(data: dict) -> Session:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    backend = data.get("backend")
    if not isinstance(backend, dict) or "name" not in backend:
        raise ConfigError("config needs a 'backend' object with a 'name'")
    bounds = dict(DEFAULT_BOUNDS)
    given = data.get("bounds", {})
    if not isinstance(given, dict):
        raise ConfigError("'bounds' must be an object")
    for k, v in given.items():
        if k not in DEFAULT_BOUNDS:
            raise ConfigError(f"bounds: unknown key {k!r}")
        if k == "stability":
            if not isinstance(v, list) or not v:
                raise ConfigError("bounds.stability: expected a non-empty list of cutoffs")
            bounds[k] = sorted(_int(c, "bounds.stability", 1) for c in v)
        elif v is None and k == "law_weight":
            bounds[k] = None
        else:
            bounds[k] = _int(v, f"bounds.{k}")

    name = backend["name"]
    try:
        if name == "heisenberg":
            voa, module = _heisenberg(backend, data)
        elif name == "virasoro":
            voa, module = _virasoro(backend, data)
        else:
            raise ConfigError(f"backend.name: unknown backend {name!r} (heisenberg, virasoro)")
    except InconsistentModule as exc:
        raise ConfigError(f"zero_modes: {exc}") from None
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc)) from None
    out = data.get("output")
    if out is not None and not isinstance(out, str):
        raise ConfigError("output: expected a path string")
    return Session(data, voa, module, bounds, out)


def _heisenberg(backend: dict, data: dict):
    if "form" not in backend:
        raise ConfigError("backend.form: the Gram matrix is required")
    form = matrix(backend["form"], "backend.form")
    d = len(form)
    if d == 0:
        raise ConfigError("backend.form: the zero vertex algebra has nothing to compute")
    names = backend.get("names")
    auto = data.get("automorphism", {}) or {}
    cosets = [rational(a, "automorphism.cosets") for a in auto.get("cosets", [0] * d)]
    nil_rows = auto.get("nilpotent")
    nil = None
    if nil_rows is not None:
        N = matrix(nil_rows, "automorphism.nilpotent")
        if len(N) != d or any(len(r) != d for r in N):
            raise ConfigError(f"automorphism.nilpotent: expected a {d}x{d} matrix")
        nil = [{j: c for j, c in enumerate(row) if c} for row in N]
    voa = Heisenberg(form, cosets=cosets, nilpotent=nil, names=names)

    zm = data.get("zero_modes")
    if zm is None:
        return voa, None
    kind = zm.get("kind")
    dim = _int(zm.get("dim"), "zero_modes.dim")
    if kind == "matrix":
        mats = {int(i): matrix(m, f"zero_modes.matrices[{i}]") for i, m in zm.get("matrices", {}).items()}
        Z = MatrixZeroModes(voa, dim, mats)
    elif kind == "weyl":
        pairs = [tuple(_int(x, "zero_modes.pairs") for x in p) for p in zm.get("pairs", [])]
        central = {int(i): matrix(m, f"zero_modes.central[{i}]") for i, m in zm.get("central", {}).items()}
        Z = WeylZeroModes(voa, pairs, central, dim, _int(zm.get("max_degree", 1), "zero_modes.max_degree"))
    else:
        raise ConfigError("zero_modes.kind: expected 'matrix' or 'weyl'")
    return voa, TwistedFockModule(voa, Z)


def _virasoro(backend: dict, data: dict):
    if "c" not in backend:
        raise ConfigError("backend.c: the central charge is required")
    voa = Virasoro(rational(backend["c"], "backend.c"))
    lw = data.get("lowest_weight")
    if lw is None:
        return voa, None
    l0 = matrix(lw.get("l0", []), "lowest_weight.l0")
    return voa, VirasoroModule(voa, l0)


def read_config(path: str | None) -> Session:
    if path is None:
        raise ConfigError("--config is required")
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return load_config(data)


# ---------------------------------------------------------------------------
# suites


def _sweep_module(s: Session):
    """The module a sweep acts on: the configured one, or V itself (untwisted)."""
    return s.module if s.module is not None else s.voa


def _states(s: Session, module, degree) -> list:
    if module is s.voa:
        return s.voa.basis_upto(int(degree))
    st = module.states_upto(degree)
    return [x for d in st for x in st[d]]


def _chunks(items: list, jobs: int) -> list[list]:
    jobs = max(1, min(jobs, len(items)))
    return [items[i::jobs] for i in range(jobs)]


def _merge(parts: list[dict], order: list) -> list[dict]:
    """Merge per-chunk sweep reports: counts add, the first counterexample in input order wins."""
    merged = {}
    for name in order:
        checked = sum(p[name]["checked"] for p in parts)
        bad = [p[name] for p in parts if p[name]["first_counterexample"] is not None]
        bad.sort(key=lambda r: r["_position"])
        first = bad[0] if bad else None
        merged[name] = {
            "identity": name,
            "parameters": parts[0][name]["parameters"],
            "status": "fail" if first else "pass",
            "checked": checked,
            "first_counterexample": first["first_counterexample"] if first else None,
        }
    return [merged[n] for n in order]


def _sweep_worker(args) -> dict:
    raw, kind, positions = args
    s = load_config(raw)
    module = _sweep_module(s)
    voa = s.voa
    b = s.bounds
    out = {}
    if kind == "jacobi":
        labels = voa.basis_upto(b["sweep_weight"])
        states = _states(s, module, b["state_degree"])
        params = {k: b[k] for k in ("sweep_weight", "l_bound", "mode_bound", "state_degree")}
        for pos in positions:
            res = identity_sweep(
                module, [labels[pos]], labels, states, b["l_bound"], b["mode_bound"], describe=voa.format_label
            )
            _collect(out, res, params, pos)
    else:
        labels = voa.basis_upto(b["lemma_weight"])
        states = _states(s, module, b["lemma_state_degree"])
        params = {k: b[k] for k in ("lemma_weight", "lemma_state_degree", "mode_bound")}
        for pos in positions:
            res = lemma_suite(module, [labels[pos]], states, b["mode_bound"], describe=voa.format_label)
            _collect(out, res, params, pos)
    return out


def _collect(out: dict, res: dict, params: dict, pos: int) -> None:
    for name, r in res.items():
        rep = r.report(params)
        cur = out.get(name)
        if cur is None:
            out[name] = dict(rep, _position=pos if rep["first_counterexample"] else None)
            continue
        cur["checked"] += rep["checked"]
        if cur["first_counterexample"] is None and rep["first_counterexample"] is not None:
            cur["first_counterexample"] = rep["first_counterexample"]
            cur["status"] = "fail"
            cur["_position"] = pos


def run_sweep(s: Session, kind: str, jobs: int) -> list[dict]:
    voa = s.voa
    weight = s.bounds["sweep_weight" if kind == "jacobi" else "lemma_weight"]
    positions = list(range(len(voa.basis_upto(weight))))
    tasks = [(s.raw, kind, chunk) for chunk in _chunks(positions, jobs)]
    if len(tasks) == 1:
        parts = [_sweep_worker(tasks[0])]
    else:
        with ProcessPoolExecutor(max_workers=len(tasks)) as pool:
            parts = list(pool.map(_sweep_worker, tasks))
    order = list(parts[0])
    return _merge(parts, order)


def suite_backend(s: Session) -> list[dict]:
    b = s.bounds
    voa = s.voa
    out = [virasoro_bracket_check(voa, b["bracket_weight"]).report(max_weight=b["bracket_weight"])]
    r = commutator_check(voa, b["sweep_weight"], b["mode_bound"])
    out.append(r.report(max_weight=b["sweep_weight"], mode_bound=b["mode_bound"]))
    return out


def suite_laws(s: Session, cutoff: int | None) -> list[dict]:
    cutoffs = _stability(s, cutoff)
    out = []
    for flavour in ("tilde", "plain"):
        fam = ZhuFamily(s.voa, max(cutoffs), flavour)
        w0 = fam.stabilized_range(cutoffs)
        total = w0 if s.bounds["law_weight"] is None else min(w0, s.bounds["law_weight"])
        for W in cutoffs:
            for r in law_checks(fam.algebra(W), total):
                out.append(r.report(flavour=flavour, cutoff=W, stabilized_range=w0, max_total=total))
    return out


def _stability(s: Session, cutoff: int | None) -> list[int]:
    if cutoff is not None:
        return [cutoff, cutoff + 1, cutoff + 2]
    return list(s.bounds["stability"])


def suite_iso(s: Session, cutoff: int | None) -> list[dict]:
    W = s.ambient(cutoff)
    tilde = ZhuFamily(s.voa, W, "tilde")
    plain = ZhuFamily(s.voa, W, "plain")
    uw = s.bounds["u1_weight"]
    out = [r.report(cutoff=W) for r in u1_checks(tilde, plain, W, pre_weight=uw, table_weight=min(W - 2, 4))]
    if s.module is not None:
        module = s.module
        states = [x for x in module.states_upto(0).get(QQ(0), [])]
        for r in z_oracle_checks(
            module, states, tilde, plain, W, product_weight=s.bounds["product_weight"], describe=repr
        ):
            out.append(r.report(cutoff=W, states=len(states)))
    return out


def run_suite(s: Session, suite: str, cutoff: int | None, jobs: int) -> list[dict]:
    if suite == "backend":
        return suite_backend(s)
    if suite == "jacobi":
        return run_sweep(s, "jacobi", jobs)
    if suite == "lemmas":
        if not isinstance(s.module, TwistedFockModule):
            raise ConfigError("the lemma suite needs a Heisenberg backend with 'zero_modes'")
        return run_sweep(s, "lemmas", jobs)
    if suite == "laws":
        return suite_laws(s, cutoff)
    if suite == "iso":
        return suite_iso(s, cutoff)
    out = suite_backend(s) + run_sweep(s, "jacobi", jobs)
    if isinstance(s.module, TwistedFockModule):
        out += run_sweep(s, "lemmas", jobs)
    return out + suite_laws(s, cutoff) + suite_iso(s, cutoff)


# ---------------------------------------------------------------------------
# table and induce


def table_report(s: Session, cutoff: int | None) -> dict:
    W = s.ambient(cutoff)
    cutoffs = [W, W + 1, W + 2]
    tables = {}
    for flavour in ("tilde", "plain"):
        fam = ZhuFamily(s.voa, W + 2, flavour)
        w0 = fam.stabilized_range(cutoffs)
        tables[flavour] = algebra_table(fam.algebra(W), max(w0, 0)).to_json(s.voa)
    return {"command": "table", "cutoff": W, "tables": tables, "note": STABILITY_NOTE}


def induce_report(s: Session, cutoff: int | None) -> dict:
    if s.module is None:
        raise ConfigError("induce needs 'zero_modes' (Heisenberg) or 'lowest_weight' (Virasoro)")
    W = cutoff if cutoff is not None else s.bounds["induce_cutoff"]
    module = s.module
    ind = induce(module, W)
    omega = ind.omega()
    seed_dim = len(module.states_upto(0).get(QQ(0), []))
    omega_dims = {str(d): len(b) for d, b in omega.items()}
    recovered = all((len(b) == seed_dim) if d == 0 else not b for d, b in omega.items())
    return {
        "command": "induce",
        "cutoff": W,
        "seed_dimension": seed_dim,
        "span_dimensions": {str(d): n for d, n in ind.dims().items()},
        "radical_dimensions": {str(d): n for d, n in ind.radical_dims().items()},
        "dimensions": {str(d): n for d, n in ind.quotient_dims().items()},
        "omega_dimensions": omega_dims,
        "omega_recovered": recovered,
        "status": "pass" if recovered else "fail",
    }


# ---------------------------------------------------------------------------
# click plumbing


def _emit(report: dict, path: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    if path:
        Path(path).write_text(text)
    click.echo(text, nl=False)


def _guard(fn):
    """Map library errors onto exit codes; returns the report on success."""
    try:
        return fn()
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except TruncationError as exc:
        click.echo(f"truncation error: {exc}", err=True)
        sys.exit(3)


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Twisted Zhu algebras: identity suites, algebra tables and induced modules."""


_config = click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON session config.")
_cutoff = click.option("--cutoff", type=click.IntRange(min=1), default=None, help="Ambient weight cutoff W.")
_report = click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None, help="Write the JSON report here.")


@main.command()
@click.argument("suite", type=click.Choice(SUITES))
@_config
@_cutoff
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True, help="Worker processes for sweeps.")
@_report
def check(suite: str, config_path, cutoff, jobs: int, report_path) -> None:
    """Run an identity suite; exit 0 when every identity holds."""

    def go():
        s = read_config(config_path)
        results = run_suite(s, suite, cutoff, jobs)
        return s, results

    s, results = _guard(go)
    failed = any(r["status"] != "pass" for r in results)
    report = {"command": "check", "suite": suite, "status": "fail" if failed else "pass", "results": results}
    if suite in ("laws", "iso", "all"):
        report["note"] = STABILITY_NOTE
    _emit(report, report_path or s.output)
    sys.exit(1 if failed else 0)


@main.command()
@_config
@_cutoff
@_report
def table(config_path, cutoff, report_path) -> None:
    """Structure constants of both algebras on the stabilized range."""
    s = _guard(lambda: read_config(config_path))
    report = _guard(lambda: table_report(s, cutoff))
    _emit(report, report_path or s.output)


@main.command(name="induce")
@_config
@_cutoff
@_report
def induce_cmd(config_path, cutoff, report_path) -> None:
    """Induce from the configured lowest-weight data and recover it as the lowest-weight space."""
    s = _guard(lambda: read_config(config_path))
    report = _guard(lambda: induce_report(s, cutoff))
    _emit(report, report_path or s.output)
    sys.exit(0 if report["omega_recovered"] else 1)


if __name__ == "__main__":
    main()

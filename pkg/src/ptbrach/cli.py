"""Command-line front end: every analysis as a JSON or CSV artifact.

JSON reports have the shape {"config", "result", "certificates"}; floats are
printed with 17 significant digits so identical configs give identical bytes.
Exit status is 0 on success, 2 when a certificate fails or a library error is
raised, and 1 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import brachistochrone as brach
from . import dilation, evolution, frames, geometry, hamiltonian, metric
from .config import DEFAULT_TOL
from .errors import PTError
from .numerics import frobenius

OUTPUT_DIR_ENV = "PTBRACH_OUTPUT_DIR"

CSV_HELP = """\
CSV columns (angles in radians, times in units of 1/energy):
  evolve        t, p_up, p_down, norm, eta_norm
  bloch-path    index, x, y, z, re_chart, im_chart, chart_at_infinity
  metric-field  re_z, im_z, g_standard, g_deformed, g_pullback
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- serialisation ---------------------------------------------------------------


def _num(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with fixed-precision floats; dict key order is preserved."""
    obj = _jsonable(obj)
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        if len(obj) <= 3 and all(not isinstance(v, (dict, list)) for v in obj.values()):
            return "{" + ", ".join(f"{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()) + "}"
        items = [f"{inner}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [inner + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Certificates:
    def __init__(self):
        self.items: list[dict] = []

    def add(self, name: str, residual: float, bound: float | None = None, passed: bool | None = None):
        if passed is None:
            passed = bool(residual <= bound)
        self.items.append({"name": name, "passed": bool(passed), "residual": float(residual)})

    @property
    def ok(self) -> bool:
        return all(c["passed"] for c in self.items)


# -- argument helpers ------------------------------------------------------------


def _complex_list(text: str, n: int) -> np.ndarray:
    try:
        vals = [complex(v.strip().replace(" ", "")) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse complex list {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"expected {n} comma-separated complex numbers, got {len(vals)}")
    return np.array(vals, dtype=complex)


def _add_hamiltonian(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("Hamiltonian (either --r/--s/--theta or --omega/--beta)")
    g.add_argument("--r", type=float)
    g.add_argument("--s", type=float)
    g.add_argument("--theta", type=float)
    g.add_argument("--omega", type=float)
    g.add_argument("--beta", type=float)


def _hamiltonian(args) -> hamiltonian.PTHamiltonian:
    direct = [args.r, args.s, args.theta]
    family = [args.omega, args.beta]
    if all(v is not None for v in direct) and all(v is None for v in family):
        return hamiltonian.build(args.r, args.s, args.theta)
    if all(v is not None for v in family) and all(v is None for v in direct):
        return hamiltonian.from_params(args.omega, args.beta)
    raise UsageError("give exactly one of --r/--s/--theta or --omega/--beta")


def _default_t_max(h: hamiltonian.PTHamiltonian) -> float:
    if h.phase() is hamiltonian.Phase.EXACT:
        return 2 * math.pi / hamiltonian.derived_params(h).omega
    return 10.0


def _matrix(m: np.ndarray) -> list:
    return [[complex(v) for v in row] for row in np.asarray(m)]


def _fmt_point(z) -> str:
    if geometry.is_inf(z):
        return "inf"
    z = complex(z)
    re = 0.0 if abs(z.real) < 1e-12 else z.real
    im = 0.0 if abs(z.imag) < 1e-12 else z.imag
    if re == 0.0 and abs(abs(im) - 1.0) < 1e-12:
        return "+i" if im > 0 else "-i"
    return f"{re:.17g}{im:+.17g}i"


# -- commands --------------------------------------------------------------------

Result = tuple[Any, Certificates, Any]  # (json result, certificates, csv (header, rows) or None)


def cmd_spectrum(args) -> Result:
    h = _hamiltonian(args)
    sd = hamiltonian.spectrum(h)
    certs = Certificates()
    scale = max(1.0, frobenius(h.matrix))
    certs.add("pt_symmetry", hamiltonian.pt_commutator_norm(h), DEFAULT_TOL.certificate * scale)
    for i, e in enumerate((sd.e_plus, sd.e_minus)):
        v = sd.right[:, i]
        certs.add(f"eigen_residual_{i}", float(np.linalg.norm(h.matrix @ v - e * v)), DEFAULT_TOL.certificate * scale)
    res = {"matrix": _matrix(h.matrix), "e_plus": sd.e_plus, "e_minus": sd.e_minus, "phase": sd.phase.value}
    if sd.phase is hamiltonian.Phase.EXACT:
        p = hamiltonian.derived_params(h)
        res.update(alpha=p.alpha, beta=p.beta, omega=p.omega, a0=p.a0)
    return res, certs, None


def cmd_metric(args) -> Result:
    h = _hamiltonian(args)
    p = hamiltonian.derived_params(h)
    mp = metric.metric_from_beta(p.beta)
    bound = DEFAULT_TOL.certificate * max(1.0, math.cosh(p.beta)) ** 2 * max(1.0, frobenius(h.matrix))
    certs = Certificates()
    for name, r in metric.metric_certificates(mp, h).items():
        certs.add(name, r, bound)
    heq = mp.rho @ h.matrix @ mp.rho_inv
    expected = p.a0 * np.eye(2) + 0.5 * p.omega * np.array([[0, 1], [1, 0]])
    certs.add("hermitian_equivalent", frobenius(heq - expected), bound)
    res = {
        "beta": p.beta,
        "eta": _matrix(mp.eta),
        "rho": _matrix(mp.rho),
        "rho_inv": _matrix(mp.rho_inv),
        "c_operator": _matrix(mp.c_operator),
        "hermitian_equivalent": _matrix(heq),
    }
    return res, certs, None


def cmd_evolve(args) -> Result:
    h = _hamiltonian(args)
    psi0 = _complex_list(args.psi, 2)
    t_max = args.t_max if args.t_max is not None else _default_t_max(h)
    ev = evolution.evolve_state(h, psi0, t_max, args.n_steps)
    certs = Certificates()
    eta_norm = np.full(len(ev.time_grid), np.nan)
    if h.phase() is hamiltonian.Phase.EXACT:
        mp = metric.metric_for(h)
        eta_norm = np.array([mp.inner(s, s).real for s in ev.states])
        drift = float(np.max(np.abs(eta_norm - eta_norm[0])))
        certs.add("eta_norm_conserved", drift, DEFAULT_TOL.certificate * max(1.0, eta_norm[0]))
    rows = list(zip(ev.time_grid, ev.p_up, ev.p_down, ev.norms, eta_norm))
    res = {
        "t": ev.time_grid,
        "p_up": ev.p_up,
        "p_down": ev.p_down,
        "norm": ev.norms,
        "eta_norm": eta_norm,
    }
    return res, certs, (("t", "p_up", "p_down", "norm", "eta_norm"), rows)


def cmd_flip_times(args) -> Result:
    certs = Certificates()
    if args.alpha:
        if args.omega is None or any(v is not None for v in (args.r, args.s, args.theta, args.beta)):
            raise UsageError("--alpha takes --omega and no other Hamiltonian flags")
        rows = evolution.flip_time_scan(args.omega, args.alpha, validate=not args.no_validate)
        for r in rows:
            certs.add(f"round_trip[alpha={r.alpha:.17g}]", abs(r.up_to_down + r.down_to_up - 2 * math.pi / args.omega), 1e-10)
        res = {
            "omega": args.omega,
            "aa_bound": math.pi / args.omega,
            "rows": [
                {
                    "alpha": r.alpha,
                    "up_to_down": r.up_to_down,
                    "down_to_up": r.down_to_up,
                    "below_aa_bound": r.below_bound,
                    "validated": r.validated,
                }
                for r in rows
            ],
        }
        return res, certs, None
    h = _hamiltonian(args)
    p = hamiltonian.derived_params(h)
    ft = evolution.flip_times(h, validate=not args.no_validate)
    certs.add("round_trip", abs(ft.round_trip - 2 * math.pi / p.omega), 1e-10)
    res = {
        "alpha": p.alpha,
        "omega": p.omega,
        "up_to_down": ft.up_to_down,
        "down_to_up": ft.down_to_up,
        "round_trip": ft.round_trip,
        "aa_bound": ft.aa_bound,
        "below_aa_bound": ft.below_bound,
    }
    return res, certs, None


def cmd_frames(args) -> Result:
    h = _hamiltonian(args)
    mp = metric.metric_for(h)
    psi = _complex_list(args.psi, 2)
    s_pt = frames.pt_state(psi, mp)
    s_h = frames.to_frame(s_pt, mp, frames.Frame.HERMITIAN)
    obs_pt = frames.hamiltonian_observable(h)
    heq = metric.hermitian_equivalent(h, mp)
    obs_h = frames.hermitian_observable(heq)
    p_pt = frames.measurement_probabilities(obs_pt, s_pt)
    p_h = frames.measurement_probabilities(obs_h, s_h)
    certs = Certificates()
    certs.add("probabilities_agree", float(np.max(np.abs(p_pt - p_h))), DEFAULT_TOL.certificate)
    op = _complex_list(args.observable, 4).reshape(2, 2)
    routes = frames.expectation_routes(op, s_h, mp)
    vals = np.array(list(routes.values()))
    spread = float(max(np.ptp(vals.real), np.max(np.abs(vals.imag))))
    certs.add("expectation_routes_agree", spread, DEFAULT_TOL.certificate * max(1.0, frobenius(op)))
    res = {
        "energies": obs_pt.eigenvalues,
        "probabilities_pt_frame": p_pt,
        "probabilities_hermitian_frame": p_h,
        "observable_hermitian_frame": _matrix(op),
        "observable_pt_frame": _matrix(mp.rho_inv @ op @ mp.rho),
        "expectation_routes": routes,
    }
    return res, certs, None


def cmd_dilate(args) -> Result:
    h = _hamiltonian(args)
    blocks, report = dilation.solve_dilation(h, seed=args.seed, method=args.method)
    certs = Certificates()
    certs.add("riccati_feasible", report.residual_norm, passed=report.feasible)
    res = {
        "A": _matrix(blocks.A),
        "B": _matrix(blocks.B),
        "D": _matrix(blocks.D),
        "riccati": {
            "residual_norm": report.residual_norm,
            "hermiticity_defect_A": report.hermiticity_defect_A,
            "hermiticity_defect_D": report.hermiticity_defect_D,
            "feasible": report.feasible,
            "degenerate": report.degenerate,
            "stage": report.stage,
            "iterations": report.iterations,
        },
    }
    if report.feasible:
        t_max = _default_t_max(h)
        dev = dilation.co_evolution_check(h, blocks, _complex_list(args.psi, 2), t_max, args.n_steps)
        certs.add("co_evolution", dev, 1e-7)
        res["co_evolution_deviation"] = dev
        res["t_max"] = t_max
    return res, certs, None


def cmd_moebius(args) -> Result:
    if (args.beta is None) == (args.matrix is None):
        raise UsageError("give exactly one of --beta or --matrix")
    s = metric.boost(args.beta) if args.beta is not None else _complex_list(args.matrix, 4).reshape(2, 2)
    mp = geometry.moebius_from(s)
    certs = Certificates()
    res: dict[str, Any] = {
        "matrix": _matrix(mp.matrix),
        "trace_square": mp.trace_square,
        "kind": mp.kind.value,
        "degenerate_identity": mp.degenerate,
        "fixed_points": [_fmt_point(z) for z in mp.fixed_points],
    }
    derivs = []
    for i, z in enumerate(mp.fixed_points):
        if not geometry.is_inf(z):
            certs.add(f"fixed_point_{i}", abs(mp(z) - z), 1e-10)
        d = geometry.fixed_point_derivative(mp, "+" if i == 0 else "-")
        derivs.append({"point": _fmt_point(z), "derivative": d, "role": geometry.fixed_point_role(d)})
    res["derivatives"] = derivs
    if args.beta is not None:
        certs.add("trace_square", abs(mp.trace_square - 4 * math.cosh(args.beta / 2) ** 2), 1e-12)
    return res, certs, None


def cmd_bloch_path(args) -> Result:
    h = _hamiltonian(args)
    psi0 = _complex_list(args.psi, 2)
    t_max = args.t_max if args.t_max is not None else _default_t_max(h)
    ev = evolution.evolve_state(h, psi0, t_max, args.n_steps)
    states = ev.states
    if args.frame == "hermitian":
        states = states @ metric.metric_for(h).rho.T
    rows = geometry.export_path(states)
    certs = Certificates()
    unit = max(abs(math.fsum(c * c for c in r.bloch) - 1.0) for r in rows)
    certs.add("unit_sphere", unit, 1e-12)
    table = [
        (
            r.index,
            *map(float, r.bloch),
            "" if geometry.is_inf(r.chart) else float(r.chart.real),
            "" if geometry.is_inf(r.chart) else float(r.chart.imag),
            int(geometry.is_inf(r.chart)),
        )
        for r in rows
    ]
    res = {"t": ev.time_grid, "points": [list(r.bloch) for r in rows]}
    return res, certs, (geometry.CSV_COLUMNS, table)


def cmd_metric_field(args) -> Result:
    beta = args.beta
    mp = geometry.moebius_from(metric.boost(beta))
    axis = np.linspace(-args.extent, args.extent, args.n)
    rows, worst_pull, worst_gen = [], 0.0, 0.0
    ch, sh = math.cosh(beta), math.sinh(beta)
    for y in axis:
        for x in axis:
            z = complex(x, y)
            g0 = geometry.fs_metric(z)
            g1 = geometry.deformed_fs_metric(z, beta)
            gp = geometry.pullback_metric(z, mp)
            gg = geometry.deformed_fs_general(z, ch, 1j * sh, ch)
            worst_pull = max(worst_pull, abs(g1 - gp) / max(g1, 1e-300))
            worst_gen = max(worst_gen, abs(g1 - gg) / max(g1, 1e-300))
            rows.append((float(x), float(y), g0, g1, gp))
    certs = Certificates()
    certs.add("pullback_agreement", worst_pull, 1e-10)
    certs.add("general_form_agreement", worst_gen, 1e-12)
    res = {
        "beta": beta,
        "samples": [{"z": complex(a, b), "g_standard": c, "g_deformed": d} for a, b, c, d, _ in rows],
    }
    return res, certs, (("re_z", "im_z", "g_standard", "g_deformed", "g_pullback"), rows)


def cmd_brach(args) -> Result:
    prob = brach.BrachistochroneProblem(
        _complex_list(args.psi_i, 2), _complex_list(args.psi_f, 2), args.omega, args.beta
    )
    sol = brach.solve_pt(prob)
    lhs, rhs, ok = brach.aa_certificate(sol)
    certs = Certificates()
    certs.add("projective_arrival", sol.arrival_residual, DEFAULT_TOL.projective)
    certs.add("anandan_aharonov", max(0.0, rhs - lhs), passed=ok)
    res = {
        "t_min": sol.t_min,
        "degenerate": sol.degenerate,
        "branch_times": list(sol.branch_times),
        "h_b": _matrix(sol.h_b),
        "H_b": _matrix(sol.H_b),
        "phi_i": sol.phi_i,
        "phi_f": sol.phi_f,
        "aa_certificate": {"lhs": lhs, "rhs": rhs, "satisfied": ok},
        "aa_naive_bound": math.pi / args.omega,
    }
    return res, certs, None


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="ptbrach",
        description="PT-symmetric two-level toolkit: spectra, metrics, flip times, geometry.",
        epilog=CSV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, fn: Callable, help: str, ham: bool = True, csv_ok: bool = False):
        sp = sub.add_parser(name, help=help, epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
        if ham:
            _add_hamiltonian(sp)
        sp.add_argument("--output", "-o", help="output file (default stdout); relative paths honour $" + OUTPUT_DIR_ENV)
        sp.add_argument("--format", choices=["json", "csv"] if csv_ok else ["json"], default="json")
        sp.set_defaults(func=fn)
        return sp

    add("spectrum", cmd_spectrum, "eigenvalues, phase and alpha/beta/omega/a0")
    add("metric", cmd_metric, "metric operator, boost and their certificates")

    sp = add("evolve", cmd_evolve, "spin-flip probability curves", csv_ok=True)
    sp.add_argument("--psi", default="1,0", help="initial state, two complex numbers")
    sp.add_argument("--t-max", type=float)
    sp.add_argument("--n-steps", type=int, default=evolution.DEFAULT_GRID)

    sp = add("flip-times", cmd_flip_times, "flip times and the Anandan-Aharonov comparison")
    sp.add_argument("--alpha", type=float, nargs="+", help="scan these alpha values at fixed --omega")
    sp.add_argument("--no-validate", action="store_true", help="skip the propagated-root cross-check")

    sp = add("frames", cmd_frames, "frame-invariance report for one state")
    sp.add_argument("--psi", default="1,0")
    sp.add_argument("--observable", default="1,0,0,-1", help="Hermitian-frame observable, row-major")

    sp = add("dilate", cmd_dilate, "Hermitian 4x4 dilation and co-evolution check")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--method", choices=["auto", "scalar", "full"], default="auto")
    sp.add_argument("--psi", default="1,0")
    sp.add_argument("--n-steps", type=int, default=evolution.DEFAULT_GRID)

    sp = add("moebius", cmd_moebius, "Moebius type, fixed points and derivatives", ham=False)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--matrix", help="four complex entries A,B,C,D, row-major")

    sp = add("bloch-path", cmd_bloch_path, "Bloch-sphere path of an evolved state", csv_ok=True)
    sp.add_argument("--psi", default="1,0")
    sp.add_argument("--frame", choices=["pt", "hermitian"], default="pt")
    sp.add_argument("--t-max", type=float)
    sp.add_argument("--n-steps", type=int, default=256)

    sp = add("metric-field", cmd_metric_field, "round vs deformed metric on a chart grid", ham=False, csv_ok=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--extent", type=float, default=2.0)
    sp.add_argument("--n", type=int, default=21)

    sp = add("brach", cmd_brach, "PT brachistochrone and its Anandan-Aharonov certificate", ham=False)
    sp.add_argument("--omega", type=float, required=True)
    sp.add_argument("--beta", type=float, default=0.0)
    sp.add_argument("--psi-i", default="1,0")
    sp.add_argument("--psi-f", default="0,1")
    return p


def _config_echo(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "output")}
    cfg["tolerances"] = DEFAULT_TOL.as_dict()
    return cfg


def _destination(output: str | None) -> Path | None:
    if output is None:
        return None
    path = Path(output)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 1
    try:
        result, certs, table = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 1
    except PTError as exc:
        print(f"{type(exc).__name__}: {exc}", file=stderr)
        return 2

    if args.format == "csv":
        text = _csv_text(*table)
    else:
        text = dumps({"config": _config_echo(args), "result": result, "certificates": certs.items}) + "\n"
    dest = _destination(args.output)
    if dest is None:
        stdout.write(text)
    else:
        write_atomic(dest, text)
    for c in certs.items:
        if not c["passed"]:
            print(f"certificate failed: {c['name']} (residual {c['residual']:.3e})", file=stderr)
    return 0 if certs.ok else 2


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

"""clonelab command line: tables, sweeps, verification and figure reports."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable

import click
import numpy as np

SCHEMA = 1


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".12g")


def parse_ints(text: str | None) -> list[int]:
    """'2,3,5' or '2..5' (inclusive) or a mix: '1,3..5'."""
    if text is None or not text.strip():
        return []
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def parse_grid(text: str | None) -> list[float]:
    """'start:stop:count' (inclusive) or a comma list."""
    if text is None or not text.strip():
        return []
    if ":" in text:
        a, b, n = text.split(":")
        n = int(n)
        if n < 1:
            return []
        return [float(x) for x in np.linspace(float(a), float(b), n)]
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(ctx, param, value):
    try:
        return parse_ints(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc


def _grid(ctx, param, value):
    try:
        return parse_grid(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc


def render(header: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "json":
        data = [{h: (v if isinstance(v, (str, int)) else float(v)) for h, v in zip(header, r)} for r in rows]
        return json.dumps({"schema": SCHEMA, "columns": header, "rows": data}, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _parallel(fn: Callable, args: list, jobs: int) -> list:
    """Map in parallel; results keep the input order."""
    if jobs <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, *zip(*args)))


# -- table rows -------------------------------------------------------------------


def _rows_uqcm(ds, Ns, Ms, gs, grid):
    from .uqcm import global_fidelity, universal_fidelity

    header = ["d", "N", "M", "F", "F_global"]
    rows = [[d, N, M, universal_fidelity(d, N, M), global_fidelity(d, N, M)]
            for d in ds for N in Ns for M in Ms if M >= N]
    return header, rows


def _rows_phase(ds, Ns, Ms, gs, grid):
    from .phasecov import phase_optimal_fidelity, qudit_phase_optimal

    header = ["d", "M", "F"]
    rows = []
    for d in ds:
        if d == 2:
            rows.extend([2, M, phase_optimal_fidelity(M)] for M in Ms)
        else:
            rows.append([d, 2, qudit_phase_optimal(d)])
    return header, rows


def _rows_mub(ds, Ns, Ms, gs, grid):
    from .phasecov import mub_symmetric_fidelity

    header = ["d", "g", "F"]
    rows = [[d, g, mub_symmetric_fidelity(d, g)] for d in ds for g in (gs or range(1, d + 1)) if g <= d]
    return header, rows


def _king_point(d, g, F):
    from .meanking import king_eve_max

    return king_eve_max(d, g, F)


def _rows_king(ds, Ns, Ms, gs, grid, jobs=1):
    header = ["d", "g", "F_bob", "F_eve"]
    pts = [(d, g, F) for d in ds for g in (gs or range(1, d + 1)) if g <= d for F in grid if F >= 1 / d]
    vals = _parallel(_king_point, pts, jobs)
    return header, [[d, g, F, v] for (d, g, F), v in zip(pts, vals)]


def _di_pair(d, g):
    from .meanking import disturbance_DI

    return disturbance_DI(d, g, "king"), disturbance_DI(d, g, "standard")


def _rows_king_di(ds, Ns, Ms, gs, grid, jobs=1):
    header = ["d", "g", "D_I_king", "D_I_standard"]
    pts = [(d, g) for d in ds for g in (gs or range(1, d + 1)) if g <= d]
    vals = _parallel(_di_pair, pts, jobs)
    return header, [[d, g, k, s] for (d, g), (k, s) in zip(pts, vals)]


def _rows_cv(ds, Ns, Ms, gs, grid):
    from .cvclone import added_variance_bound, gaussian_clone, optimal_fidelity

    header = ["N", "M", "sigma2", "f", "sigma2_sim", "f_sim"]
    rows = []
    for N in Ns:
        for M in Ms:
            if M < N:
                continue
            r = gaussian_clone(N, M, 0.5 + 0.25j)
            rows.append([N, M, added_variance_bound(N, M), optimal_fidelity(N, M), r.added_variance[0], r.fidelity])
    return header, rows


FAMILIES = {
    "uqcm": _rows_uqcm,
    "phase": _rows_phase,
    "mub": _rows_mub,
    "king": _rows_king,
    "king-di": _rows_king_di,
    "cv": _rows_cv,
}

DEFAULT_GRID = "0.55:0.99:45"


@click.group()
def main():
    """Quantum cloning calculations."""


def _common(f):
    f = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")(f)
    f = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write here instead of stdout.")(f)
    return f


@main.command()
@click.argument("family", type=click.Choice(sorted(FAMILIES)))
@click.option("--d", "ds", default="2", callback=_int_list, help="Dimensions, e.g. 2,3,5 or 2..5.")
@click.option("--N", "Ns", default="1", callback=_int_list)
@click.option("--M", "Ms", default="2", callback=_int_list)
@click.option("--g", "gs", default=None, callback=_int_list, help="Bases used by Eve (default 1..d).")
@click.option("--grid", default=DEFAULT_GRID, callback=_grid, help="F_Bob grid for 'king'.")
@click.option("--jobs", default=1, show_default=True, help="Worker processes for king families.")
@_common
def table(family, ds, Ns, Ms, gs, grid, jobs, fmt, out):
    """Closed-form and simulated tables."""
    fn = FAMILIES[family]
    if family in ("king", "king-di"):
        header, rows = fn(ds, Ns, Ms, gs, grid, jobs)
    else:
        header, rows = fn(ds, Ns, Ms, gs, grid)
    _emit(render(header, rows, fmt), out)


SWEEP_PROTOCOLS = ("king", "bb84", "six-state", "d-dim-2basis", "d-dim-(g+1)basis")


def sweep_rows(protocols: list[str], d: int, gs: list[int], grid: list[float], jobs: int = 1):
    from .meanking import standard_qkd_eve

    header = ["protocol", "d", "g", "F_bob", "F_eve"]
    rows = []
    for proto in protocols:
        if proto == "king":
            _, r = _rows_king([d], [], [], gs, grid, jobs)
            rows.extend(["king", dd, g, F, v] for dd, g, F, v in r)
        elif proto == "d-dim-(g+1)basis":
            for g in gs or range(1, d + 1):
                rows.extend([proto, d, g, F, standard_qkd_eve(F, proto, d, g)] for F in grid if F >= 1 / d)
        else:
            g = {"bb84": 1, "six-state": 2, "d-dim-2basis": 1}[proto]
            rows.extend([proto, d, g, F, standard_qkd_eve(F, proto, d)] for F in grid if F >= 1 / d)
    return header, rows


@main.command()
@click.argument("protocols")
@click.option("--d", "d", default=2, show_default=True)
@click.option("--g", "gs", default=None, callback=_int_list)
@click.option("--grid", default=DEFAULT_GRID, callback=_grid, help="start:stop:count or a comma list.")
@click.option("--jobs", default=1, show_default=True)
@_common
def sweep(protocols, d, gs, grid, jobs, fmt, out):
    """(F_Bob, F_Eve) curves; PROTOCOLS is a comma list of king, bb84, six-state, d-dim-2basis, d-dim-(g+1)basis."""
    protos = [p.strip() for p in protocols.split(",") if p.strip()]
    bad = [p for p in protos if p not in SWEEP_PROTOCOLS]
    if bad:
        raise click.UsageError(f"unknown protocol(s): {', '.join(bad)}")
    if not grid:
        raise click.UsageError("empty F_Bob grid")
    header, rows = sweep_rows(protos, d, gs, grid, jobs)
    _emit(render(header, rows, fmt), out)


# -- verification ----------------------------------------------------------------


def _checks() -> dict[str, tuple[Callable[[], float], float, float]]:
    """name -> (compute, expected, default tol)."""
    from . import circuits, cvclone, meanking, phasecov, probclone, seqclone, teleclone, uqcm
    from .linalg import random_state

    def uqcm_sim(d, N, M):
        def run():
            psi = random_state(d, np.random.default_rng(7))
            return uqcm.werner_clone(psi, N, M, d).F1
        return run

    def circuit_phase():
        a = circuits.PHASE_ANGLES
        psi = phasecov.equatorial(0.9)
        return circuits.copy_fidelities(circuits.cloning_circuit(a.theta1, a.theta2, a.theta3, psi), psi)[0]

    def seq_overlap():
        ch = seqclone.seq_matrices_qubit(2, 4, 1)
        return abs(np.vdot(seqclone.target_state(2, 4, 1), ch.contract()))

    def tele_dev():
        psi = random_state(2, np.random.default_rng(3))
        return teleclone.teleclone_channel(2, 2, psi).max_deviation

    def king_d2():
        p = meanking.AttackParams(2, 2, 0.3, 0.8, phasecov.mub_cloner(2, 2, 0.8)[2])
        sim = meanking.simulate_mean_king_d2(p)
        cf = meanking.king_fidelities(p)
        return max(abs(a - b) for a, b in zip(sim, cf))

    return {
        "uqcm-1to2": (uqcm_sim(2, 1, 2), 5 / 6, 1e-10),
        "uqcm-1to3": (uqcm_sim(2, 1, 3), 7 / 9, 1e-10),
        "uqcm-2to3": (uqcm_sim(2, 2, 3), 11 / 12, 1e-10),
        "uqcm-qutrit-1to2": (uqcm_sim(3, 1, 2), 6 / 8, 1e-10),
        "phase-qubit": (lambda: phasecov.economic_phase_1to2(0.4)[0], 0.5 + 1 / math.sqrt(8), 1e-10),
        "phase-circuit": (circuit_phase, 0.5 + 1 / math.sqrt(8), 1e-10),
        "phase-qutrit": (lambda: phasecov.qudit_phase_optimal(3), (5 + math.sqrt(17)) / 12, 1e-12),
        "duan-guo-s0.5": (lambda: probclone.max_equal_gamma(probclone.overlap_pair(0.5)), 2 / 3, 1e-6),
        "cv-1to2": (lambda: cvclone.gaussian_clone(1, 2, 0.3 + 0.1j).fidelity, 2 / 3, 1e-10),
        "seq-2to4": (seq_overlap, 1.0, 1e-10),
        "teleclone-2x2": (tele_dev, 0.0, 1e-9),
        "econ-teleclone-d3": (lambda: teleclone.econ_phase_teleclone(3).fidelity, (5 + math.sqrt(17)) / 12, 1e-10),
        "mean-king-d2": (king_d2, 0.0, 1e-8),
    }


def verify_report(names: list[str] | None = None, tol: float | None = None) -> dict:
    checks = _checks()
    if names:
        unknown = [n for n in names if n not in checks]
        if unknown:
            raise KeyError(", ".join(unknown))
        selected = {n: checks[n] for n in names}
    else:
        selected = checks
    out = []
    for name, (fn, expected, default_tol) in selected.items():
        t = default_tol if tol is None else tol
        got = float(fn())
        out.append({"name": name, "expected": expected, "got": got, "tol": t, "pass": bool(abs(got - expected) <= t)})
    return {"schema": SCHEMA, "checks": out}


@main.command()
@click.option("--check", "names", multiple=True, help="Run only this check (repeatable).")
@click.option("--tol", type=float, default=None, help="Override every check's tolerance.")
@click.option("--list", "list_only", is_flag=True, help="List check names and exit.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def verify(names, tol, list_only, out):
    """Run spot checks and print a JSON report; exit code 1 if any fail."""
    if list_only:
        click.echo("\n".join(_checks()))
        return
    try:
        report = verify_report(list(names), tol)
    except KeyError as exc:
        raise click.UsageError(f"unknown check(s): {exc.args[0]}") from exc
    _emit(json.dumps(report, indent=2) + "\n", out)
    if not all(c["pass"] for c in report["checks"]):
        sys.exit(1)


# -- report with figures ---------------------------------------------------------


def _plot_sweep(rows, path: Path, title: str):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    keys = sorted({(r[0], r[2]) for r in rows}, key=lambda k: (k[0], k[1]))
    for proto, g in keys:
        pts = [(r[3], r[4]) for r in rows if r[0] == proto and r[2] == g]
        ax.plot(*zip(*pts), label=f"{proto} g={g}")
    ax.set_xlabel("F_Bob")
    ax.set_ylabel("F_Eve")
    ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


@main.command()
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--grid", default="0.55:0.99:23", callback=_grid)
@click.option("--jobs", default=1, show_default=True)
def report(out_dir, grid, jobs):
    """Write sweep CSVs and matching PNG figures into OUT."""
    if not grid:
        raise click.UsageError("empty F_Bob grid")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs_spec = [
        ("king_d5", ["king"], 5, [], "d = 5, king protocol"),
        ("compare_d2", ["king", "bb84", "six-state"], 2, [2], "d = 2 comparison"),
    ]
    for stem, protos, d, gs, title in jobs_spec:
        header, rows = sweep_rows(protos, d, gs, grid, jobs)
        (out / f"{stem}.csv").write_text(render(header, rows, "csv"))
        _plot_sweep(rows, out / f"{stem}.png", title)
        click.echo(f"{stem}.csv {stem}.png")


if __name__ == "__main__":
    main()

"""Command-line interface: ``qguess <command> FILE [options]``.

Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 a reproduction
check outside its tolerance.  ``--json`` prints one JSON object (keys sorted)
matching :data:`RUN_REPORT_SCHEMA` instead of the text tables.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fixtures
from .bounds import bound_suite, entropy_pack, posterior_entropy_precondition
from .criteria import check_no_measurement, equal_probability_pairs
from .errors import DegenerateOutcomeError, RecoveryError, SolverError, ValidationError
from .guesswork import conditional_guesswork, error_probability, guesswork
from .io import dump_povm, load_input, load_povm, load_symmetry_spec, save_json
from .sdp import certify, helstrom_error, recover_povm, solve_med, solve_mgd
from .search import search_general, search_qubit
from .symmetric import check_symmetric_optimality, minimize_rank_one, qubit_ket, rank_one_guesswork

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_REPRO = 0, 2, 3, 4

RUN_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "input_digest", "results", "diagnostics", "wall_time", "exit_code"],
    "additionalProperties": False,
    "properties": {
        "command": {"type": "string"},
        "input_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "results": {
            "type": "object",
            "additionalProperties": {"type": ["number", "boolean", "integer", "null"]},
        },
        "diagnostics": {"type": "object"},
        "wall_time": {"type": "number", "minimum": 0},
        "exit_code": {"type": "integer"},
    },
}


@dataclass
class RunReport:
    command: str
    input_digest: str
    results: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    wall_time: float = 0.0
    exit_code: int = EXIT_OK

    def to_json(self) -> str:
        doc = {"command": self.command, "input_digest": self.input_digest,
               "results": self.results, "diagnostics": self.diagnostics,
               "wall_time": self.wall_time, "exit_code": self.exit_code}
        return json.dumps(_jsonable(doc), sort_keys=True, allow_nan=False)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return None if not math.isfinite(x) else float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _digest(*paths) -> str:
    h = hashlib.sha256()
    for p in paths:
        if p is None:
            continue
        try:
            h.update(Path(p).read_bytes())
        except OSError as exc:
            raise ValidationError(f"cannot read file: {exc.strerror}", str(p)) from None
    return h.hexdigest()


def cmd_guesswork(args) -> RunReport:
    loaded = load_input(args.file)
    e = loaded.ensemble
    povm = load_povm(args.povm, e.dim) if args.povm else loaded.povm
    rep = RunReport("guesswork", _digest(args.file, args.povm))
    if povm is None:
        rep.results = {"guesswork": guesswork(e.probs), "error_prob": error_probability(e.probs),
                       "n": e.n, "dim": e.dim}
        return rep
    ev = conditional_guesswork(e, povm)
    rep.results = {"guesswork": ev.guesswork, "error_prob": ev.error_prob, "n": e.n,
                   "dim": e.dim, "outcomes": povm.m}
    rep.diagnostics["per_outcome"] = [
        {"outcome": j, "weight": o.weight, "guesswork": o.guesswork, "error": o.error}
        for j, o in enumerate(ev.per_outcome)]
    return rep


def _solver_failed(rep: RunReport, sol, what: str) -> RunReport:
    rep.exit_code = EXIT_SOLVER
    rep.diagnostics["error"] = (f"{what} did not converge; best bound {sol.objective:.12g} "
                                f"(gap estimate {sol.duality_gap_estimate:.3g})")
    return rep


def cmd_min_guesswork(args) -> RunReport:
    e = load_input(args.file).ensemble
    rep = RunReport("min-guesswork", _digest(args.file))
    sol = solve_mgd(e)
    rep.results = {"g_opt": sol.objective, "duality_gap": sol.duality_gap_estimate,
                   "converged": sol.converged, "audited": sol.audited,
                   "min_slack": sol.min_slack, "iterations": sol.iterations}
    rep.diagnostics["active_strategies"] = [list(s) for s in sol.active_set]
    if not sol.converged:
        return _solver_failed(rep, sol, "minimum-guesswork solve")
    if args.recover is not None or args.certify:
        povm = recover_povm(e, sol)
        cert = certify(e, povm)
        rep.results.update({"recovered_value": conditional_guesswork(e, povm).guesswork,
                            "certificate_passed": cert.passed,
                            "certificate_complete": cert.complete,
                            "certificate_worst_violation": cert.worst_violation,
                            "certificate_hermiticity": cert.hermiticity_residual,
                            "povm_outcomes": povm.m})
        if args.recover not in (None, "-"):
            save_json({"povm": dump_povm(povm)}, args.recover)
            rep.diagnostics["povm_file"] = str(args.recover)
        else:
            rep.diagnostics["povm"] = dump_povm(povm)
    if args.oracle:
        res = search_qubit(e, seed=args.seed) if e.dim == 2 else \
            search_general(e, restarts=args.restarts, seed=args.seed)
        rep.results.update({"oracle_value": res.best_value,
                            "oracle_gap": res.best_value - sol.objective})
        rep.diagnostics["oracle_method"] = res.method
        rep.diagnostics["oracle_evaluations"] = res.evaluations
    return rep


def cmd_min_error(args) -> RunReport:
    e = load_input(args.file).ensemble
    rep = RunReport("min-error", _digest(args.file))
    sol = solve_med(e)
    rep.results = {"p_err_opt": sol.objective, "duality_gap": sol.duality_gap_estimate,
                   "converged": sol.converged, "iterations": sol.iterations}
    if e.n == 2:
        rep.results["helstrom"] = helstrom_error(e)
    if not sol.converged:
        return _solver_failed(rep, sol, "minimum-error solve")
    return rep


def cmd_bounds(args) -> RunReport:
    loaded = load_input(args.file)
    e = loaded.ensemble
    povm = load_povm(args.povm, e.dim) if args.povm else loaded.povm
    rep = RunReport("bounds", _digest(args.file, args.povm))
    reports = bound_suite(e, p_err_opt=args.p_err_opt, g_opt=args.g_opt, povm=povm,
                          p_inc=args.p_inc, samples=args.samples, seed=args.seed)
    ent = entropy_pack(e)
    rep.results = {"shannon_H": ent.shannon_H, "holevo_chi": ent.holevo_chi,
                   "lambda_lower": ent.lambda_lower, "von_neumann_S": ent.von_neumann_S}
    for r in reports:
        rep.results[r.name] = r.value
        rep.results[f"{r.name}.precondition"] = r.precondition_met
    rep.diagnostics["bounds"] = [
        {"name": r.name, "target": r.target, "side": r.side, "value": r.value,
         "precondition_met": r.precondition_met, "note": r.precondition_note,
         "reference": r.reference, "holds": r.holds} for r in reports]
    return rep


def cmd_check(args) -> RunReport:
    e = load_input(args.file).ensemble
    if args.no_measurement:
        rep = RunReport("check", _digest(args.file))
        v = check_no_measurement(e)
        rep.results = {"no_measurement_holds": v.holds, "prior_guesswork": v.prior_guesswork}
        rep.diagnostics["witness"] = list(v.witness) if v.witness else None
        rep.diagnostics["equal_probability_pairs"] = [list(p) for p in equal_probability_pairs(e)]
        return rep
    spec = load_symmetry_spec(args.symmetric, e.dim)
    rep = RunReport("check", _digest(args.file, args.symmetric))
    c = check_symmetric_optimality(e, spec["group"], spec["pi0"], spec["V"])
    rep.results = {"commutes": c.commutes, "rank_one_min": c.rank_one_min,
                   "candidate_value": c.candidate_value, "optimal": c.optimal,
                   "heuristic": c.heuristic, "value": c.value}
    return rep


def _repro_checks():
    """Closed-form reference numbers: (name, computed, expected, tolerance)."""
    t = fixtures.load_fixture("trine").ensemble
    pe = load_povm(fixtures.fixture_path("trine_sqrt_povm"))
    pg = load_povm(fixtures.fixture_path("trine_rotated_povm"))
    mgd = solve_mgd(t)
    ev_e, ev_g = conditional_guesswork(t, pe), conditional_guesswork(t, pg)
    rows = [
        ("trine.g_opt", mgd.objective, 2 - math.sqrt(3) / 3, 1e-6),
        ("trine.p_err_opt", solve_med(t).objective, 1 / 3, 1e-6),
        ("trine.sqrt_povm.guesswork", ev_e.guesswork, 1.5, 1e-9),
        ("trine.sqrt_povm.error", ev_e.error_prob, 1 / 3, 1e-9),
        ("trine.rotated_povm.guesswork", ev_g.guesswork, 2 - math.sqrt(3) / 3, 1e-9),
        ("trine.rotated_povm.error", ev_g.error_prob, 2 / 3 - math.sqrt(3) / 6, 1e-9),
        ("trine.rotated_povm.certified", float(certify(t, pg).passed), 1.0, 0.0),
        ("trine.sqrt_povm.certified", float(certify(t, pe).passed), 0.0, 0.0),
        ("trine.prior_guesswork", guesswork(t.probs), 2.0, 1e-12),
    ]
    r1 = minimize_rank_one(t)
    rows.append(("trine.rank_one_min", r1.value, 2 - math.sqrt(3) / 3, 1e-9))
    for name, alpha in (("pi/12", math.pi / 12), ("pi/4", math.pi / 4)):
        value = float(rank_one_guesswork(t, qubit_ket(alpha, 0.0))[0])
        rows.append((f"trine.rank_one_at_{name}", value, 2 - math.sqrt(3) / 3, 1e-12))
    spec = load_symmetry_spec(fixtures.fixture_path("trine_symmetry"))
    c = check_symmetric_optimality(t, spec["group"], spec["pi0"], spec["V"], rank_one=r1)
    rows.append(("trine.symmetric_check.optimal", float(c.optimal), 1.0, 0.0))
    rows.append(("trine.symmetric_check.value", c.value if c.value is not None else math.nan,
                 2 - math.sqrt(3) / 3, 1e-6))
    h = fixtures.load_fixture("helstrom_pair").ensemble
    h_err = solve_med(h).objective
    rows.append(("helstrom_pair.g_minus_err", solve_mgd(h).objective - h_err, 1.0, 1e-6))
    rows.append(("helstrom_pair.p_err_opt", h_err, (1 - 1 / math.sqrt(2)) / 2, 1e-7))
    g = fixtures.load_fixture("geometric_tail")
    ent = entropy_pack(g.ensemble)
    gq = conditional_guesswork(g.ensemble, g.povm).guesswork
    rows += [
        ("geometric_tail.H", ent.shannon_H, 13 / 4 - 0.75 * math.log2(3), 1e-6),
        ("geometric_tail.chi", ent.holevo_chi, 5 / 4 - 0.75 * math.log2(3), 1e-6),
        ("geometric_tail.guesswork", gq, 2.0, 1e-5),
        ("geometric_tail.entropy_bound", 0.25 * 2 ** (ent.shannon_H - ent.holevo_chi) + 1,
         gq, 1e-5),
    ]
    c5 = fixtures.load_fixture("complement5").ensemble
    pre = posterior_entropy_precondition(c5, samples=10_000, seed=0)
    rows.append(("complement5.min_posterior_entropy", pre.min_entropy, 2.0, 1e-9))
    ident = fixtures.load_fixture("identical_states").ensemble
    rows.append(("identical_states.g_opt", solve_mgd(ident).objective,
                 guesswork(ident.probs), 1e-6))
    return rows


def cmd_repro(args) -> RunReport:
    names = [fixtures.fixture_path(n) for n in fixtures.FIXTURE_FILES]
    rep = RunReport("repro", _digest(*names))
    table, breaches = [], []
    for name, got, want, tol in _repro_checks():
        ok = math.isfinite(got) and abs(got - want) <= tol
        if name == "complement5.min_posterior_entropy":
            ok = got >= want - tol
        table.append({"name": name, "computed": got, "expected": want, "tolerance": tol, "ok": ok})
        rep.results[name] = got
        if not ok:
            breaches.append(name)
    rep.results["all_ok"] = not breaches
    rep.diagnostics["checks"] = table
    rep.diagnostics["breaches"] = breaches
    if breaches:
        rep.exit_code = EXIT_REPRO
    return rep


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def render_text(rep: RunReport) -> str:
    lines = [f"{rep.command}  (input sha256 {rep.input_digest[:12]})"]
    width = max((len(k) for k in rep.results), default=0)
    for k, v in rep.results.items():
        lines.append(f"  {k:<{width}}  {_fmt(v)}")
    d = rep.diagnostics
    if "per_outcome" in d:
        lines.append("  outcome   weight        G(post)       P_err(post)")
        for row in d["per_outcome"]:
            lines.append(f"  {row['outcome']:>7}   {row['weight']:<12.8g}  "
                         f"{row['guesswork']:<12.8g}  {row['error']:.8g}")
    if "bounds" in d:
        lines.append("  bound                          side   value          precondition  holds")
        for b in d["bounds"]:
            holds = "-" if b["holds"] is None else _fmt(b["holds"])
            lines.append(f"  {b['name']:<30} {b['side']:<6} {b['value']:<14.10g} "
                         f"{_fmt(b['precondition_met']):<13} {holds}")
            if b["note"]:
                lines.append(f"      {b['note']}")
    if "checks" in d:
        for c in d["checks"]:
            mark = "ok  " if c["ok"] else "FAIL"
            lines.append(f"  [{mark}] {c['name']:<38} {c['computed']:.12g} "
                         f"(expected {c['expected']:.12g} +- {c['tolerance']:g})")
    if d.get("witness") is not None:
        lines.append(f"  witness pair (0-based): {tuple(d['witness'])}")
    for key in ("povm_file", "error"):
        if key in d:
            lines.append(f"  {key}: {d[key]}")
    lines.append(f"  wall time {rep.wall_time:.3f} s")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qguess",
                                description="Guesswork and discrimination of quantum ensembles.")
    p.add_argument("--json", action="store_true", help="print one JSON object")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("guesswork", help="prior or measured guesswork")
    s.add_argument("file")
    s.add_argument("--povm", help="measurement file (defaults to the file's own 'povm')")
    s.set_defaults(func=cmd_guesswork)

    s = sub.add_parser("min-guesswork", help="minimum guesswork over all measurements")
    s.add_argument("file")
    s.add_argument("--certify", action="store_true", help="recover a POVM and certify it")
    s.add_argument("--recover", nargs="?", const="-", metavar="OUT",
                   help="recover an optimal POVM (written to OUT if given)")
    s.add_argument("--oracle", action="store_true", help="cross-check with direct search")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--restarts", type=int, default=4)
    s.set_defaults(func=cmd_min_guesswork)

    s = sub.add_parser("min-error", help="minimum error probability")
    s.add_argument("file")
    s.set_defaults(func=cmd_min_error)

    s = sub.add_parser("bounds", help="analytic bounds")
    s.add_argument("file")
    s.add_argument("--p-err-opt", type=float, help="known optimal error probability")
    s.add_argument("--g-opt", type=float, help="known minimum guesswork, used as reference")
    s.add_argument("--p-inc", type=float, help="inconclusive probability of an unambiguous scheme")
    s.add_argument("--povm", help="measurement file for the conditional bounds")
    s.add_argument("--samples", type=int, default=2000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("check", help="structural optimality checks")
    s.add_argument("file")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--no-measurement", action="store_true",
                   help="can any measurement beat the prior guesswork?")
    g.add_argument("--symmetric", metavar="SPEC",
                   help="group/pi0/V file; test the rotated group measurement for optimality")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("repro", help="recompute the reference numbers of the bundled fixtures")
    s.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        rep = args.func(args)
    except (ValidationError, DegenerateOutcomeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverError, RecoveryError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    rep.wall_time = time.perf_counter() - start
    print(rep.to_json() if args.json else render_text(rep))
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""``pb``: command-line front end.

Reports go to stdout (JSON by default, ``--format text`` for key/value
lines), diagnostics to stderr.  Exit codes:

    0  success / the command's question has a positive answer
    1  negative verdict (not orthogonal, not distinguishable, unextendible)
    2  input or format error
    3  search budget exceeded
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import bounds, catalog, distinguish, extension, measurement
from .basis import BasisFormatError, basis_to_dict, load_basis, state_to_dict, validate

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

COMMANDS = ("check", "decide", "split-trace", "extend", "simulate", "classify", "bound",
            "catalog")


@dataclass
class Report:
    command: str
    fields: dict = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)
    exit_code: int = EXIT_OK

    def to_dict(self) -> dict:
        out = {"command": self.command}
        out.update(self.fields)
        out["diagnostics"] = list(self.diagnostics)
        out["exit_code"] = self.exit_code
        return out

    def render(self, fmt: str) -> str:
        doc = self.to_dict()
        if fmt == "json":
            return json.dumps(doc, indent=2) + "\n"
        lines = []
        for k, v in doc.items():
            if isinstance(v, (dict, list)):
                v = json.dumps(v, separators=(",", ":"))
            lines.append(f"{k}: {v}")
        return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pb", description="LOCC distinguishability of orthogonal product bases.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("path", nargs="?", help="basis file (catalog: entry name)")
    parser.add_argument("--tolerance", type=float, default=None)
    parser.add_argument("--budget", type=int, default=extension.DEFAULT_BUDGET)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("--party", type=int, default=None)
    parser.add_argument("--operator", default=None, help="operator file")
    parser.add_argument("--hidden", type=int, default=None)
    parser.add_argument("--delta-prime", type=float, default=None,
                        help="perturbation scale for 'bound' (overrides the file)")
    return parser


def _load(args):
    if args.path is None:
        raise BasisFormatError(f"'{args.command}' needs a basis file")
    basis = load_basis(args.path)
    if args.tolerance is not None:
        basis = basis.with_tolerance(args.tolerance)
    return basis


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise BasisFormatError(f"{path}: not valid JSON: {exc}") from None


def cmd_check(args, rep: Report):
    basis = _load(args)
    v = validate(basis)
    rep.fields.update(dims=list(basis.dims), n_states=len(basis), orthogonal=v.orthogonal,
                      complete=v.complete, offending_pairs=[list(p) for p in v.offending_pairs])
    if not v.orthogonal:
        rep.exit_code = EXIT_NEGATIVE


def _decision_fields(d) -> dict:
    if d.distinguishable:
        return {"distinguishable": True, "complete": d.complete,
                "depth": distinguish.depth(d.tree),
                "elimination_units": distinguish.elimination_units(d.tree),
                "protocol": distinguish.tree_to_dict(d.tree)}
    return {"distinguishable": False, "complete": d.complete,
            "outside_theorem_scope": d.outside_theorem_scope,
            "core_size": len(d.core), "core": list(d.core),
            "connectivity_witness": [distinguish.graph_to_dict(g)
                                     for g in d.connectivity_witness]}


def cmd_decide(args, rep: Report):
    basis = _load(args)
    d = distinguish.decide(basis)
    rep.fields.update(_decision_fields(d))
    if not d.distinguishable:
        rep.exit_code = EXIT_NEGATIVE
        if d.outside_theorem_scope:
            rep.diagnostics.append("basis is incomplete: irreducible core is structural "
                                   "evidence only (run 'extend' to test unextendibility)")


def cmd_split_trace(args, rep: Report):
    basis = _load(args)
    tree = distinguish.split_trace(basis)
    cores = [list(c.states) for c in distinguish.iter_cores(tree)]
    rep.fields.update(all_singletons=not cores, cores=cores,
                      trace=distinguish.tree_to_dict(tree))
    if cores:
        rep.exit_code = EXIT_NEGATIVE


def _extension_fields(res: extension.ExtensionResult) -> dict:
    out = {"status": res.status.value, "assignments_tried": res.assignments_tried}
    if res.witness is not None:
        out["witness"] = state_to_dict(res.witness)
    return out


def cmd_extend(args, rep: Report):
    basis = _load(args)
    res = extension.find_extension(basis, args.budget)
    rep.fields.update(_extension_fields(res))
    if res.status is extension.Status.UNEXTENDIBLE:
        rep.exit_code = EXIT_NEGATIVE
    elif res.status is extension.Status.BUDGET_EXCEEDED:
        rep.exit_code = EXIT_BUDGET
        rep.diagnostics.append(f"budget of {args.budget} assignments exhausted")


def cmd_simulate(args, rep: Report):
    basis = _load(args)
    d = distinguish.decide(basis)
    if not d.distinguishable:
        rep.fields.update(distinguishable=False, core=list(d.core))
        rep.exit_code = EXIT_NEGATIVE
        return
    hidden = range(len(basis)) if args.hidden is None else [args.hidden]
    runs = []
    for h in hidden:
        r = distinguish.simulate_protocol(d.tree, basis, h)
        runs.append({"hidden": h, "identified": r.identified, "rounds": r.rounds,
                     "outcome_path": r.outcome_path})
    rep.fields.update(distinguishable=True, runs=runs)


def _action_fields(action) -> dict:
    if isinstance(action, measurement.Proportional):
        return {"action": "proportional", "scale": action.scale}
    if isinstance(action, measurement.Eliminates):
        return {"action": "eliminates", "killed": list(action.killed),
                "rest_proportional": action.rest_proportional}
    if isinstance(action, measurement.CreatesOverlap):
        return {"action": "creates_overlap", "delta": action.delta, "pair": list(action.pair)}
    return {"action": "preserves_orthogonality"}


def cmd_classify(args, rep: Report):
    basis = _load(args)
    if args.operator is None:
        c = extension.classify(basis, args.budget)
        rep.fields.update(orthogonal=c.orthogonal, complete=c.complete,
                          extendible=c.extendible, proper_upb=c.proper_upb)
        if c.extension is not None:
            rep.fields["extension"] = _extension_fields(c.extension)
        if c.extension is not None and c.extension.status is extension.Status.BUDGET_EXCEEDED:
            rep.exit_code = EXIT_BUDGET
        return
    op = measurement.operator_from_dict(_read_json(args.operator), args.party)
    action = measurement.classify_action(op, basis)
    rep.fields.update(party=op.party, **_action_fields(action))
    try:
        post = measurement.posterior(op, basis)
    except ValueError as exc:
        rep.diagnostics.append(str(exc))
    else:
        rep.fields.update(posteriors=post, epsilon=measurement.epsilon(post))


def _rounds_from_doc(doc, dims, party):
    """Accept one operator, a list of operators (one round) or a rounds object."""
    delta_prime = 1e-3
    if isinstance(doc, dict) and "rounds" in doc:
        delta_prime = doc.get("delta_prime", delta_prime)
        raw_rounds = doc["rounds"]
    elif isinstance(doc, list):
        raw_rounds = [doc]
    else:
        raw_rounds = [[doc]]
    rounds = []
    for raw in raw_rounds:
        row = [None] * len(dims)
        for item in raw:
            op = measurement.operator_from_dict(item, party)
            if op.party >= len(dims):
                raise IndexError(f"party {op.party} out of range")
            row[op.party] = op.matrix
        rounds.append(tuple(row))
    return rounds, delta_prime


def cmd_bound(args, rep: Report):
    basis = _load(args)
    if args.operator is None:
        raise BasisFormatError("'bound' needs --operator")
    rounds, dp = _rounds_from_doc(_read_json(args.operator), basis.dims, args.party)
    if args.delta_prime is not None:
        dp = args.delta_prime
    r = bounds.weak_round_bound(bounds.RoundOperators(tuple(rounds), dp), basis)
    rep.fields.update(status=r.status, delta_prime=dp, delta=r.delta,
                      epsilon_observed=r.epsilon_observed, epsilon_bound=r.epsilon_bound,
                      epsilon_first_order=r.epsilon_first_order, M_N=r.M_N, c_N=r.c_N,
                      deficit=r.deficit, info_ceiling=r.info_ceiling,
                      positive_gauge=r.positive_gauge)
    if not r.positive_gauge:
        rep.diagnostics.append("some <psi|O(N)|psi> < 0: the bounds assume nonnegative "
                               "diagonal elements; add a multiple of I to the perturbations")
    if r.status == "no_bound":
        rep.diagnostics.append("O(N) is diagonal on the basis: no overlap bound on epsilon")


def cmd_catalog(args, rep: Report):
    if args.path is None:
        rep.fields["entries"] = list(catalog.NAMES)
        return
    name = args.path
    if name.startswith("random:"):
        dims = [int(x) for x in name[len("random:"):].split("x")]
        basis = catalog.random_distinguishable(dims, args.seed)
        rep.fields.update(name=name, seed=args.seed)
    else:
        entry = catalog.builtin(name)
        basis = entry.basis
        rep.fields.update(name=name, expected={"complete": entry.complete,
                                               "proper_upb": entry.proper_upb,
                                               "locc_distinguishable":
                                                   entry.locc_distinguishable})
    if args.tolerance is not None:
        basis = basis.with_tolerance(args.tolerance)
    rep.fields["basis"] = basis_to_dict(basis)


HANDLERS = {
    "check": cmd_check, "decide": cmd_decide, "split-trace": cmd_split_trace,
    "extend": cmd_extend, "simulate": cmd_simulate, "classify": cmd_classify,
    "bound": cmd_bound, "catalog": cmd_catalog,
}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> Report:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        rep = Report("usage", exit_code=EXIT_OK if exc.code == 0 else EXIT_INPUT)
        return rep
    rep = Report(args.command)
    try:
        HANDLERS[args.command](args, rep)
    except (OSError, ValueError, KeyError, IndexError) as exc:
        # NotOrthogonalError, DimensionError and BasisFormatError land here too
        kind = type(exc).__name__
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        rep.fields = {"error": kind, "message": str(msg)}
        rep.diagnostics.append(f"{kind}: {msg}")
        rep.exit_code = EXIT_INPUT
    stdout.write(rep.render(args.format))
    for line in rep.diagnostics:
        print(line, file=stderr)
    return rep


def main(argv: list[str] | None = None) -> int:
    return run(argv).exit_code


if __name__ == "__main__":
    raise SystemExit(main())


"""Command line front end.

Ray numbers on the command line and in printed output are 1-based (x1..xn,
D1..Dn); fan files and certificates use 0-based indices.

Exit codes: 0 success, 1 invalid input, 2 internal consistency failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import fanfile
from .blowup import blowup_edges, propagate
from .catalog import builtin_catalog
from .chow import RankDeficiency, intersection_number
from .fan import FanError, primitive_collections, primitive_relation, validate
from .lattice import NotABasis
from .obstruction import Mode, Status, certify, format_trace
from .picard import basis_relations, format_relation
from .replay import ReplayError, replay

CSV_HEADER = ["type", "rays", "mode", "verdict", "rule", "source"]


class InputError(Exception):
    pass


def _indices(values, n, what="ray") -> list[int]:
    out = []
    for v in values:
        try:
            k = int(v)
        except ValueError:
            raise InputError(f"{what} number {v!r} is not an integer") from None
        if not 1 <= k <= n:
            raise InputError(f"{what} number {k} out of range 1..{n}")
        out.append(k - 1)
    return out


def _load(path):
    try:
        return fanfile.load_fan(path)
    except fanfile.FanFileError as exc:
        raise InputError(str(exc)) from None


def cmd_validate(args, out):
    fan, _ = _load(args.fan)
    report = validate(fan)
    print(f"{fan.name}: {'valid' if report.valid else 'invalid'}", file=out)
    print(report, file=out)
    return 0 if report.valid else 1


def _require_valid(fan):
    report = validate(fan)
    if not report.valid:
        raise InputError(f"{fan.name}: " + "; ".join(report.problems))


def cmd_collections(args, out):
    fan, _ = _load(args.fan)
    _require_valid(fan)
    for pc in primitive_collections(fan):
        print(primitive_relation(fan, pc).format(), file=out)
    return 0


def cmd_relations(args, out):
    fan, _ = _load(args.fan)
    _require_valid(fan)
    basis = _indices(args.basis.split(","), fan.n)
    if len(basis) != 4:
        raise InputError("--basis needs exactly four ray numbers")
    try:
        rels = basis_relations(fan, basis)
    except NotABasis:
        raise InputError("the chosen rays are not a basis of the lattice") from None
    for k, r in enumerate(rels, 1):
        print(f"({k}) {format_relation(r)}", file=out)
    return 0


def cmd_intersect(args, out):
    fan, _ = _load(args.fan)
    _require_valid(fan)
    idx = _indices(args.indices, fan.n)
    print(intersection_number(fan, idx), file=out)
    return 0


def _write_cert(path, verdict):
    fanfile.write_atomic(path, json.dumps(verdict.certificate, indent=2, sort_keys=True) + "\n")


def cmd_certify(args, out):
    fan, ff = _load(args.fan)
    verdict = certify(fan, args.mode, ff.chow_hint)
    print(verdict.summary(), file=out)
    if args.trace:
        text = format_trace(verdict)
        if text:
            print(text, file=out)
    if args.cert:
        _write_cert(args.cert, verdict)
    return 0


def cmd_replay(args, out):
    try:
        cert = json.loads(Path(args.cert).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read certificate: {exc}") from None
    try:
        replay(cert)
    except (ReplayError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"certificate rejected: {exc}") from None
    print("ok", file=out)
    return 0


def _work(job):
    label, fan_doc, mode = job
    ff = fanfile.parse(fan_doc)
    return label, mode, certify(ff.to_fan(), mode, ff.chow_hint)


def _gather(extra_dir):
    """(label, fan file text) for the builtin catalog plus *.json in extra_dir."""
    items = {}
    for e in builtin_catalog():
        items[e.type_label] = fanfile.serialize(fanfile.FanFile.from_entry(e))
    if extra_dir:
        d = Path(extra_dir)
        if not d.is_dir():
            raise InputError(f"{extra_dir} is not a directory")
        for p in sorted(d.glob("*.json")):
            fan, ff = _load(p)
            _require_valid(fan)
            if not validate(fan).projective:
                raise InputError(f"{p}: fan is not projective")
            if ff.name in items:
                raise InputError(f"{p}: type label {ff.name!r} already in the catalog")
            items[ff.name] = fanfile.serialize(ff)
    return items


def _source(v):
    if v.status == Status.INCONCLUSIVE:
        return "-"
    if v.propagated_from:
        return "propagated:" + "<-".join(reversed(v.propagated_from))
    if "NonPropagable" in v.tags:
        return "direct;non-propagable"
    return "direct"


def cmd_certify_all(args, out):
    items = _gather(args.dir)
    fans = {k: fanfile.parse(t).to_fan() for k, t in items.items()}
    modes = [Mode(m) for m in (args.modes or ["finite", "embedding"])]
    jobs = [(k, items[k], m.value) for k in sorted(items) for m in modes]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_work, jobs))
    else:
        results = [_work(j) for j in jobs]
    catalog = [fans[k] for k in sorted(fans)]
    edges = blowup_edges(catalog)
    rows = []
    for m in modes:
        seeds = {label: v for label, mode, v in results if mode == m.value}
        final = propagate(catalog, edges, seeds)
        for label in sorted(fans):
            v = final[label]
            rows.append([label, fans[label].n, m.value, v.status.value, v.rule or "-", _source(v)])
            if args.cert_dir:
                Path(args.cert_dir).mkdir(parents=True, exist_ok=True)
                safe = "".join(ch if ch.isalnum() or ch in "-_=" else "_" for ch in label)
                _write_cert(Path(args.cert_dir) / f"{safe}.{m.value}.json", v)
    width = max(len(r[0]) for r in rows)
    for r in rows:
        print(f"{r[0]:<{width}}  {r[1]:>2}  {r[2]:<9}  {r[3]:<16}  {r[4]:<24}  {r[5]}", file=out)
    if edges:
        print(f"{len(edges)} blow-up edge(s):", file=out)
        for e in edges:
            print(f"  {e.fine} -> {e.coarse} at (x{e.center[0] + 1},x{e.center[1] + 1})", file=out)
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(rows)
        if args.csv == "-":
            out.write(buf.getvalue())
        else:
            fanfile.write_atomic(args.csv, buf.getvalue())
    return 0


def cmd_catalog_list(args, out):
    for e in builtin_catalog():
        print(f"{e.type_label:<16} {e.fan.n:>2} rays  {e.provenance}", file=out)
    return 0


def cmd_catalog_export(args, out):
    d = Path(args.dir)
    d.mkdir(parents=True, exist_ok=True)
    for e in builtin_catalog():
        safe = "".join(ch if ch.isalnum() or ch in "-_=" else "_" for ch in e.type_label)
        fanfile.write_atomic(d / f"{safe}.json", fanfile.serialize(fanfile.FanFile.from_entry(e)))
    print(f"wrote {len(builtin_catalog())} fan files to {d}", file=out)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage problems are invalid input, not internal failures
        self.exit(1, f"error: invalid-input: {_one_line(message)}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toricobs", description=(
        "Obstructions to abelian surfaces in smooth complete toric 4-folds."))
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check smoothness, completeness and projectivity")
    s.add_argument("fan")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("collections", help="primitive collections with their relations")
    s.add_argument("fan")
    s.set_defaults(func=cmd_collections)

    s = sub.add_parser("relations", help="the four divisor relations for a ray basis")
    s.add_argument("fan")
    s.add_argument("--basis", required=True, help="four 1-based ray numbers, e.g. 1,2,4,6")
    s.set_defaults(func=cmd_relations)

    s = sub.add_parser("intersect", help="degree of D_i D_j D_k D_l (1-based)")
    s.add_argument("fan")
    s.add_argument("indices", nargs=4)
    s.set_defaults(func=cmd_intersect)

    s = sub.add_parser("certify", help="run the obstruction engine")
    s.add_argument("fan")
    s.add_argument("--mode", choices=[m.value for m in Mode], default="finite")
    s.add_argument("--cert", help="write the certificate here (JSON)")
    s.add_argument("--trace", action="store_true", help="print the derivation")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("replay", help="re-check a certificate independently")
    s.add_argument("cert")
    s.set_defaults(func=cmd_replay)

    cat = sub.add_parser("catalog", help="built-in catalog")
    csub = cat.add_subparsers(dest="catalog_command", required=True)
    s = csub.add_parser("certify-all", help="certify every fan and propagate through blow-ups")
    s.add_argument("--dir", help="extra fan files (*.json) to include")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--csv", help="write the table as CSV ('-' for stdout)")
    s.add_argument("--cert-dir", help="write one certificate per fan and mode")
    s.add_argument("--mode", dest="modes", action="append", choices=[m.value for m in Mode],
                   help="restrict to one mode (repeatable); default both")
    s.set_defaults(func=cmd_certify_all)
    s = csub.add_parser("list", help="list the built-in fans")
    s.set_defaults(func=cmd_catalog_list)
    s = csub.add_parser("export", help="write the built-in fans as fan files")
    s.add_argument("dir")
    s.set_defaults(func=cmd_catalog_export)
    return p


def _one_line(msg) -> str:
    return " ".join(str(msg).split())


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("error: invalid-input: --jobs must be at least 1", file=sys.stderr)
        return 1
    try:
        return args.func(args, out)
    except (InputError, FanError, fanfile.FanFileError) as exc:
        print(f"error: invalid-input: {_one_line(exc)}", file=sys.stderr)
        return 1
    except (RankDeficiency, AssertionError, ReplayError) as exc:
        print(f"error: internal: {type(exc).__name__}: {_one_line(exc)}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

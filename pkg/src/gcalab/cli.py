"""Command-line entry point: ``gcalab <command> ...``.

Exit codes: 0 success, 2 input error, 3 instance budget exceeded,
4 theorem violation (a library defect). Errors are reported on stderr as a
JSON object ``{"error": {...}}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .eca import EcaRule, eca_mirror, eca_run, mirror_via_inversion, raster_reversal_agrees, raster_to_pgm
from .errors import BudgetExceeded, GcaError, StructureError, TheoremViolation
from .groups import enumerate_homs, parse_group
from .monoid import RULE_BUDGET, catalogs_summary_csv, enumerate_ca, enumerate_gca
from .verify import THEOREMS, run_theorem

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_VIOLATION = 4

FORMATS = ("json", "csv", "pgm", "text")


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    alphabet: int = 2
    rule_budget: int = RULE_BUDGET
    format: str = "json"
    output: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.alphabet < 2:
            raise StructureError(f"alphabet size must be at least 2, got {self.alphabet}")
        if self.rule_budget <= 0:
            raise StructureError("budgets must be positive")
        if self.format not in FORMATS:
            raise StructureError(f"format must be one of {', '.join(FORMATS)}")


class _InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _InputError(message)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(cfg: RunConfig, payload: str | bytes):
    if cfg.output:
        path = Path(cfg.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload if isinstance(payload, bytes) else payload.encode())
    elif isinstance(payload, bytes):
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    else:
        sys.stdout.write(payload)


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _unsupported(cfg: RunConfig):
    raise StructureError(f"format {cfg.format!r} not supported by {cfg.command}")


# --- commands ------------------------------------------------------------------------


def cmd_group(cfg: RunConfig) -> int:
    p = cfg.params
    spec = f"Z{p['cyclic']}" if p.get("cyclic") is not None else p.get("spec")
    if spec is None:
        raise StructureError("give --cyclic N or a group spec")
    G = parse_group(spec)
    if cfg.format == "json":
        _emit(cfg, _dump({**G.to_json(), "seed": cfg.seed}))
    elif cfg.format == "csv":
        _emit(cfg, _csv([["g"] + [f"h{j}" for j in range(G.order)]] + [[i, *row] for i, row in enumerate(G.mul.tolist())]))
    elif cfg.format == "text":
        _emit(cfg, f"{G.label} order {G.order}\n" + "".join(" ".join(map(str, r)) + "\n" for r in G.mul.tolist()))
    else:
        _unsupported(cfg)
    return EXIT_OK


def cmd_homs(cfg: RunConfig) -> int:
    H, G = parse_group(cfg.params["source"]), parse_group(cfg.params["target"])
    homs = enumerate_homs(H, G)
    maps = [list(h.map) for h in homs]
    if cfg.format == "json":
        _emit(cfg, _dump({"from": H.label, "to": G.label, "count": len(maps), "homs": maps, "seed": cfg.seed}))
    elif cfg.format == "csv":
        _emit(cfg, _csv([["hom"] + [f"h{j}" for j in range(H.order)]] + [[k, *m] for k, m in enumerate(maps)]))
    elif cfg.format == "text":
        _emit(cfg, f"{len(maps)} homs {H.label} -> {G.label}\n" + "".join(" ".join(map(str, m)) + "\n" for m in maps))
    else:
        _unsupported(cfg)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    p = cfg.params
    grp = lambda key: parse_group(p[key]) if p.get(key) else None  # noqa: E731
    cert = run_theorem(
        p["theorem"],
        group=grp("group"),
        source=grp("source"),
        target=grp("target"),
        q=cfg.alphabet,
        seed=cfg.seed,
        samples=p.get("samples"),
        rule_budget=cfg.rule_budget,
    )
    if cfg.format == "json":
        _emit(cfg, cert.dumps())
    elif cfg.format == "text":
        _emit(cfg, cert.summary_line() + "\n")
    elif cfg.format == "csv":
        rows = [["clause", "holds"]] + [[k, v] for k, v in cert.clauses.items()]
        _emit(cfg, _csv(rows))
    else:
        _unsupported(cfg)
    return EXIT_OK if cert.ok else EXIT_VIOLATION


def _parse_initial(text: str | None, width: int):
    if text is None:
        return None
    cells = [c for c in text.strip() if c not in " ,"]
    if len(cells) != width or any(c not in "01" for c in cells):
        raise StructureError(f"--initial must be {width} characters from 0/1")
    return np.array([int(c) for c in cells], dtype=np.uint8)


def _raster_text(raster) -> str:
    return "".join("".join("#" if v else "." for v in row) + "\n" for row in raster.tolist())


def _raster_csv(raster, rule) -> list:
    return [[rule, t, *row] for t, row in enumerate(raster.tolist())]


def _sibling(path: str, tag: str) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}-{tag}{p.suffix}")


def cmd_eca(cfg: RunConfig) -> int:
    p = cfg.params
    rule = EcaRule(p["rule"])
    width, steps = p["width"], p["steps"]
    initial = _parse_initial(p.get("initial"), width)
    raster = eca_run(rule, width, steps, initial)
    report = {"rule": rule.number, "width": width, "steps": steps, "initial": raster[0].tolist(), "seed": cfg.seed}
    mirrored = None
    if p.get("mirror"):
        m = eca_mirror(rule)
        mirrored = eca_run(m, width, steps, raster[0][::-1].copy())
        report["mirror"] = {
            "rule": m.number,
            "reversal_agrees": raster_reversal_agrees(rule, width, steps, raster[0]),
            "inversion_agrees": mirror_via_inversion(rule, 5),
        }
    files = []
    if cfg.format == "pgm":
        if not cfg.output:
            raise StructureError("pgm output needs --output PATH")
        _emit(cfg, raster_to_pgm(raster))
        files.append(cfg.output)
        if mirrored is not None:
            side = _sibling(cfg.output, "mirror")
            side.write_bytes(raster_to_pgm(mirrored))
            files.append(str(side))
    elif cfg.format == "json":
        report["raster"] = raster.tolist()
        if mirrored is not None:
            report["mirror"]["raster"] = mirrored.tolist()
    elif cfg.format == "csv":
        rows = [["rule", "step"] + [f"c{j}" for j in range(width)]] + _raster_csv(raster, rule.number)
        if mirrored is not None:
            rows += _raster_csv(mirrored, report["mirror"]["rule"])
        _emit(cfg, _csv(rows))
        if cfg.output:
            files.append(cfg.output)
    else:
        text = _raster_text(raster)
        if mirrored is not None:
            m = report["mirror"]
            text += (f"mirror {m['rule']} reversal_agrees={m['reversal_agrees']} "
                     f"inversion_agrees={m['inversion_agrees']}\n") + _raster_text(mirrored)
        _emit(cfg, text)
        if cfg.output:
            files.append(cfg.output)
    if p.get("figure"):
        from .plotting import plot_mirror_pair, plot_raster

        if mirrored is None:
            plot_raster(raster, p["figure"], title=f"rule {rule.number}")
        else:
            plot_mirror_pair(raster, mirrored, p["figure"], rule.number, report["mirror"]["rule"])
        files.append(p["figure"])
    report["files"] = files
    if cfg.format == "json":
        _emit(cfg, _dump(report))
    elif cfg.format == "pgm":
        sys.stdout.write(_dump(report))
    ok = mirrored is None or (report["mirror"]["reversal_agrees"] and report["mirror"]["inversion_agrees"])
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_catalog(cfg: RunConfig) -> int:
    p = cfg.params
    G = parse_group(p["group"])
    ca = enumerate_ca(G, cfg.alphabet, rule_budget=cfg.rule_budget)
    gca = enumerate_gca(G, cfg.alphabet, ca=ca)
    catalogs = {"CA": ca, "ICA": ca.units_catalog("ICA"), "GCA": gca, "IGCA": gca.units_catalog("IGCA")}
    kind = p.get("kind") or "all"
    chosen = list(catalogs.values()) if kind == "all" else [catalogs[kind]]
    if cfg.format == "csv":
        _emit(cfg, catalogs_summary_csv(chosen))
    elif cfg.format == "json":
        if kind == "all":
            body = {"seed": cfg.seed, "catalogs": [
                {"instance": c.label, "kind": c.kind, "size": c.size, "units": len(c.units)} for c in chosen
            ]}
        else:
            body = {**chosen[0].to_json(), "seed": cfg.seed}
        _emit(cfg, json.dumps(body) + "\n")
    elif cfg.format == "text":
        _emit(cfg, "".join(f"{c.label}\t{c.size}\t{len(c.units)}\n" for c in chosen))
    else:
        _unsupported(cfg)
    if p.get("figure"):
        from .plotting import plot_catalog_counts

        plot_catalog_counts([(c.label, c.size, len(c.units)) for c in chosen], p["figure"])
    return EXIT_OK


COMMANDS = {"group": cmd_group, "homs": cmd_homs, "verify": cmd_verify, "eca": cmd_eca, "catalog": cmd_catalog}


# --- argument parsing ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks (recorded in reports)")
    common.add_argument("--alphabet", "-q", type=int, default=2)
    common.add_argument("--rule-budget", type=int, default=RULE_BUDGET,
                        help="max number of local rules enumerated for a catalog")

    ap = _Parser(prog="gcalab", description="Generalized cellular automata over finite groups.")
    ap.add_argument("--version", action="version", version=f"gcalab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("group", parents=[common], help="print a Cayley table")
    g.add_argument("spec", nargs="?", help="Z6, Z2xZ3, D4, S3 or inline JSON")
    g.add_argument("--cyclic", type=int)

    h = sub.add_parser("homs", parents=[common], help="list homomorphisms H -> G")
    h.add_argument("--from", dest="source", required=True)
    h.add_argument("--to", dest="target", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a theorem check and print its certificate")
    v.add_argument("theorem", choices=list(THEOREMS))
    v.add_argument("--group")
    v.add_argument("--from", dest="source")
    v.add_argument("--to", dest="target")
    v.add_argument("--samples", type=int)

    e = sub.add_parser("eca", parents=[common], help="elementary CA raster on a cyclic row")
    e.add_argument("--rule", type=int, required=True)
    e.add_argument("--width", type=int, default=64)
    e.add_argument("--steps", type=int, default=32)
    e.add_argument("--initial", help="initial row as a 0/1 string; default a single 1 in the middle")
    e.add_argument("--mirror", action="store_true")
    e.add_argument("--figure", help="also render a PNG here")

    c = sub.add_parser("catalog", parents=[common], help="enumerate CA/ICA/GCA/IGCA")
    c.add_argument("--group", required=True)
    c.add_argument("--kind", choices=["all", "CA", "ICA", "GCA", "IGCA"], default="all")
    c.add_argument("--figure", help="also render a bar chart here")
    return ap


_DEFAULT_FORMAT = {"group": "json", "homs": "json", "verify": "json", "eca": "text", "catalog": "csv"}


def parse_config(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    fmt = ns.pop("format") or _DEFAULT_FORMAT[command]
    return RunConfig(
        command=command,
        alphabet=ns.pop("alphabet"),
        rule_budget=ns.pop("rule_budget"),
        format=fmt,
        output=ns.pop("output"),
        seed=ns.pop("seed"),
        params=ns,
    )


def _error(kind: str, exc: Exception, **extra) -> str:
    return json.dumps({"error": {"type": kind, "message": str(exc), **extra}}) + "\n"


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        return COMMANDS[cfg.command](cfg)
    except BudgetExceeded as exc:
        sys.stderr.write(_error("budget", exc, needed=exc.needed, budget=exc.budget))
        return EXIT_BUDGET
    except TheoremViolation as exc:
        sys.stderr.write(_error("theorem-violation", exc))
        return EXIT_VIOLATION
    except (_InputError, GcaError, ValueError, KeyError, OSError) as exc:
        sys.stderr.write(_error("input", exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: construct, verify, affine, gauss-checks, render."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import affine as aff
from .charsum import (
    eisenstein_check,
    gauss_norm_check,
    hasse_davenport_check,
    stickelberger_pair_check,
)
from .clclass import build_bundle, bundle_from_dict, check_residue, conic_index_set
from .errors import BadResidue, CameronLieblerError, ConfigError, MalformedReport
from .geometry import Tower
from .gf import build_field, prime_power
from .report import REPORT_SCHEMA, CertReport
from .verify import CHECKS, DEFAULT_SEED, run_checks

log = logging.getLogger("cameronliebler")

SET_SCHEMA = "certreport-set/1"
ALL_CHECKS = list(CHECKS)


@dataclass
class RunConfig:
    command: str
    q: int | None = None
    e: int | None = None
    d0: int | None = None
    beta: int = 1
    modulus: tuple[int, ...] | None = None
    seed: int = DEFAULT_SEED
    trials: int = 10
    checks: list[str] = field(default_factory=list)
    bundle: Path | None = None
    out: Path | None = None
    report: Path | None = None
    lemmas: bool = False

    def validate(self) -> None:
        if self.command == "construct":
            if self.q is None:
                raise ConfigError("--q is required")
            try:
                check_residue(self.q)
            except BadResidue as exc:
                raise ConfigError(str(exc)) from None
            if prime_power(self.q) is None:
                raise ConfigError("q must be a prime power")
        if self.command == "affine" and (self.e is None or self.e < 1):
            raise ConfigError("e must be a positive integer (q = 3^(2e))")
        if self.trials <= 0:
            raise ConfigError("trials must be positive")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ConfigError(f"unknown checks {unknown}; choose from {ALL_CHECKS} or 'all'")


def dump_json(data, path: Path | None) -> None:
    text = json.dumps(data, sort_keys=True, indent=1) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def report_set(command: str, reports: list[CertReport], **header) -> dict:
    return {
        "schema": SET_SCHEMA,
        "command": command,
        "pass": all(r.passed for r in reports),
        "reports": [r.to_dict() for r in reports],
        **header,
    }


def _emit(cfg: RunConfig, command: str, reports: list[CertReport], **header) -> int:
    data = report_set(command, reports, **header)
    if cfg.report is not None:
        dump_json(data, cfg.report)
    print(render(data))
    return 0 if data["pass"] else 1


def cmd_construct(cfg: RunConfig) -> int:
    tower = Tower(cfg.q, cfg.modulus)
    d0 = cfg.d0 if cfg.d0 is not None else conic_index_set(tower)[0]
    bundle = build_bundle(cfg.q, d0, cfg.beta, tower=tower)
    dump_json(bundle.to_dict(), cfg.out)
    log.info("q=%d: |D|=%d |M|=%d |L|=%d", cfg.q, bundle.D.size, bundle.M.size, bundle.L.size)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.bundle is not None:
        bundle = bundle_from_dict(json.loads(cfg.bundle.read_text()))
    elif cfg.q is not None:
        bundle = build_bundle(cfg.q, cfg.d0, cfg.beta, cfg.modulus)
    else:
        raise ConfigError("verify needs --bundle or --q")
    if not cfg.checks:
        log.warning("no checks selected")
        return _emit(cfg, "verify", [], q=bundle.q)
    reports = run_checks(bundle, cfg.checks, cfg.seed, cfg.trials)
    return _emit(cfg, "verify", reports, q=bundle.q)


def cmd_affine(cfg: RunConfig) -> int:
    S = aff.build_K(cfg.e)
    if cfg.out is not None:
        dump_json(S.to_dict(), cfg.out)
    reports = [aff.line_profile(S), aff.complement_profile(S)]
    if cfg.lemmas:
        reports += aff.lemma_suite(S.model)
        reports.append(aff.hilbert90_square_check(cfg.e, S.model))
        reports.append(aff.association_scheme_check(S))
    return _emit(cfg, "affine", reports, e=cfg.e, m=S.m, n=S.n, size=int(S.K.size))


def gauss_suite() -> list[CertReport]:
    """Small-field identities for Gauss, Eisenstein and Stickelberger."""
    F9, F81 = build_field(3, 2), build_field(3, 4)
    F125, F729 = build_field(5, 3), build_field(3, 6)
    out = [
        gauss_norm_check(4, 1, F9),
        gauss_norm_check(8, 3, F81),
        gauss_norm_check(31, 2, F125),
        eisenstein_check(31, 1, F125, F125.subfield(1)),
        eisenstein_check(4, 1, F125, F125.subfield(1)),
        eisenstein_check(8, 1, F729, F729.subfield(2)),
        hasse_davenport_check(2, 4, 1, F9),
        hasse_davenport_check(2, 62, 1, F125),
    ]
    for q in (9, 81):
        for j in (1, 3):
            out.append(stickelberger_pair_check(q, j))
    return out


def cmd_gauss(cfg: RunConfig) -> int:
    return _emit(cfg, "gauss-checks", gauss_suite())


def load_reports(data) -> list[CertReport]:
    if not isinstance(data, dict):
        raise MalformedReport("report file must hold a JSON object")
    if data.get("schema") == SET_SCHEMA:
        if not isinstance(data.get("reports"), list):
            raise MalformedReport("report set without a reports list")
        return [CertReport.from_dict(r) for r in data["reports"]]
    if data.get("schema") == REPORT_SCHEMA:
        return [CertReport.from_dict(data)]
    raise MalformedReport(f"unknown report schema {data.get('schema')!r}")


def _cell(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def render(data) -> str:
    """Plain-text table: one block per check with its histogram rows."""
    reports = load_reports(data)
    if not reports:
        return "no checks selected"
    lines = []
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.check_name}  {_cell(r.parameters)}  ({r.runtime_ms:.0f} ms)")
        lines.append(f"      expected: {_cell(r.expected)}")
        for row in r.observed_histogram:
            if isinstance(row, list) and len(row) == 2:
                lines.append(f"      {_cell(row[0]):>24}  {_cell(row[1])}")
            else:
                lines.append(f"      {_cell(row)}")
        if r.witness is not None:
            lines.append(f"      witness: {_cell(r.witness)}")
    return "\n".join(lines)


def cmd_render(cfg: RunConfig) -> int:
    if cfg.report is None:
        raise ConfigError("render needs a report file")
    try:
        data = json.loads(cfg.report.read_text())
    except json.JSONDecodeError as exc:
        raise MalformedReport(f"not JSON: {exc}") from exc
    reports = load_reports(data)
    print(render(data))
    return 0 if all(r.passed for r in reports) else 1


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "affine": cmd_affine,
    "gauss-checks": cmd_gauss,
    "render": cmd_render,
}


def run(cfg: RunConfig) -> int:
    cfg.validate()
    return COMMANDS[cfg.command](cfg)


def _parse_modulus(text: str) -> tuple[int, ...]:
    return tuple(int(c) for c in text.split(","))


def _parse_checks(text: str) -> list[str]:
    names = [c.strip() for c in text.split(",") if c.strip()]
    if names == ["all"]:
        return list(ALL_CHECKS)
    return names


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    parser = argparse.ArgumentParser(prog="cameronliebler", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build the line class and write it as JSON")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d0", default="auto", help="tangent index in I_Q, or 'auto' for the least")
    p.add_argument("--beta", type=int, default=1, help="nonzero square of GF(q), as an index code")
    p.add_argument("--modulus", type=_parse_modulus, help="c0,c1,...,1 for GF(q^3)")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("verify", parents=[common], help="certify a bundle")
    p.add_argument("--bundle", type=Path)
    p.add_argument("--q", type=int, help="build in memory instead of reading --bundle")
    p.add_argument("--checks", type=_parse_checks, default=list(ALL_CHECKS),
                   help="comma list from " + ",".join(ALL_CHECKS) + ", or 'all'")
    p.add_argument("--report", type=Path)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=10)

    p = sub.add_parser("affine", parents=[common], help="two-intersection set in AG(2, 3^(2e))")
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--out", type=Path)
    p.add_argument("--report", type=Path)
    p.add_argument("--lemmas", action="store_true",
                   help="also run the exhaustive character-sum checks (practical for e=1)")

    p = sub.add_parser("gauss-checks", parents=[common], help="Gauss, Eisenstein, Hasse-Davenport, digit sums")
    p.add_argument("--report", type=Path)

    p = sub.add_parser("render", parents=[common], help="print a report file as a table")
    p.add_argument("report", type=Path)
    return parser


def config_from_args(args) -> RunConfig:
    d0 = getattr(args, "d0", None)
    if d0 is not None:
        d0 = None if d0 == "auto" else int(d0)
    return RunConfig(
        command=args.command,
        q=getattr(args, "q", None),
        e=getattr(args, "e", None),
        d0=d0,
        beta=getattr(args, "beta", 1),
        modulus=getattr(args, "modulus", None),
        seed=getattr(args, "seed", DEFAULT_SEED),
        trials=getattr(args, "trials", 10),
        checks=getattr(args, "checks", []),
        bundle=getattr(args, "bundle", None),
        out=getattr(args, "out", None),
        report=getattr(args, "report", None),
        lemmas=getattr(args, "lemmas", False),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return run(config_from_args(args))
    except (CameronLieblerError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line pipeline: certify -> build-spec -> colour / redcheck /
scan-line / search-m / discrepancy / etk / weyl / lemma1-check.

Every JSON report embeds its run manifest (command, parameters, seed, spec
hash, tool version); identical argv therefore reproduces byte-identical
reports.  Wall time goes to stderr so it cannot perturb reproducibility.

Exit codes: 0 success, 1 precondition error, 2 property violation found
(which would falsify the implementation, not the theorem), 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import __version__, kernels
from . import numfield as nf
from .builder import ColoringSpec, build_spec
from .certify import ConfigurationX, compute_certificate
from .coloring import colour_norm, floors_norm
from .equidist import (
    DiscrepancyReport,
    DiscrepancySizeError,
    discrepancy_bracket,
    discrepancy_exact,
    etk_bound,
    lemma1_check,
    weyl_sum,
)
from .lineseq import (
    LineParams,
    SamplingPlan,
    default_ranges,
    empirical_m,
    first_red_scan,
    torus_sequence,
)
from .redcheck import scan_for_red_copies

EXIT_OK = 0
EXIT_PRECONDITION = 1
EXIT_PROPERTY_VIOLATION = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 64, not argparse's 2
        raise UsageError(message)


def _sha256_file(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Embedded in every report; identical manifests imply identical reports.

    Wall time is deliberately absent (reported on stderr instead): it would
    break byte-identical reproduction of otherwise identical runs.
    """

    command: str
    params: dict
    seed: int | None
    spec_hash: str | None
    version: str
    kernel_backend: str

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "spec_hash": self.spec_hash,
            "version": self.version,
            "kernel_backend": self.kernel_backend,
        }


def _manifest(command: str, args: argparse.Namespace, spec_path=None) -> RunManifest:
    params = {}
    for key, value in sorted(vars(args).items()):
        if key in ("command",):
            continue
        if isinstance(value, Fraction):
            value = str(value)
        params[key] = value
    return RunManifest(
        command=command,
        params=params,
        seed=getattr(args, "seed", None),
        spec_hash=_sha256_file(spec_path) if spec_path else None,
        version=__version__,
        kernel_backend=kernels.backend_name(),
    )


def _emit(payload: dict, out_path: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_real(text: str) -> float | Fraction:
    """Rational if it looks exact ('1/3', '2'), double otherwise ('0.5')."""
    t = text.strip()
    if "/" in t or ("." not in t and "e" not in t.lower()):
        return Fraction(t)
    return float(t)


def _parse_point(text: str) -> list:
    t = text.strip()
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    parts, depth, cur = [], 0, []
    for ch in t:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return [nf.parse(p) for p in parts]


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def build_parser() -> _Parser:
    parser = _Parser(prog="rcl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="non-sphericity certificate for a configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--out")

    p = sub.add_parser("build-spec", help="full colouring construction from a configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--out")

    p = sub.add_parser("colour", help="colour a squared norm or a point")
    p.add_argument("--spec", required=True)
    p.add_argument("--norm")
    p.add_argument("--point")
    p.add_argument("--out")

    p = sub.add_parser("redcheck", help="scan equation-satisfying norm tuples for red copies")
    p.add_argument("--spec", required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--num-bits", type=int, default=16)
    p.add_argument("--den-bits", type=int, default=8)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out")

    p = sub.add_parser("scan-line", help="first red index on one line")
    p.add_argument("--spec", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--gamma", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("search-m", help="empirical m over a (beta, gamma) sampling plan")
    p.add_argument("--spec", required=True)
    p.add_argument("--grid", default="0x0", help="NBxNG rational grid")
    p.add_argument("--random", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m-cap", type=int, default=10**6)
    p.add_argument("--beta-range", help="lo:hi (rationals), default one torus period")
    p.add_argument("--gamma-range", help="lo:hi (rationals)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out")
    p.add_argument("--csv", help="per-sample records")

    p = sub.add_parser("discrepancy", help="discrepancy of a line's torus sequence")
    p.add_argument("--spec", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--gamma", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--effort", type=int, default=3)
    p.add_argument("--N", type=int, help="also evaluate the frequency bound")
    p.add_argument("--C-r", dest="c_r", default="default")
    p.add_argument("--out")
    p.add_argument("--csv")

    p = sub.add_parser("etk", help="frequency-sum discrepancy bound")
    p.add_argument("--spec", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--gamma", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--C-r", dest="c_r", default="default")
    p.add_argument("--out")
    p.add_argument("--csv")

    p = sub.add_parser("weyl", help="exponential sum along a line's torus sequence")
    p.add_argument("--spec", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--gamma", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--h", required=True, help="frequency vector, comma-separated")
    p.add_argument("--out")
    p.add_argument("--csv")

    p = sub.add_parser("lemma1-check", help="discrepancy-below-1/p^r forces a box hit")
    p.add_argument("--spec", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--gamma", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--C-r", dest="c_r", default="default")
    p.add_argument("--effort", type=int, default=3)
    p.add_argument("--out")
    return parser


def _c_r_value(raw, r: int) -> float:
    if raw in (None, "default"):
        return 1.5**r
    return float(raw)


def _line_params(args) -> LineParams:
    return LineParams(
        beta=_parse_real(args.beta), gamma=_parse_real(args.gamma), m=args.m
    )


def _cmd_certify(args) -> tuple[dict, int]:
    config = ConfigurationX.load(args.config)
    cert = compute_certificate(config)
    if cert is None:
        return {"spherical": True, "c": None, "B": None}, EXIT_OK
    return {"spherical": False, **cert.to_json()}, EXIT_OK


def _cmd_build_spec(args) -> tuple[dict, int]:
    config = ConfigurationX.load(args.config)
    cert = compute_certificate(config)
    if cert is None:
        raise ValueError("configuration is spherical; no colouring exists for it")
    return build_spec(cert).to_json(), EXIT_OK


def _cmd_colour(args) -> tuple[dict, int]:
    spec = ColoringSpec.load(args.spec)
    if (args.norm is None) == (args.point is None):
        raise UsageError("colour needs exactly one of --norm or --point")
    if args.norm is not None:
        y = nf.parse(args.norm)
    else:
        point = _parse_point(args.point)
        from .certify import squared_norm

        y = squared_norm(point)
    colour = colour_norm(spec, y)
    floors = floors_norm(spec, y)
    return {
        "y": str(y),
        "colour": colour.value,
        "floors": floors,
        "floors_mod_p": [f % spec.p for f in floors],
        "p": spec.p,
    }, EXIT_OK


def _cmd_redcheck(args) -> tuple[dict, int]:
    spec = ColoringSpec.load(args.spec)
    report = scan_for_red_copies(
        spec,
        samples=args.samples,
        seed=args.seed,
        num_bits=args.num_bits,
        den_bits=args.den_bits,
        workers=max(1, args.threads),
    )
    code = EXIT_OK
    if report.all_red_count or report.chain_violations:
        code = EXIT_PROPERTY_VIOLATION
    return report.to_json(), code


def _cmd_scan_line(args) -> tuple[dict, int]:
    spec = ColoringSpec.load(args.spec)
    lp = _line_params(args)
    res = first_red_scan(spec, lp)
    return {
        "beta": str(lp.beta) if isinstance(lp.beta, Fraction) else lp.beta,
        "gamma": str(lp.gamma) if isinstance(lp.gamma, Fraction) else lp.gamma,
        "m": lp.m,
        "first_red": res.index,
        "ambiguous_resolved": res.ambiguous_resolved,
        "boundary_flagged": res.boundary_flagged,
    }, EXIT_OK


def _parse_range(raw: str | None, fallback) -> tuple[Fraction, Fraction]:
    if raw is None:
        return fallback
    lo, hi = raw.split(":")
    return Fraction(lo), Fraction(hi)


def _cmd_search_m(args) -> tuple[dict, int]:
    spec = ColoringSpec.load(args.spec)
    gb, gg = (int(v) for v in args.grid.lower().split("x"))
    def_beta, def_gamma = default_ranges(spec)
    plan = SamplingPlan(
        grid_beta=gb,
        grid_gamma=gg,
        random_count=args.random,
        seed=args.seed,
        beta_range=_parse_range(args.beta_range, def_beta),
        gamma_range=_parse_range(args.gamma_range, def_gamma),
    )
    report = empirical_m(
        spec,
        plan,
        m_cap=args.m_cap,
        keep_records=bool(args.csv),
        workers=max(1, args.threads),
    )
    if args.csv:
        _write_csv(
            args.csv,
            ["beta", "gamma", "mode", "first_red", "boundary_flagged"],
            [
                [
                    str(r.beta) if isinstance(r.beta, Fraction) else repr(r.beta),
                    str(r.gamma) if isinstance(r.gamma, Fraction) else repr(r.gamma),
                    r.mode,
                    r.first_red,
                    r.boundary_flagged,
                ]
                for r in report.records
            ],
        )
    return report.to_json(), EXIT_OK


def _cmd_discrepancy(args) -> tuple[dict, int]:
    spec = ColoringSpec.load(args.spec)
    lp = _line_params(args)
    z = torus_sequence(spec, lp)
    d_star = None
    exact_requested = args.exact
    try:
        d_star, d_ext = discrepancy_exact(z)
        d_extreme: float | tuple = d_ext
    except DiscrepancySizeError:
        if exact_requested:
            raise
        d_extreme = discrepancy_bracket(z, args.effort)
    rhs = n_used = c_r_used = None
    if args.N is not None:
        c_r_used = _c_r_value(args.c_r, z.r)
        rhs = etk_bound(z, args.N, c_r_used)
        n_used = args.N
    report = DiscrepancyReport(
        m=lp.m, r=z.r, d_star=d_star, d_extreme=d_extreme,
        etk_rhs=rhs, n_used=n_used, c_r_used=c_r_used,
    )
    payload = report.to_json()
    if args.csv:
        d_ext_json = payload["d_extreme"]
        lo, hi = (d_ext_json if isinstance(d_ext_json, list) else (d_ext_json, d_ext_json))
        _write_csv(
            args.csv,
            ["m", "r", "d_star", "d_extreme_lo", "d_extreme_hi", "etk_rhs", "N", "C_r"],
            [[lp.m, z.r, d_star, lo, hi, rhs, n_used, c_r_used]],
        )
    return payload, EXIT_OK


def _cmd_etk(args) -> tuple[dict, int]:
    spec = ColoringSpec.load(args.spec)
    lp = _line_params(args)
    z = torus_sequence(spec, lp)
    c_r = _c_r_value(args.c_r, z.r)
    rhs = etk_bound(z, args.N, c_r)
    report = DiscrepancyReport(
        m=lp.m, r=z.r, d_star=None, d_extreme=None,  # type: ignore[arg-type]
        etk_rhs=rhs, n_used=args.N, c_r_used=c_r,
    )
    payload = report.to_json()
    if args.csv:
        _write_csv(args.csv, ["m", "r", "etk_rhs", "N", "C_r"],
                   [[lp.m, z.r, rhs, args.N, c_r]])
    return payload, EXIT_OK


def _cmd_weyl(args) -> tuple[dict, int]:
    spec = ColoringSpec.load(args.spec)
    lp = _line_params(args)
    z = torus_sequence(spec, lp)
    h = [int(v) for v in args.h.split(",")]
    w = weyl_sum(z, h)
    payload = w.to_json()
    if args.csv:
        _write_csv(args.csv, ["m", "h", "re", "im", "magnitude_over_m"],
                   [[w.m, args.h, w.value.real, w.value.imag, w.magnitude_over_m]])
    return payload, EXIT_OK


def _cmd_lemma1(args) -> tuple[dict, int]:
    spec = ColoringSpec.load(args.spec)
    lp = _line_params(args)
    c_r = _c_r_value(args.c_r, spec.r)
    report = lemma1_check(spec, lp, n_freq=args.N, c_r=c_r, effort=args.effort)
    code = EXIT_PROPERTY_VIOLATION if report.verdict == "violated" else EXIT_OK
    return report.to_json(), code


_COMMANDS = {
    "certify": (_cmd_certify, "config"),
    "build-spec": (_cmd_build_spec, "config"),
    "colour": (_cmd_colour, "spec"),
    "redcheck": (_cmd_redcheck, "spec"),
    "scan-line": (_cmd_scan_line, "spec"),
    "search-m": (_cmd_search_m, "spec"),
    "discrepancy": (_cmd_discrepancy, "spec"),
    "etk": (_cmd_etk, "spec"),
    "weyl": (_cmd_weyl, "spec"),
    "lemma1-check": (_cmd_lemma1, "spec"),
}


def run(argv) -> int:
    """Execute one subcommand; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handler, path_attr = _COMMANDS[args.command]
    started = time.monotonic()
    try:
        result, code = handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    manifest = _manifest(args.command, args, getattr(args, path_attr, None))
    if args.command == "build-spec":
        payload = {"manifest": manifest.to_json(), **result}
    else:
        payload = {"manifest": manifest.to_json(), "result": result}
    _emit(payload, getattr(args, "out", None))
    elapsed = time.monotonic() - started
    print(f"[rcl] {args.command} finished in {elapsed:.3f}s", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Command-line front end: ``bcsph {eval,support,kernel,limit,verify}``.

Output files
------------
eval     CSV columns: setting,q,d,p,lambda,x,value_re,value_im,stderr,n,seconds
support  JSON keys: config, report (q, d, p, setting, x, n, seed, max_violation,
         scale, coverage, coverage_raw, grid_points, witness_rate, witness_trials,
         total_mass); the optional cloud CSV has columns h1..hq,weight
kernel   CSV columns: bin_center_1..bin_center_q,density
limit    CSV columns: eps,error,stderr,profile_error

Every CSV gets a ``<path>.meta.json`` sidecar holding the resolved config;
JSON outputs carry it under ``config``.  The default seed is read from the
environment variable BCSPH_SEED (0 if unset).

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import numfield as nf
from . import sphfun as sf
from . import verify
from .rootdata import HyperplaneError, MultiplicityData, rho_bc

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_VERIFY = 3

SEED_ENV = "BCSPH_SEED"
IRHO = "-irho"
VALUE_OPTIONS = ("--lambda", "--x", "--eps")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    q: int = 1
    d: int = 1
    p: float = 3.0
    lam: str = "0:0"
    x: list = field(default_factory=list)
    setting: str = "trig"
    n_samples: int = 100_000
    seed: int = 0
    bins: int = 64
    eps_list: list = field(default_factory=list)
    output: str | None = None
    format: str = "csv"
    method: str = "auto"
    threads: int = 1
    suite: str = "fast"
    cloud: str | None = None

    def multiplicity(self) -> MultiplicityData:
        return MultiplicityData(self.q, self.d, self.p)

    def eval_config(self) -> sf.EvalConfig:
        return sf.EvalConfig(
            setting=self.setting,
            n_samples=self.n_samples,
            seed=self.seed,
            method=self.method,
            workers=self.threads,
        )

    def x_vector(self) -> np.ndarray:
        x = np.asarray(self.x, dtype=np.float64)
        if x.size != self.q:
            raise UsageError(f"--x needs q={self.q} entries, got {x.size}")
        return x


def parse_lambda(text: str, m: MultiplicityData) -> np.ndarray:
    """``-irho``, comma-separated ``re:im`` pairs, or plain reals."""
    if text.strip() == IRHO:
        return -1j * rho_bc(m)
    vals = []
    for tok in text.split(","):
        tok = tok.strip()
        if ":" in tok:
            re, im = tok.split(":", 1)
            vals.append(complex(float(re), float(im)))
        else:
            vals.append(complex(float(tok)))
    if len(vals) != m.q:
        raise UsageError(f"--lambda needs q={m.q} entries, got {len(vals)}")
    return np.array(vals)


def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def preprocess(argv: Sequence[str]) -> list[str]:
    """Glue values beginning with '-' (``-irho``, negative numbers) to their option."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in VALUE_OPTIONS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def build_parser(seed: int) -> argparse.ArgumentParser:
    parser = _Parser(
        prog="bcsph",
        description="BC-type spherical functions and dual Abel measures.",
        epilog=__doc__.split("\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, n_default=100_000):
        p.add_argument("--q", type=int, default=1)
        p.add_argument("--d", type=int, default=1, help="field dimension 1, 2 or 4")
        p.add_argument("--p", type=float, default=3.0, help="must exceed 2q-1")
        p.add_argument("--x", type=_floats, default=None, help="comma-separated Cartan vector")
        p.add_argument("--setting", choices=("trig", "rational"), default="trig")
        p.add_argument("--n", dest="n_samples", type=int, default=n_default)
        p.add_argument("--seed", type=int, default=seed, help=f"default from ${SEED_ENV}")
        p.add_argument("--threads", type=int, default=1, help="worker threads (results do not change)")
        p.add_argument("--output", "-o", default=None)
        p.add_argument("--format", choices=("csv", "json"), default=None)

    p = sub.add_parser("eval", help="evaluate phi_bc (trig) or psi_bc (rational)")
    common(p)
    p.add_argument("--lambda", dest="lam", default="0:0", help="re:im pairs, plain reals, or -irho")
    p.add_argument("--method", choices=sf.METHODS, default="auto")

    p = sub.add_parser("support", help="support certification report (JSON)")
    common(p)
    p.add_argument("--cloud", default=None, help="also write the sample cloud CSV here")

    p = sub.add_parser("kernel", help="kernel histogram (CSV)")
    common(p, n_default=1_000_000)
    p.add_argument("--bins", type=int, default=64)

    p = sub.add_parser("limit", help="rational-limit table (CSV)")
    common(p)
    p.add_argument("--lambda", dest="lam", default="0:0")
    p.add_argument("--eps", dest="eps_list", type=_floats, default=[0.4, 0.2, 0.1, 0.05])
    p.add_argument("--method", choices=sf.METHODS, default="auto")

    p = sub.add_parser("verify", help="run the self-check suite")
    p.add_argument("suite", nargs="?", default="fast")
    return parser


def resolve(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    for key, value in vars(ns).items():
        if value is not None and hasattr(cfg, key):
            setattr(cfg, key, value)
    if ns.command == "verify":
        return cfg
    if ns.x is None:
        cfg.x = [1.0] * cfg.q
    cfg.format = ns.format or ("json" if ns.command == "support" else "csv")
    if cfg.n_samples < 2 or cfg.threads < 1:
        raise UsageError("--n must be >= 2 and --threads >= 1")
    cfg.multiplicity()  # validates q, d, p
    cfg.x_vector()
    return cfg


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------


def _config_record(cfg: RunConfig) -> dict:
    return asdict(cfg)


def write_table(path: str | None, fmt: str, columns: list[str], rows: list[list], cfg: RunConfig) -> None:
    if path is None:
        return
    if fmt == "json":
        payload = {"config": _config_record(cfg), "columns": columns, "rows": rows}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)
    with open(path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump({"config": _config_record(cfg), "columns": columns}, fh, indent=2)


def _complex_text(z: complex) -> str:
    return f"{float(z.real)!r}:{float(z.imag)!r}"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_eval(cfg: RunConfig) -> int:
    m = cfg.multiplicity()
    lam = parse_lambda(cfg.lam, m)
    x = cfg.x_vector()
    fn = sf.phi_bc if cfg.setting == "trig" else sf.psi_bc
    t0 = time.perf_counter()
    est = fn(lam, x, m, cfg.eval_config())
    secs = time.perf_counter() - t0
    print(f"value  = {est.value.real!r} {est.value.imag:+.17g}j")
    print(f"stderr = {est.stderr!r}")
    print(f"n      = {est.n}")
    print(f"time   = {secs:.3f} s")
    columns = ["setting", "q", "d", "p", "lambda", "x", "value_re", "value_im", "stderr", "n", "seconds"]
    row = [
        cfg.setting, m.q, m.d, m.p,
        ",".join(_complex_text(z) for z in lam),
        ",".join(repr(float(v)) for v in x),
        repr(est.value.real), repr(est.value.imag), repr(est.stderr), est.n, f"{secs:.3f}",
    ]
    write_table(cfg.output, cfg.format, columns, [row], cfg)
    return EXIT_OK


def cmd_support(cfg: RunConfig) -> int:
    m = cfg.multiplicity()
    x = cfg.x_vector()
    rep = sf.support_report(x, m, cfg.setting, cfg.n_samples, cfg.seed, workers=cfg.threads)
    report = rep.to_dict()
    print(json.dumps(report, indent=2))
    if cfg.output is not None:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            json.dump({"config": _config_record(cfg), "report": report}, fh, indent=2)
    if cfg.cloud is not None:
        cloud = sf.dual_abel_cloud(x, m, cfg.setting, cfg.n_samples, cfg.seed, cfg.threads)
        w = cloud.weights if cloud.mass is None else cloud.weights * cloud.mass
        columns = [f"h{i + 1}" for i in range(m.q)] + ["weight"]
        rows = [list(map(float, h)) + [float(v)] for h, v in zip(cloud.points, w)]
        write_table(cfg.cloud, "csv", columns, rows, cfg)
    return EXIT_OK


def cmd_kernel(cfg: RunConfig) -> int:
    m = cfg.multiplicity()
    x = cfg.x_vector()
    hist = sf.kernel_histogram(x, m, cfg.setting, cfg.bins, cfg.n_samples, cfg.seed, cfg.threads)
    centers = hist.center_grid()
    dens = hist.density.ravel()
    columns = [f"bin_center_{i + 1}" for i in range(m.q)] + ["density"]
    rows = [list(map(float, c)) + [float(v)] for c, v in zip(centers, dens)]
    print(f"bins={len(rows)} total={hist.total:.6g} outside={hist.outside:.3g} max_density={dens.max():.6g}")
    write_table(cfg.output, cfg.format, columns, rows, cfg)
    return EXIT_OK


def cmd_limit(cfg: RunConfig) -> int:
    m = cfg.multiplicity()
    lam = parse_lambda(cfg.lam, m)
    tab = sf.rational_limit_check(lam, cfg.x_vector(), m, cfg.eps_list, cfg.eval_config())
    columns = ["eps", "error", "stderr", "profile_error"]
    rows = [[r.eps, r.error, r.stderr, r.profile_error] for r in tab.rows]
    print(",".join(columns))
    for r in rows:
        print(",".join(f"{v:.6g}" for v in r))
    write_table(cfg.output, cfg.format, columns, rows, cfg)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.suite not in verify.SUITES:
        raise UsageError(f"unknown suite {cfg.suite!r}; choose from {', '.join(verify.SUITES)}")
    results = verify.run_suite(cfg.suite)
    print(verify.format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {
    "eval": cmd_eval,
    "support": cmd_support,
    "kernel": cmd_kernel,
    "limit": cmd_limit,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser(default_seed())
        ns = parser.parse_args(preprocess(argv))
        cfg = resolve(ns)
        return COMMANDS[cfg.command](cfg)
    except SystemExit as exc:  # argparse --help / errors
        return int(exc.code or 0)
    except (nf.SingularMatrixError, HyperplaneError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

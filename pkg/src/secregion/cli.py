"""Batch front end: channel files in, rate-point CSVs and run metadata out.

The consumers are plotting and diffing pipelines, so output is plain CSV
with 17-significant-digit decimals (exact double round-trip) plus a
human-readable key=value sidecar carrying every parameter, tolerance, the
seed, wall time, and solver flags.  One process runs one
(scenario, method, power) job; sweeps over power are shell-level loops.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

import numpy as np

from .baselines import oma_timeshare, random_search_region, tdma_region
from .rotation import SolverOptions
from .splitting import hull_pareto, sweep_points
from .types import ChannelPair, Scenario
from .wsr import WsrConfig, wsr_sweep

METHODS = ("ps", "wsr", "tdma", "oma", "oracle")

CSV_HEADER = "r0,r1,r2,order,alpha0,alpha1,alpha2"


class ChannelParseError(ValueError):
    """A channel file violated the expected layout; carries the line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class RunConfig:
    channels: str
    scenario: str
    method: str
    power: float
    out: str
    common: bool = True
    eps1: float = 0.05
    sigma: float = 0.05
    samples: int = 100000
    seed: int = 0


def load_channels(path: str) -> ChannelPair:
    """Parse the plain-text channel format.

    Line 1 holds "n1 n2 nt"; the next n1 lines are the rows of the first
    user's channel and the following n2 lines the second user's, each with
    exactly nt whitespace-separated decimals.  Decimal parsing does not
    depend on the locale.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.readlines()
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(raw) if ln.strip()]
    if not lines:
        raise ChannelParseError(1, "empty file")
    head_no, head = lines[0]
    parts = head.split()
    if len(parts) != 3:
        raise ChannelParseError(head_no, f"expected 'n1 n2 nt', got {head!r}")
    try:
        n1, n2, nt = (int(tok) for tok in parts)
    except ValueError:
        raise ChannelParseError(head_no, f"non-integer dimension in {head!r}") from None
    if min(n1, n2, nt) < 1:
        raise ChannelParseError(head_no, "dimensions must be positive")
    body = lines[1:]
    if len(body) != n1 + n2:
        raise ChannelParseError(
            body[-1][0] if body else head_no,
            f"expected {n1 + n2} matrix rows, found {len(body)}",
        )

    def parse_row(line_no: int, text: str) -> list:
        toks = text.split()
        if len(toks) != nt:
            raise ChannelParseError(
                line_no, f"expected {nt} entries in this row, got {len(toks)}"
            )
        try:
            return [float(tok) for tok in toks]
        except ValueError:
            raise ChannelParseError(line_no, f"non-numeric token in {text!r}") from None

    h1 = [parse_row(no, txt) for no, txt in body[:n1]]
    h2 = [parse_row(no, txt) for no, txt in body[n1:]]
    return ChannelPair(np.array(h1), np.array(h2))


def write_channels(ch: ChannelPair, path: str) -> None:
    """Emit the channel file format with 17 significant digits per entry."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{ch.n1} {ch.n2} {ch.nt}\n")
        for mat in (ch.h1, ch.h2):
            for row in mat:
                fh.write(" ".join(format(x, ".17g") for x in row) + "\n")


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _csv_rows_ps(ch, scenario, cfg, opts):
    pts = sweep_points(ch, scenario, cfg.power, cfg.eps1, opts)
    kept = hull_pareto([sp.rates for sp in pts])
    by_key = {}
    for sp in pts:
        by_key.setdefault((sp.rates.r0, sp.rates.r1, sp.rates.r2, sp.rates.order), sp)
    rows = []
    n_unconverged = sum(1 for sp in pts if not sp.converged)
    for t in kept:
        sp = by_key.get((t.r0, t.r1, t.r2, t.order))
        if sp is None:
            rows.append((t, "", "", ""))  # the origin point carries no split
        else:
            rows.append(
                (
                    t,
                    _fmt(sp.split.alpha0),
                    _fmt(sp.split.alpha1),
                    _fmt(sp.split.alpha2),
                )
            )
    return rows, n_unconverged


def run(cfg: RunConfig) -> int:
    """Execute one job; returns the process exit code."""
    if cfg.method not in METHODS:
        print(f"error: unknown method {cfg.method!r}", file=sys.stderr)
        return 2
    if cfg.method == "wsr" and cfg.common:
        print(
            "error: the weighted-sum-rate method is defined only without a "
            "common message; rerun with --common off",
            file=sys.stderr,
        )
        return 2
    if cfg.method == "oma" and cfg.common:
        print(
            "error: the time-share baseline is defined only without a common "
            "message; rerun with --common off",
            file=sys.stderr,
        )
        return 2
    try:
        scenario = Scenario(cfg.scenario, common_enabled=cfg.common)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.power < 0:
        print("error: power must be nonnegative", file=sys.stderr)
        return 2
    try:
        ch = load_channels(cfg.channels)
    except (OSError, ChannelParseError) as exc:
        print(f"error: cannot read channels: {exc}", file=sys.stderr)
        return 1

    opts = SolverOptions(seed=cfg.seed)
    start = time.perf_counter()
    n_unconverged = 0
    if cfg.method == "ps":
        rows, n_unconverged = _csv_rows_ps(ch, scenario, cfg, opts)
    else:
        if cfg.method == "wsr":
            region = wsr_sweep(ch, scenario, cfg.power, sigma=cfg.sigma)
        elif cfg.method == "tdma":
            region = tdma_region(ch, scenario, cfg.power, opts)
        elif cfg.method == "oma":
            region = oma_timeshare(ch, scenario, cfg.power, opts)
        else:
            region = random_search_region(
                ch, scenario, cfg.power, cfg.samples, seed=cfg.seed
            )
        rows = [(t, "", "", "") for t in region.points]
    wall = time.perf_counter() - start

    with open(cfg.out, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for t, a0, a1, a2 in rows:
            fh.write(
                f"{_fmt(t.r0)},{_fmt(t.r1)},{_fmt(t.r2)},{t.order},{a0},{a1},{a2}\n"
            )

    meta = {
        "channels": cfg.channels,
        "scenario": scenario.tag,
        "common": "on" if cfg.common else "off",
        "method": cfg.method,
        "power": _fmt(cfg.power),
        "eps1": _fmt(cfg.eps1),
        "sigma": _fmt(cfg.sigma),
        "samples": str(cfg.samples),
        "seed": str(cfg.seed),
        "solver_max_iters": str(opts.max_iters),
        "solver_n_starts": str(opts.n_starts),
        "solver_ftol": _fmt(opts.ftol),
        "solver_gtol": _fmt(opts.gtol),
        "wsr_eps2": _fmt(WsrConfig(1.0, 0.0).eps2),
        "wsr_eps3": _fmt(WsrConfig(1.0, 0.0).eps3),
        "n_points": str(len(rows)),
        "n_unconverged_cells": str(n_unconverged),
        "wall_time_s": f"{wall:.3f}",
    }
    with open(cfg.out + ".meta", "w", encoding="utf-8") as fh:
        for key, value in meta.items():
            fh.write(f"{key}={value}\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="secregion",
        description=(
            "Compute achievable rate regions for the two-user downlink with "
            "common, private, and confidential messages."
        ),
        epilog=(
            "The tdma baseline uses equal-length slots with the full power "
            "budget available inside each slot (power-limited, not "
            "energy-equalized)."
        ),
    )
    parser.add_argument("--channels", required=True, help="channel file path")
    parser.add_argument("--scenario", required=True, choices=("A", "B", "C"))
    parser.add_argument(
        "--common",
        choices=("on", "off"),
        default="on",
        help="whether a common (multicast) message is carried",
    )
    parser.add_argument("--method", required=True, choices=METHODS)
    parser.add_argument("--power", required=True, type=float, help="total power budget")
    parser.add_argument("--eps1", type=float, default=0.05, help="power-split grid step")
    parser.add_argument("--sigma", type=float, default=0.05, help="weight sweep step")
    parser.add_argument(
        "--samples",
        type=int,
        default=100000,
        help="random-search sample count for the oracle method",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", required=True, help="output CSV path")
    args = parser.parse_args(argv)
    cfg = RunConfig(
        channels=args.channels,
        scenario=args.scenario,
        method=args.method,
        power=args.power,
        out=args.out,
        common=args.common == "on",
        eps1=args.eps1,
        sigma=args.sigma,
        samples=args.samples,
        seed=args.seed,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Subcommands:
  run <scenario-file> --out <csv> [--parallel N] [--seed U64] [--resume]
  bound <scenario-file> --out <csv>
  figures <fig3|fig4|fig5a|fig5b|fig6|fig7> [--out <file>]
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace

from .harness import (
    CSV_HEADER,
    analytic_ber,
    bound_row,
    load_scenarios,
    point_row,
    run_scenario,
)


def _existing_ids(path: str) -> set[str]:
    if not os.path.exists(path):
        return set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return {row["scenario_id"] for row in reader}


def _open_csv_append(path: str):
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    fh = open(path, "a", newline="", encoding="utf-8")
    w = csv.writer(fh)
    if new:
        w.writerow(CSV_HEADER)
        fh.flush()
    return fh, w


def cmd_run(args) -> int:
    scenarios = load_scenarios(args.scenario_file)
    if args.seed is not None:
        scenarios = [replace(sc, seed=args.seed) for sc in scenarios]
    skip = _existing_ids(args.out) if args.resume else set()
    fh, writer = _open_csv_append(args.out)
    try:
        for sc in scenarios:
            if sc.scenario_id in skip:
                print(f"skip {sc.scenario_id} (already in {args.out})")
                continue
            pt = run_scenario(sc, parallelism=args.parallel)
            writer.writerow(point_row(pt))
            fh.flush()  # partial results survive interrupts
            print(
                f"{sc.scenario_id}: trials={pt.trials} errors={pt.bit_errors} "
                f"ber={pt.ber:.3e} ({pt.runtime_ms} ms)"
            )
    finally:
        fh.close()
    return 0


def cmd_bound(args) -> int:
    scenarios = load_scenarios(args.scenario_file)
    fh, writer = _open_csv_append(args.out)
    try:
        for sc in scenarios:
            value = analytic_ber(sc)
            writer.writerow(bound_row(sc, value))
            fh.flush()
            print(f"{sc.scenario_id}: bound={value:.6e}")
    finally:
        fh.close()
    return 0


# ---------------------------------------------------------------------------
# prepackaged figure scenario files
# ---------------------------------------------------------------------------


def _section(name: str, **kv) -> str:
    lines = [f"[{name}]"]
    lines += [f"{k} = {v}" for k, v in kv.items() if v is not None]
    return "\n".join(lines) + "\n"


def _fig3() -> str:
    # full vs low-complexity MLD plus the analytical overlay scenario set
    out = []
    for snr in range(0, 41, 5):
        common = dict(
            framework="AJ-OFDM", K=512, N=4, p=4, M=4, pattern="partial_band",
            rho_frac=0.5, snr_db=snr, sjr_db=-20, min_trials=20,
            min_bit_errors=100, max_trials=2000,
        )
        out.append(_section(f"fig3_full_snr{snr}", detector="full", **common))
        out.append(_section(f"fig3_lowcomp_snr{snr}", detector="lowcomp", **common))
    return "\n".join(out)


def _fig4() -> str:
    out = []
    frameworks = [
        ("AJ-OFDM", dict(M=4)),
        ("AJ-OFDM", dict(M=16)),
        ("QAM-OFDM", dict(M=2)),
        ("QAM-OFDM", dict(M=4)),
        ("OFDM-IM", dict(M=4, N_A=1)),
    ]
    for snr in range(0, 41, 5):
        for fw, extra in frameworks:
            name = f"fig4a_{fw}_M{extra['M']}_snr{snr}".replace("-", "")
            out.append(_section(
                name, framework=fw, K=512, N=4, p=4, pattern="partial_band",
                rho_frac=0.5, snr_db=snr, sjr_db=-20, min_trials=20,
                min_bit_errors=100, max_trials=2000, **extra,
            ))
    for sjr in range(-30, 31, 5):
        for fw, extra in frameworks:
            name = f"fig4b_{fw}_M{extra['M']}_sjr{sjr}".replace("-", "m")
            out.append(_section(
                name, framework=fw, K=512, N=4, p=4, pattern="partial_band",
                rho_frac=0.5, snr_db=20, sjr_db=sjr, min_trials=20,
                min_bit_errors=100, max_trials=2000, **extra,
            ))
    return "\n".join(out)


def _fig5(p: int, n: int, tag: str) -> str:
    out = []
    orders = [2**(p // s) for s in range(1, n + 1) if p % s == 0]
    for rho in (0.0, 0.25, 0.5, 0.75, 1.0):
        for m in sorted(set(orders)):
            name = f"{tag}_M{m}_rho{int(rho * 100)}"
            out.append(_section(
                name, framework="AJ-OFDM", K=512, N=n, p=p, M=m,
                pattern="partial_band", rho_frac=rho, snr_db=20, sjr_db=-20,
                min_trials=20, min_bit_errors=100, max_trials=2000,
            ))
        out.append(_section(
            f"{tag}_qamofdm_rho{int(rho * 100)}", framework="QAM-OFDM", K=512,
            N=n, p=p, M=2, pattern="partial_band", rho_frac=rho, snr_db=20,
            sjr_db=-20, min_trials=20, min_bit_errors=100, max_trials=2000,
        ))
    return "\n".join(out)


def _fig6() -> str:
    out = []
    for rho in (0.0, 0.25, 0.5, 0.75, 1.0):
        tag = f"rho{int(rho * 100)}"
        common = dict(
            K=512, N=4, p=4, pattern="random", rho_frac=rho, snr_db=20,
            sjr_db=-20, min_trials=20, min_bit_errors=100, max_trials=2000,
        )
        out.append(_section(f"fig6_ajofdm_{tag}", framework="AJ-OFDM", M=4, **common))
        out.append(_section(
            f"fig6_adapt28_{tag}", framework="AJ-OFDM-Adapt", M="auto", T_e=28, **common
        ))
        out.append(_section(f"fig6_qamofdm_{tag}", framework="QAM-OFDM", M=2, **common))
        out.append(_section(f"fig6_ofdmim_{tag}", framework="OFDM-IM", M=4, N_A=1, **common))
    return "\n".join(out)


def _fig7() -> str:
    out = []
    for sjr in range(-30, 31, 5):
        tag = f"sjr{sjr}".replace("-", "m")
        common = dict(
            K=512, N=4, p=4, pattern="random", rho_frac=0.25, snr_db=20,
            sjr_db=sjr, min_trials=20, min_bit_errors=100, max_trials=2000,
        )
        out.append(_section(f"fig7_ajofdm_{tag}", framework="AJ-OFDM", M=4, **common))
        out.append(_section(
            f"fig7_adapt28_{tag}", framework="AJ-OFDM-Adapt", M="auto", T_e=28, **common
        ))
        out.append(_section(
            f"fig7_adapt14_{tag}", framework="AJ-OFDM-Adapt", M="auto", T_e=14, **common
        ))
        out.append(_section(f"fig7_qamofdm_{tag}", framework="QAM-OFDM", M=2, **common))
        out.append(_section(f"fig7_ofdmim_{tag}", framework="OFDM-IM", M=4, N_A=1, **common))
    return "\n".join(out)


FIGURE_BUILDERS = {
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5a": lambda: _fig5(4, 4, "fig5a"),
    "fig5b": lambda: _fig5(6, 6, "fig5b"),
    "fig6": _fig6,
    "fig7": _fig7,
}


def cmd_figures(args) -> int:
    text = FIGURE_BUILDERS[args.name]()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ajofdm", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a Monte Carlo scenario file")
    run_p.add_argument("scenario_file")
    run_p.add_argument("--out", required=True)
    run_p.add_argument("--parallel", type=int, default=1)
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--resume", action="store_true")
    run_p.set_defaults(func=cmd_run)

    bound_p = sub.add_parser("bound", help="evaluate analytical bounds onto CSV")
    bound_p.add_argument("scenario_file")
    bound_p.add_argument("--out", required=True)
    bound_p.set_defaults(func=cmd_bound)

    fig_p = sub.add_parser("figures", help="emit a prepackaged figure scenario file")
    fig_p.add_argument("name", choices=sorted(FIGURE_BUILDERS))
    fig_p.add_argument("--out", default=None)
    fig_p.set_defaults(func=cmd_figures)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())

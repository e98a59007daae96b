"""Command-line front end.

Subcommands: survival | price | two-firm | basket | sweep | mgf | simulate |
validate. Every run takes ``--config`` (see ``config`` module for the file
format); data goes to stdout or ``--output``, diagnostics to stderr. Exit
codes: 0 success, 2 config validation error, 3 degenerate parameters,
4 Monte Carlo vs analytic validation failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import basket as basket_mod
from . import montecarlo as mc
from . import single_name, two_firm
from .config import RunConfig, load_config
from .errors import ConfigError, DegenerateParameterError, ValidationError
from .occupation import mgf as occupation_mgf

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_VALIDATION = 4

_TWO_FIRM_GRID = 21  # t-grid resolution of the two-firm table


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _emit(header: list[str], rows: list[list], fmt: str, out) -> None:
    if fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        out.write(json.dumps(payload, indent=2))
        out.write("\n")
        return
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")


def _cmd_survival(cfg: RunConfig, args, out) -> tuple[list[str], list[list]] | None:
    spec = cfg.chain_spec()
    hazard = cfg.hazard_spec(spec)
    i0 = cfg.initial_state(spec)
    _, T = cfg.contract_times()
    value = single_name.survival(spec, hazard, i0, T)
    if args.format == "json":
        return ["s", "survival"], [[T, value]]
    out.write(f"{value:.6f}\n")
    return None


def _cmd_price(cfg: RunConfig, args, out):
    spec = cfg.chain_spec()
    hazard = cfg.hazard_spec(spec)
    i0 = cfg.initial_state(spec)
    r, T = cfg.contract_times()
    claim = single_name.ClaimSpec(
        r=np.full(spec.M, r), X=np.ones(spec.M), Y=np.ones(spec.M),
        Z=np.ones(spec.M),
    )
    rows = [
        ["terminal", single_name.price_terminal(spec, hazard, claim, i0, T)],
        ["stream", single_name.price_stream(spec, hazard, claim, i0, T)],
        ["recovery", single_name.price_recovery(spec, hazard, claim, i0, T)],
    ]
    return ["block", "price"], rows


def _cmd_two_firm(cfg: RunConfig, args, out):
    params = cfg.two_firm_params()
    rows: list[list] = []
    for firm in (two_firm.FIRM_A, two_firm.FIRM_B):
        for i in range(_TWO_FIRM_GRID):
            t = params.T * i / (_TWO_FIRM_GRID - 1)
            rows.append(
                ["density", firm, t, two_firm.marginal_density(params, firm, t)]
            )
        for i in range(_TWO_FIRM_GRID):
            t = params.T * i / (_TWO_FIRM_GRID - 1)
            rows.append(
                ["survival", firm, t, two_firm.marginal_survival(params, firm, t)]
            )
        rows.append(["bond_price", firm, params.T, two_firm.bond_price(params, firm)])
    return ["quantity", "firm", "t", "value"], rows


def _cmd_basket(cfg: RunConfig, args, out):
    spec = cfg.chain_spec()
    contract = cfg.contract(spec)
    value = basket_mod.premium(contract)
    return ["k", "b", "c", "premium"], [
        [contract.k, contract.b, contract.c, value]
    ]


def _cmd_sweep(cfg: RunConfig, args, out):
    spec = cfg.chain_spec()
    contract = cfg.contract(spec)
    b_grid, c_grid = cfg.sweep_grids()
    result = basket_mod.sweep(contract, b_grid, c_grid)
    for b, reason in result.skipped:
        print(f"warning: skipped b={b:g}: {reason}", file=sys.stderr)
    return ["k", "b", "c", "premium"], [list(row) for row in result.rows]


def _cmd_mgf(cfg: RunConfig, args, out):
    spec = cfg.chain_spec()
    query, method = cfg.mgf_query(spec)
    psi = occupation_mgf(spec, query.u, query.t, method=method)
    return ["state", "psi"], [[i + 1, float(psi[i])] for i in range(spec.M)]


def _validation_items(
    cfg: RunConfig, args
) -> list[tuple[str, float, mc.MCEstimate, str]]:
    """(item, analytic value, MC estimate, kind) rows for simulate/validate.

    kind is "probability" for indicator means (validated against the null
    standard error sqrt(p0 (1-p0) / paths), which stays meaningful when a
    rare event gets no hits) and "mean" for continuous statistics (validated
    against the sample standard error).
    """
    spec = cfg.chain_spec()
    hazard = cfg.hazard_spec(spec)
    i0 = cfg.initial_state(spec)
    r, T = cfg.contract_times()
    config = cfg.mc_config(seed_override=args.seed, paths_override=args.paths)
    if config.horizon < T:
        raise ConfigError("mc", "horizon", f"horizon must cover contract.T={T:g}")
    print(f"seed: {config.seed}", file=sys.stderr)

    items: list[tuple[str, float, mc.MCEstimate, str]] = []
    items.append(
        (
            "survival",
            single_name.survival(spec, hazard, i0, T),
            mc.survival_estimate(spec, hazard, i0, T, config),
            "probability",
        )
    )
    claim = single_name.ClaimSpec(
        r=np.full(spec.M, r), X=np.ones(spec.M), Y=np.ones(spec.M),
        Z=np.ones(spec.M),
    )
    analytic = {
        "terminal": single_name.price_terminal(spec, hazard, claim, i0, T),
        "stream": single_name.price_stream(spec, hazard, claim, i0, T),
        "recovery": single_name.price_recovery(spec, hazard, claim, i0, T),
    }
    estimates = mc.building_block_estimates(spec, hazard, claim, i0, T, config)
    for block in ("terminal", "stream", "recovery"):
        items.append((f"price_{block}", analytic[block], estimates[block], "mean"))
    items.append(
        (
            "martingale_residual",
            0.0,
            mc.martingale_residual(spec, hazard, i0, T, config),
            "mean",
        )
    )
    if cfg.has("contract", "n"):
        contract = cfg.contract(spec)
        cdf_estimates = mc.kth_default_cdf_estimates(contract, T, config)
        for k in range(1, contract.n + 1):
            per_k = basket_mod.BasketContract(
                n=contract.n, b=contract.b, c=contract.c, r=contract.r,
                T=contract.T, k=k, chain=spec, i0=contract.i0,
            )
            items.append(
                (
                    f"kth_default_cdf_k{k}",
                    basket_mod.kth_default_cdf(per_k, T),
                    cdf_estimates[k - 1],
                    "probability",
                )
            )
    if cfg.has("two_firm"):
        params = cfg.two_firm_params()
        for firm in (two_firm.FIRM_A, two_firm.FIRM_B):
            items.append(
                (
                    f"two_firm_cdf_{firm}",
                    1.0 - two_firm.marginal_survival(params, firm, params.T),
                    mc.two_firm_cdf_estimate(params, firm, params.T, config),
                    "probability",
                )
            )
    return items


def _cmd_simulate(cfg: RunConfig, args, out):
    items = _validation_items(cfg, args)
    rows = [
        [name, est.mean, est.std_error, est.paths, est.seed]
        for name, _, est, _ in items
    ]
    return ["item", "mean", "std_error", "paths", "seed"], rows


def _cmd_validate(cfg: RunConfig, args, out):
    items = _validation_items(cfg, args)
    rows = []
    failures = 0
    for name, analytic, est, kind in items:
        gap = est.mean - analytic
        if kind == "probability":
            p0 = min(max(analytic, 0.0), 1.0)
            se = math.sqrt(p0 * (1.0 - p0) / est.paths)
        else:
            se = est.std_error
        if se > 0:
            z = gap / se
        else:
            z = 0.0 if gap == 0.0 else math.inf
        ok = abs(gap) <= 3.0 * se
        failures += 0 if ok else 1
        rows.append(
            [name, analytic, est.mean, se, z, "pass" if ok else "FAIL"]
        )
    header = ["item", "analytic", "mc_mean", "se", "z", "status"]
    return header, rows, failures


_COMMANDS = {
    "survival": _cmd_survival,
    "price": _cmd_price,
    "two-firm": _cmd_two_firm,
    "basket": _cmd_basket,
    "sweep": _cmd_sweep,
    "mgf": _cmd_mgf,
    "simulate": _cmd_simulate,
    "validate": _cmd_validate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triggercds",
        description="Trigger-event credit risk pricing and validation",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="configuration file")
    parser.add_argument("--output", default=None, help="write data here instead of stdout")
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("--seed", type=int, default=None, help="override mc.seed")
    parser.add_argument("--paths", type=int, default=None, help="override mc.paths")
    return parser


def run(argv: Sequence[str]) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.format is None:
            args.format = cfg.output_format()
        destination = args.output if args.output is not None else cfg.output_path()

        failures = 0
        command = _COMMANDS[args.command]

        def produce(out) -> None:
            nonlocal failures
            result = command(cfg, args, out)
            if result is None:
                return
            if len(result) == 3:
                header, rows, failures = result
            else:
                header, rows = result
            _emit(header, rows, args.format, out)

        if destination is None:
            produce(sys.stdout)
        else:
            with open(destination, "w", newline="") as fh:
                produce(fh)
        return EXIT_VALIDATION if failures else EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

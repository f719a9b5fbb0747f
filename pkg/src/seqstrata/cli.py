"""Batch command-line front end.

Subcommands mirror the analysis pipeline: ``simulate`` a dataset from a
scenario config, ``fit`` a posterior chain to a dataset, ``summarize``
chains into the reported tables, ``sensitivity`` for the assignment-gap
report, and ``ipw`` for the frequentist cross-check.  Every command is
deterministic given its inputs; seeds come from configs or flags, never
from the clock.  Exit codes: 0 success, 2 user error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .data import Dataset
from .params import SpecKind
from .posterior import ATE_NAMES, comparison_table, density_grid, functional_draws, summary_table
from .sampler import Chain, McmcConfig, PriorConfig, SamplerError, run_chains
from .sensitivity import ipw_msm_estimate, sensitivity_report
from .simulate import generate, load_scenario, scenario_to_dict

USER_ERROR, NUMERIC_ERROR = 2, 3
_PRIOR_KEYS = ("schema", "coef_mean", "coef_var", "sigma2_df", "sigma2_scale")
_PRIOR_SCHEMA = "seqstrata-priors/1"


def _fail(message: str, code: int = USER_ERROR) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_priors(path) -> PriorConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as err:
            raise ValueError(f"malformed config {path}: line {err.lineno} column {err.colno}: {err.msg}") from None
    unknown = sorted(set(raw) - set(_PRIOR_KEYS))
    if unknown:
        raise ValueError(f"unknown key(s) in {path}: {', '.join(map(repr, unknown))}")
    if raw.get("schema") != _PRIOR_SCHEMA:
        raise ValueError(f"{path}: schema must be {_PRIOR_SCHEMA!r}, got {raw.get('schema')!r}")
    return PriorConfig(**{k: raw[k] for k in raw if k != "schema"})


def cmd_simulate(args) -> int:
    try:
        cfg = load_scenario(args.config)
    except (OSError, ValueError) as err:
        return _fail(str(err))
    data = generate(cfg)
    out = Path(args.out)
    data.to_csv(out, with_truth=args.with_truth)
    meta = {"config": scenario_to_dict(cfg), "with_truth": bool(args.with_truth), "n_rows": len(data)}
    with open(out.with_name(out.stem + ".meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2)
    print(f"wrote {len(data)} rows to {out}")
    return 0


def cmd_fit(args) -> int:
    try:
        spec = SpecKind.parse(args.spec)
    except ValueError as err:
        return _fail(str(err))
    try:
        data = Dataset.read_csv(args.data)
    except (OSError, ValueError) as err:
        return _fail(f"cannot read dataset {args.data}: {err}")
    try:
        priors = _load_priors(args.prior_config) if args.prior_config else PriorConfig()
        mcmc = McmcConfig(burn_in=args.burn, kept=args.kept, thin=args.thin, seed=args.seed)
    except (OSError, ValueError) as err:
        return _fail(str(err))
    try:
        chains = run_chains(data, spec, priors, mcmc, n_chains=args.chains)
    except SamplerError as err:
        return _fail(str(err), NUMERIC_ERROR)
    out = Path(args.out)
    if args.chains == 1:
        paths = [out]
    else:
        paths = [out.with_name(f"{out.stem}_{j + 1}{out.suffix}") for j in range(args.chains)]
    for chain, path in zip(chains, paths):
        chain.to_csv(path)
        print(f"wrote {len(chain)} draws to {path}")
    return 0


def _read_chain(path) -> Chain:
    return Chain.read_csv(path)


def cmd_summarize(args) -> int:
    try:
        chains = [_read_chain(p) for p in args.chains]
    except (OSError, ValueError) as err:
        return _fail(str(err))
    if len(chains) == 1:
        table = summary_table(chains[0])
    else:
        labels = []
        for ch in chains:
            lab = ch.spec.value
            while lab in labels:  # same spec twice: disambiguate
                lab += "'"
            labels.append(lab)
        table = comparison_table(dict(zip(labels, chains)))
    table.to_csv(args.out, index=False)
    print(f"wrote summary for {len(chains)} chain(s) to {args.out}")
    if args.density:
        outdir = Path(args.density_dir or Path(args.out).parent)
        outdir.mkdir(parents=True, exist_ok=True)
        for ch, label in zip(chains, [c.spec.value for c in chains]):
            for name in ATE_NAMES:
                grid = density_grid(functional_draws(ch, name), n_points=args.density_points)
                path = outdir / f"density_{label}_{name.replace('.', '_')}.csv"
                if grid.is_point_mass:
                    path.write_text(f"x,density\n{grid.point_mass},inf\n")
                else:
                    import pandas as pd

                    pd.DataFrame({"x": grid.x, "density": grid.density}).to_csv(path, index=False)
        print(f"wrote density grids to {outdir}")
    return 0


def cmd_sensitivity(args) -> int:
    try:
        chain = _read_chain(args.chain)
        report = sensitivity_report(chain, level=args.level)
    except (OSError, ValueError) as err:
        return _fail(str(err))
    report.to_csv(args.out, index=False)
    print(f"wrote sensitivity report to {args.out}")
    return 0


def cmd_ipw(args) -> int:
    try:
        data = Dataset.read_csv(args.data)
        result = ipw_msm_estimate(data, n_bootstrap=args.bootstrap_reps, seed=args.seed)
    except (OSError, ValueError) as err:
        return _fail(str(err))
    result.to_frame().to_csv(args.out, index=False)
    undefined = {k: v for k, v in result.undefined.items() if v}
    if undefined:
        print(f"warning: undefined contrasts from empty cells: {undefined}", file=sys.stderr)
    print(f"wrote IPW estimates to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqstrata",
        description="Bayesian inference for two-period sequential treatments with latent strata",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic dataset from a scenario config")
    p.add_argument("--config", required=True, help="scenario config (JSON)")
    p.add_argument("--out", required=True, help="output dataset CSV")
    p.add_argument("--with-truth", action="store_true", help="include latent truth columns")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="run the Gibbs sampler on a dataset")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--spec", required=True, help="likelihood specification: lsi, si1 or si2")
    p.add_argument("--out", required=True, help="output chain CSV (suffixed per chain if --chains > 1)")
    p.add_argument("--burn", type=int, default=1000, help="burn-in sweeps (default 1000)")
    p.add_argument("--kept", type=int, default=9000, help="post-burn-in sweeps (default 9000)")
    p.add_argument("--thin", type=int, default=1, help="store every thin-th sweep")
    p.add_argument("--seed", type=int, default=0, help="chain seed")
    p.add_argument("--chains", type=int, default=1, help="number of independent chains")
    p.add_argument("--prior-config", default=None, help="priors config (JSON), optional")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("summarize", help="summary tables (and optional density grids) from chains")
    p.add_argument("chains", nargs="+", help="chain CSV path(s)")
    p.add_argument("--out", required=True, help="output summary CSV")
    p.add_argument("--density", action="store_true", help="also write per-contrast density grids")
    p.add_argument("--density-dir", default=None, help="directory for density CSVs")
    p.add_argument("--density-points", type=int, default=256)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("sensitivity", help="assignment-probability gap report from a latent-stratum chain")
    p.add_argument("chain", help="chain CSV path")
    p.add_argument("--out", required=True)
    p.add_argument("--level", type=float, default=0.95, help="credible level for the excludes-zero call")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("ipw", help="saturated inverse-probability-weighted estimates with bootstrap SEs")
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--bootstrap-reps", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ipw)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SamplerError as err:
        return _fail(str(err), NUMERIC_ERROR)
    except ValueError as err:
        return _fail(str(err))


if __name__ == "__main__":
    sys.exit(main())

"""``mixfactor`` command line: pcamix, pcarot, mfamix, predict and synth.

Exit codes: 0 ok, 1 I/O error, 2 schema/contract error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import io as mio
from . import plots
from .errors import DimensionError, NumericalError, SchemaError, UnknownLevelError, ZeroVarianceError
from .gsvd import DEFAULT_RANK_TOL
from .mfamix import fit_mfamix, group_contributions, partial_axes, partial_observations
from .pcamix import apply_coefficients, fit_pcamix
from .pcarot import DEFAULT_ANGLE_TOL, DEFAULT_MAX_SWEEPS, rotate, rotated_sqload
from .preprocess import NUMERIC, Schema, raw_design
from .synth import SynthSpec, default_spec, generate

EXIT_OK, EXIT_IO, EXIT_SCHEMA, EXIT_NUMERIC = 0, 1, 2, 3
MODEL_FILE = "model.json"
INTERCEPT = "(intercept)"


class CliError(SchemaError):
    pass


def _dims(k, prefix="dim"):
    return [f"{prefix}{i + 1}" for i in range(k)]


def _parse_types(items):
    out = {}
    for item in items or []:
        col, sep, kind = item.partition("=")
        if not sep or not col:
            raise CliError(f"bad --type {item!r}; expected COL=num|cat")
        out[col] = kind
    return out


def _parse_axes(text):
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad axes {text!r}; expected e.g. 1,2") from None
    return i, j


def _load(args):
    return mio.ingest_csv(args.data, _parse_types(args.type), args.id_col)


def _write_common(out, prefix, prep, explained, F, A_star, sqload, contrib, contrib_pct, beta):
    """Files shared by every fitted model; ``prefix`` distinguishes rotated ones."""
    k = F.shape[1]
    dims = _dims(k)
    mio.write_matrix(
        out / f"{prefix}eigenvalues.csv",
        explained,
        _dims(explained.shape[0]),
        ["eigenvalue", "percent", "cumulative"],
    )
    mio.write_matrix(out / f"{prefix}ind_coord.csv", F, prep.row_ids, dims)
    mio.write_matrix(out / f"{prefix}quanti_coord.csv", A_star[: prep.p1], prep.numeric_names, dims)
    mio.write_matrix(out / f"{prefix}levels_coord.csv", A_star[prep.p1 :], prep.level_names, dims)
    mio.write_matrix(out / f"{prefix}sqload.csv", sqload, prep.variables, dims)
    mio.write_matrix(out / f"{prefix}contrib.csv", contrib, prep.variables, dims)
    mio.write_matrix(out / f"{prefix}contrib_pct.csv", contrib_pct, prep.variables, dims)
    mio.write_matrix(out / f"{prefix}coef.csv", beta, (INTERCEPT,) + prep.col_names, dims)


def _model_json(out, method, prep, beta, args):
    mio.write_json(
        out / MODEL_FILE,
        {
            "method": method,
            "schema": prep.schema.to_dict(),
            "columns": list(prep.col_names),
            "coef": [[float(x) for x in row] for row in beta],
            "ndim": int(beta.shape[1]),
            "id_col": args.id_col,
            "rename_level": bool(args.rename_level),
        },
    )


def _summary(args, extra):
    config = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "out") and not callable(v)
    }
    for key in ("data", "groups", "model", "spec"):
        if config.get(key) is not None:
            config[key] = Path(config[key]).name
    if config.get("axes") is not None:
        config["axes"] = list(config["axes"])
    return {"config": config, **extra}


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_pcamix(args):
    table = _load(args)
    model = fit_pcamix(table, args.ndim, args.rename_level, args.rank_tol)
    out = _out_dir(args)
    _write_common(
        out, "", model.prep, model.explained, model.F, model.A_star,
        model.sqload, model.contrib, model.contrib_pct, model.beta,
    )
    _model_json(out, "pcamix", model.prep, model.beta, args)
    if args.plots:
        plots.plot_factor_model(out, model.F, model.A_star, model.sqload, model.prep, args.axes, args.color_by)
    mio.write_json(
        out / "summary.json",
        _summary(args, {
            "rank": model.rank,
            "ndim": model.ndim,
            "n": model.prep.n,
            "total_inertia": model.prep.total_inertia,
            "tolerances": {"rank_tol": args.rank_tol},
        }),
    )


def cmd_pcarot(args):
    if args.ndim is not None and args.k > args.ndim:
        raise DimensionError(f"k={args.k} exceeds ndim={args.ndim}")
    table = _load(args)
    model = fit_pcamix(table, args.ndim, args.rename_level, args.rank_tol)
    res = rotate(model, args.k, angle_tol=args.angle_tol, max_sweeps=args.max_sweeps)
    out = _out_dir(args)
    prep = model.prep
    _write_common(
        out, "", prep, model.explained, model.F, model.A_star,
        model.sqload, model.contrib, model.contrib_pct, model.beta,
    )
    sq = rotated_sqload(res)
    _write_common(
        out, "rot_", prep, res.explained, res.F_rot, res.A_star_rot,
        sq, sq, 100.0 * sq / res.lambda_rot, res.beta_rot,
    )
    mio.write_matrix(out / "T.csv", res.T, _dims(res.k), _dims(res.k))
    _model_json(out, "pcarot", prep, res.beta_rot, args)
    if args.plots:
        plots.plot_factor_model(out, model.F, model.A_star, model.sqload, prep, args.axes, args.color_by)
        plots.plot_factor_model(
            out, res.F_rot, res.A_star_rot, sq, prep, args.axes, args.color_by, prefix="rot_"
        )
    mio.write_json(
        out / "summary.json",
        _summary(args, {
            "rank": model.rank,
            "ndim": model.ndim,
            "k": res.k,
            "n": prep.n,
            "sweeps": res.sweeps,
            "backend": res.backend,
            "converged": res.converged,
            "total_inertia": prep.total_inertia,
            "tolerances": {"rank_tol": args.rank_tol, "angle_tol": args.angle_tol},
        }),
    )


def cmd_mfamix(args):
    if args.groups is None:
        raise CliError("mfamix needs --groups")
    table = _load(args)
    group_map = mio.read_groups(args.groups)
    model = fit_mfamix(table, group_map, args.ndim, args.rename_level, args.rank_tol)
    out = _out_dir(args)
    prep = model.prep
    _write_common(
        out, "", prep, model.explained, model.F, model.A_star,
        model.sqload, model.contrib, model.contrib_pct, model.beta,
    )
    dims = _dims(model.ndim)
    names = model.groups.names
    gc = group_contributions(model)
    mio.write_matrix(out / "groups_contrib.csv", gc, names, dims)

    part = partial_observations(model)
    rows = []
    for g, name in enumerate(names):
        for i, rid in enumerate(prep.row_ids):
            rows.append([rid, name] + [float(x) for x in part[g, i]])
    mio.write_rows(out / "partial_ind.csv", ["id", "group"] + dims, rows)

    axes = partial_axes(model)
    rows = []
    for name, corr in zip(names, axes):
        for d in range(corr.shape[0]):
            rows.append([name, f"dim{d + 1}"] + [float(x) for x in corr[d]])
    mio.write_rows(out / "partial_axes.csv", ["group", "component"] + dims, rows)

    rows = []
    for name, sep in zip(names, model.separate):
        for d, row in enumerate(sep.explained):
            rows.append([name, f"dim{d + 1}"] + [float(x) for x in row])
    mio.write_rows(out / "eig_separate.csv", ["group", "component", "eigenvalue", "percent", "cumulative"], rows)

    _model_json(out, "mfamix", prep, model.beta, args)
    if args.plots:
        plots.plot_factor_model(out, model.F, model.A_star, model.sqload, prep, args.axes, args.color_by)
        plots.plot_mfamix(out, model, part, gc, axes, args.axes)
    mio.write_json(
        out / "summary.json",
        _summary(args, {
            "rank": model.rank,
            "ndim": model.ndim,
            "n": prep.n,
            "groups": {
                name: {"lambda1": float(l1), "rank": sep.rank}
                for name, l1, sep in zip(names, model.groups.lambda1, model.separate)
            },
            "group_order": list(names),
            "total_inertia": float(model.eigenvalues.sum()),
            "tolerances": {"rank_tol": args.rank_tol},
        }),
    )


def cmd_predict(args):
    if args.model is None:
        raise CliError("predict needs --model DIR (the output directory of a fit)")
    path = Path(args.model)
    if path.is_dir():
        path = path / MODEL_FILE
    with open(path, encoding="utf-8") as fh:
        saved = json.load(fh)
    schema = Schema.from_dict(saved["schema"])
    # the training kinds decide how cells are parsed; explicit --type wins
    types = {v: ("num" if k == NUMERIC else "cat") for v, k in zip(schema.variables, schema.kinds)}
    types.update(_parse_types(args.type))
    id_col = args.id_col if args.id_col is not None else saved.get("id_col")
    with open(args.data, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), [])
    types = {c: k for c, k in types.items() if c in header}
    table = mio.ingest_csv(args.data, types, id_col)
    beta = np.asarray(saved["coef"], dtype=float)
    scores = apply_coefficients(beta, raw_design(table, schema))
    out = _out_dir(args)
    mio.write_matrix(out / "scores.csv", scores, table.row_ids, _dims(beta.shape[1]))


def cmd_synth(args):
    if args.spec is not None:
        spec = SynthSpec.from_json(args.spec)
        if args.seed is not None:
            spec = SynthSpec(spec.n, spec.groups, spec.strength, args.seed)
    else:
        spec = default_spec(seed=0 if args.seed is None else args.seed)
        if args.n is not None:
            spec = SynthSpec(args.n, spec.groups, spec.strength, spec.seed)
    table, group_map = generate(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    mio.write_table(out, table, id_col="id")
    if args.groups is not None:
        Path(args.groups).parent.mkdir(parents=True, exist_ok=True)
        mio.write_groups(args.groups, group_map)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixfactor",
        description="Principal component analysis of mixed numerical and categorical data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def data_opts(p, groups=False):
        p.add_argument("--data", required=True, help="input CSV with a header row")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--id-col", default=None, help="column holding row identifiers")
        p.add_argument("--type", action="append", metavar="COL=num|cat", help="force a column kind")
        if groups:
            p.add_argument("--groups", help="CSV mapping variable,group")

    def fit_opts(p, ndim_help="components to keep (default: all)"):
        p.add_argument("--ndim", type=int, default=None, help=ndim_help)
        p.add_argument("--rename-level", action="store_true", help="label levels as variable=level")
        p.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOL)
        p.add_argument("--plots", action="store_true", help="write SVG plots")
        p.add_argument("--axes", type=_parse_axes, default=(1, 2), help="plotted components, e.g. 1,2")
        p.add_argument("--color-by", default=None, help="categorical variable coloring the observation map")

    p = sub.add_parser("pcamix", help="PCA of mixed data")
    data_opts(p)
    fit_opts(p)
    p.set_defaults(func=cmd_pcamix)

    p = sub.add_parser("pcarot", help="PCAmix followed by a varimax-type rotation")
    data_opts(p)
    fit_opts(p)
    p.add_argument("--k", type=int, required=True, help="number of rotated components (>= 2)")
    p.add_argument("--angle-tol", type=float, default=DEFAULT_ANGLE_TOL)
    p.add_argument("--max-sweeps", type=int, default=DEFAULT_MAX_SWEEPS)
    p.set_defaults(func=cmd_pcarot)

    p = sub.add_parser("mfamix", help="multiple factor analysis of mixed groups")
    data_opts(p, groups=True)
    fit_opts(p, "components to keep (default: min(5, rank))")
    p.set_defaults(func=cmd_mfamix)

    p = sub.add_parser("predict", help="scores of new rows from a fitted model")
    data_opts(p)
    p.add_argument("--model", help="output directory of a fit run, or its model.json")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("synth", help="write a synthetic mixed dataset")
    p.add_argument("--spec", default=None, help="JSON spec (default: four-group layout)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--groups", default=None, help="also write the variable,group CSV here")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n", type=int, default=None, help="rows for the default layout")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_SCHEMA if exc.code else EXIT_OK
    try:
        args.func(args)
    except UnknownLevelError as exc:
        print(f"mixfactor: unseen level: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ZeroVarianceError as exc:
        print(f"mixfactor: zero variance: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except DimensionError as exc:
        print(f"mixfactor: dimension out of range: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except SchemaError as exc:
        print(f"mixfactor: schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"mixfactor: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        print(f"mixfactor: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

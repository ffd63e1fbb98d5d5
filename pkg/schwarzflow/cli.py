#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
This is the command-line tool of schwarzflow.

Functions defined in this module should not be used directly by other
modules.
"""

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

# Original modules
import schwarzflow
import schwarzflow.config as config
import schwarzflow.constants as constants
import schwarzflow.datatypes as datatypes
import schwarzflow.deturck as deturck
import schwarzflow.exceptions as exceptions
import schwarzflow.flow as flow
import schwarzflow.functional as functional
import schwarzflow.geometry as geometry
import schwarzflow.spectral as spectral

logger = logging.getLogger(__name__)


def _write_json(args, name, data):
    path = os.path.join(args.out, name)
    body = dict(data)
    body.setdefault("schema", constants.SCHEMA_VERSION)
    with open(path, "w") as f:
        json.dump(datatypes.plain(body), f, indent=2, sort_keys=True)
        f.write("\n")
    args.manifest.add(path)
    return path


def _write_csv(args, name, header, rows):
    path = os.path.join(args.out, name)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in row])
    args.manifest.add(path)
    return path


def _report(args, summary, lines):
    if args.json:
        print(json.dumps(datatypes.plain(summary), indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _eigen(settings, n=None, grid=None):
    if grid is None:
        grid = functional.Grid(geometry.Chart.P, n or settings["eigen_n"])
    return spectral.min_eig(spectral.assemble(grid),
                            shift=settings["shift"],
                            tol=settings["eig_tol"],
                            max_iter=settings["max_iter"])


def _flow_eigen(settings, cfg, grid):
    """The eigenpair of the flow grid and the p-grid eigenvalue it should
    reproduce.

    """

    eigen = _eigen(settings, grid=grid)
    reference = _eigen(settings, cfg.eigen_n).lam
    gap = abs(eigen.lam - reference) / abs(reference)
    if gap > constants.LAMBDA_AGREEMENT:
        logger.warning("flow grid lambda %.6g is %.1f%% off the p grid's "
                       "%.6g", eigen.lam, 100.0 * gap, reference)
    return eigen, reference, gap


def _verify_geometry(args):
    """Function for command ``verify-geometry``. It should not be used
    directly.

    """

    settings = args.settings
    report = geometry.verify_suite(samples=settings["samples"],
                                   seed=settings["seed"],
                                   fault=args.inject_fault)
    _write_csv(args, "geometry_oracle.csv",
               ("r", "p", "s", "component", "closed_form", "oracle",
                "abs_err"), report.rows)
    summary = report.as_dict()
    _write_json(args, "geometry.json", summary)
    _report(args, summary, [
        "{:<20} {:<6} {:.3e}".format(name, "ok" if suite["passed"]
                                     else "FAIL", suite["max_error"])
        for name, suite in sorted(report.suites.items())])
    return constants.EXIT_OK if report.passed \
        else constants.EXIT_CHECK_FAILED


def _lemma36(args):
    """Function for command ``lemma36``. It should not be used directly.

    """

    cert = functional.lemma36_certificate(args.settings["lemma_n"])
    summary = cert.as_dict()
    _write_json(args, "lemma36.json", summary)
    lines = ["total  {:.6f}".format(cert.total)]
    lines += ["{}    {:.6f} (bound {}) {}".format(
        name, item["value"], item["bound"], "ok" if item["holds"] else "FAIL")
        for name, item in sorted(cert.inequalities.items())]
    if not cert.holds:
        lines.append("failed: {}".format(", ".join(cert.failed()) or "total"))
    _report(args, summary, lines)
    return constants.EXIT_OK if cert.holds else constants.EXIT_CHECK_FAILED


def _eigen_command(args):
    """Function for command ``eigen``. It should not be used directly.

    """

    settings = args.settings
    result = _eigen(settings, args.grid_n)
    decay = spectral.decay_check(result)
    upper = spectral.upper_bound_from_lemma36(settings["lemma_n"])
    summary = {
        "grid_n": result.grid_n,
        "lambda": result.lam,
        "residual_l2": result.residual_l2,
        "iterations": result.iterations,
        "second_ritz": result.second_ritz,
        "decay": decay.as_dict(),
        "gauge": spectral.gauge_diagnostic(result),
        "upper_bound_from_lemma36": upper,
    }
    _write_json(args, "eigen.json", summary)
    mode = result.mode
    _write_csv(args, "mode.csv", ("p", "r", "u0", "u1", "u2"),
               zip(mode.grid.p.tolist(), mode.grid.r.tolist(),
                   mode.u0.tolist(), mode.u1.tolist(), mode.u2.tolist()))

    passed = (-2.0 < result.lam < 0.0
              and result.residual_l2 <= settings["residual_threshold"])
    _report(args, summary, [
        "lambda       {:.10f}".format(result.lam),
        "residual_l2  {:.3e}".format(result.residual_l2),
        "upper bound  {:.6f}".format(upper),
    ])
    return constants.EXIT_OK if passed else constants.EXIT_CHECK_FAILED


def _flow(args):
    """Function for command ``flow``. It should not be used directly.

    """

    cfg = flow.FlowConfig(args.settings)
    grid = cfg.grid()
    eigen, reference, gap = _flow_eigen(args.settings, cfg, grid)
    traj = flow.run(cfg.epsilon, cfg.t_end, grid, eigen,
                    background=cfg.background, dt=cfg.dt,
                    record_every=cfg.record_every, eps_cap=cfg.eps_cap)
    _write_csv(args, "trajectory.csv", flow.TRAJECTORY_COLUMNS,
               ([row[c] for c in flow.TRAJECTORY_COLUMNS]
                for row in traj.rows))

    summary = {
        "epsilon": traj.epsilon,
        "lambda": traj.lam,
        "lambda_reference": reference,
        "lambda_gap": gap,
        "t0": traj.t0,
        "t_end": cfg.t_end,
        "t_final": traj.final.t,
        "reason": traj.reason,
        "steps": traj.steps,
        "dt": traj.dt,
        "background": traj.background,
        "growth": None,
    }
    passed = traj.reason == "t_end"
    if traj.epsilon == 0:
        # the fixed point does not depend on the mode
        drift = max(float(np.max(np.abs(s.v - 1.0))) for s in traj.states)
        summary["drift"] = drift
        passed = passed and drift <= constants.DRIFT_TOL
    elif traj.warning:
        # blow-up above the cap is a result, not a failure
        summary["warning"] = traj.warning
        passed = gap <= constants.LAMBDA_AGREEMENT
    else:
        passed = passed and gap <= constants.LAMBDA_AGREEMENT
        try:
            fit = flow.growth_fit(traj, cfg.linear_efolds)
        except exceptions.DataError as err:
            logger.warning("no growth fit: %s", err)
            passed = False
        else:
            fit["matches"] = flow.growth_matches(fit, traj.lam)
            summary["growth"] = fit
            passed = passed and fit["matches"]
    _write_json(args, "flow_summary.json", summary)

    lines = ["reason  {} at t={:.6g}".format(traj.reason, traj.final.t)]
    if summary["growth"]:
        lines.append("slope   {:.6f} (expected {:.6f})".format(
            summary["growth"]["slope"], -traj.lam))
    if "drift" in summary:
        lines.append("drift   {:.3e}".format(summary["drift"]))
    _report(args, summary, lines)
    return constants.EXIT_OK if passed else constants.EXIT_CHECK_FAILED


def _ancient(args):
    """Function for command ``ancient``. It should not be used directly.

    """

    settings = args.settings
    cfg = flow.FlowConfig(settings)
    grid = cfg.grid()
    eigen, reference, gap = _flow_eigen(settings, cfg, grid)
    result = flow.ancient_limit(settings["epsilons"], settings["t_common"],
                                grid, eigen,
                                background=settings["ancient_background"],
                                dt=cfg.dt, record_every=cfg.record_every,
                                workers=settings["workers"])
    columns = ("epsilon", "t0", "t_final", "reason", "max_opening",
               "distance_to_next", "flagged")
    _write_csv(args, "ancient.csv", columns,
               ([row[c] for c in columns] for row in result["rows"]))

    check = {"passed": False}
    last = result["trajectories"][-1]
    try:
        dmap = deturck.deturck_map(last)
        ricci, rdt = deturck.ricci_flow_residual(last, dmap)
    except exceptions.DeTurckCrossingError as err:
        logger.warning("%s", err)
        check["crossing"] = list(err.location)
    else:
        check.update(ricci_residual=ricci, rdt_residual=rdt,
                     passed=deturck.residual_check(ricci, rdt))

    summary = {key: result[key] for key in ("rows", "distances", "cauchy",
                                            "cone_bound", "t_common")}
    summary["background"] = settings["ancient_background"]
    summary["lambda"] = eigen.lam
    summary["lambda_reference"] = reference
    summary["deturck"] = check
    _write_json(args, "ancient.json", summary)
    _report(args, summary, [
        "distances  {}".format(", ".join(
            "{:.4e}".format(d) for d in result["distances"])),
        "cauchy     {}".format(result["cauchy"]),
        "de Turck   {}".format("ok" if check["passed"] else "FAIL"),
    ])
    passed = (result["cauchy"] and check["passed"]
              and gap <= constants.LAMBDA_AGREEMENT)
    return constants.EXIT_OK if passed else constants.EXIT_CHECK_FAILED


def _parser():
    parser = argparse.ArgumentParser(
        description="Numerical checks of the Ricci-flow instability of "
                    "Euclidean Schwarzschild.",
        epilog="See '%(prog)s <command> --help' for details.",
        prog="schwarzflow")
    parser.add_argument("--version", action="version",
                        version="%(prog)s " + schwarzflow.__version__)
    parser.add_argument("-c", "--config",
                        help="key = value file overriding the defaults.")
    parser.add_argument("-o", "--out", default=".",
                        help="Directory for the output files.")
    parser.add_argument("--json", action="store_true",
                        help="Print the summary as JSON.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="INFO with -v, DEBUG with -vv.")
    parser.add_argument("--inject-fault", help=argparse.SUPPRESS)
    subparsers = parser.add_subparsers(
        help="Commands this tool accepts.",
        dest="command")

    parser_geometry = subparsers.add_parser(
        "verify-geometry", help="Check curvature closed forms of g0.")
    parser_geometry.add_argument("--samples", type=int,
                                 help="Number of random radii.")
    parser_geometry.set_defaults(func=_verify_geometry)

    parser_lemma = subparsers.add_parser(
        "lemma36", help="Certify the cut-off test tensor.")
    parser_lemma.add_argument("--n", type=int, dest="lemma_n",
                              help="Cut-off parameter.")
    parser_lemma.set_defaults(func=_lemma36)

    parser_eigen = subparsers.add_parser(
        "eigen", help="Lowest eigenpair of the Lichnerowicz Laplacian.")
    parser_eigen.add_argument("--grid-n", type=int,
                              help="Cells of the p grid.")
    parser_eigen.set_defaults(func=_eigen_command)

    parser_flow = subparsers.add_parser(
        "flow", help="Ricci-de Turck flow from g0 + eps h.")
    parser_flow.add_argument("--epsilon", type=float,
                             help="Starting amplitude.")
    parser_flow.set_defaults(func=_flow)

    parser_ancient = subparsers.add_parser(
        "ancient", help="Approximate the ancient solution.")
    parser_ancient.add_argument("--workers", type=int,
                                help="Runs in parallel.")
    parser_ancient.set_defaults(func=_ancient)
    return parser


def main(argv=None):
    """This function will be used when this module is run as a script.

    :returns: The exit code.
    :rtype: int
    """

    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code

    logging.basicConfig(
        level=(logging.WARNING, logging.INFO, logging.DEBUG)[
            min(args.verbose, 2)],
        format="%(levelname)s %(name)s: %(message)s")

    if not hasattr(args, "func"):
        parser.print_help()
        return constants.EXIT_USAGE

    overrides = {key: getattr(args, key, None)
                 for key in ("samples", "lemma_n", "epsilon", "workers")}
    try:
        args.settings = config.load(args.config, overrides)
    except exceptions.ConfigError as err:
        print("config error: {}".format(err), file=sys.stderr)
        return constants.EXIT_USAGE

    os.makedirs(args.out, exist_ok=True)
    args.manifest = datatypes.RunManifest(args.command, args.settings)
    try:
        code = args.func(args)
    except exceptions.ParameterError as err:
        print("error: {}".format(err), file=sys.stderr)
        code = constants.EXIT_USAGE
    except exceptions.SchwarzflowError as err:
        logger.error("%s: %s", type(err).__name__, err)
        print("numerical failure: {}".format(err), file=sys.stderr)
        code = constants.EXIT_NUMERICAL
    manifest = args.manifest.finish().as_dict()
    manifest["exit_code"] = code
    with open(os.path.join(args.out, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())

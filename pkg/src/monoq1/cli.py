"""Command-line entry point: ``monoq1 {solve,convergence,check,export-matrix}``.

Exit codes: 0 success, 1 usage or I/O error, 2 certification failure
(inadmissible element, failed M-matrix check or failed mesh condition).
"""
import argparse
import logging
import os
import sys
from dataclasses import replace

from . import __version__
from .analysis import convergence_study, mesh_condition_check, nodal_errors
from .assembly import assemble, export_matrix, export_vector
from .config import ConfigError, RunConfig, load_config, parse_value
from .errors import (AdmissibilityError, EllipticityError, MeshParseError, MonoQ1Error,
                     UnknownProblemError)
from .mesh import load_mesh, uniform_mesh
from .monotone import check_m_matrix
from .problem import builtin_problem
from .solve import export_solution, solve_system

log = logging.getLogger("monoq1")

EXIT_OK, EXIT_USAGE, EXIT_CERT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_setup_args(p):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--problem", help="builtin problem name")
    p.add_argument("--domain", help="x0,x1,y0,y1 (accepts 'pi')")
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--mesh", dest="mesh_file", help="mesh file (overrides nx/ny)")
    p.add_argument("--policy", dest="lambda_policy", choices=("upper", "midpoint"))
    p.add_argument("--c", dest="c_override", type=float, help="constant reaction coefficient")
    p.add_argument("--tol", dest="solver_tol", type=float)
    p.add_argument("--output-dir", dest="output_dir")


def build_parser():
    parser = _Parser(prog="monoq1", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="assemble, certify and solve one configuration")
    _add_setup_args(p)
    p.add_argument("--method", choices=("cg", "dense"), default="cg")

    p = sub.add_parser("convergence", help="convergence study on doubling uniform meshes")
    _add_setup_args(p)
    p.add_argument("--levels", required=True, help="comma-separated mesh counts, e.g. 4,8,16")
    p.add_argument("--output", help="CSV path (default: stdout)")
    p.add_argument("--dat", help="also write a gnuplot-style data file")

    p = sub.add_parser("check", help="evaluate the quadrilateral M-matrix mesh condition")
    _add_setup_args(p)
    p.add_argument("--strict", action="store_true", help="require strict inequalities")

    p = sub.add_parser("export-matrix", help="write the interior matrix and load vector")
    _add_setup_args(p)
    p.add_argument("--output", required=True, help="matrix triplet file")
    p.add_argument("--load", help="load-vector file")
    return parser


def _resolve_config(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    for key in ("problem", "nx", "ny", "mesh_file", "lambda_policy", "c_override",
                "solver_tol", "output_dir"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    if getattr(args, "domain", None):
        overrides["domain"] = parse_value("domain", args.domain)
    if "nx" in overrides and "ny" not in overrides:
        overrides["ny"] = overrides["nx"]
    return replace(cfg, **overrides)


def _setup(cfg):
    problem = builtin_problem(cfg.problem, c=cfg.c_override, domain=cfg.domain)
    if cfg.mesh_file:
        mesh = load_mesh(cfg.mesh_file)
    else:
        mesh = uniform_mesh(cfg.nx, cfg.ny, problem.domain)
    return problem, mesh


def _header(problem, cfg, mesh):
    return (f"problem = {problem.name}\nc = {problem.c_value}\n"
            f"lambda_policy = {cfg.lambda_policy}\nmesh = {mesh.kind} "
            f"({mesh.n_vertices} vertices, {mesh.n_elements} elements)\n")


def cmd_solve(args):
    cfg = _resolve_config(args)
    problem, mesh = _setup(cfg)
    system = assemble(mesh, problem, cfg.lambda_policy)
    report = check_m_matrix(system.A)
    os.makedirs(cfg.output_dir, exist_ok=True)
    header = _header(problem, cfg, mesh)
    with open(os.path.join(cfg.output_dir, "mmatrix_report.txt"), "w") as fh:
        fh.write(header + report.to_text() + "\n")
    with open(os.path.join(cfg.output_dir, "mmatrix_report.kv"), "w") as fh:
        fh.write(header + report.to_kv())
    print(header + report.to_text())
    if not report.certified:
        return EXIT_CERT
    res = solve_system(system, args.method, cfg.solver_tol)
    export_solution(mesh, res.u, os.path.join(cfg.output_dir, "solution.txt"))
    print(f"solver = {res.method}, iterations = {res.iterations}, residual = {res.residual:.3e}")
    if problem.u_exact is not None:
        l2, linf = nodal_errors(res, mesh, problem)
        print(f"l2 error = {l2:.6g}, linf error = {linf:.6g}")
    return EXIT_OK


def cmd_convergence(args):
    cfg = _resolve_config(args)
    try:
        levels = [int(t) for t in args.levels.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"bad --levels {args.levels!r}") from None
    problem = builtin_problem(cfg.problem, c=cfg.c_override, domain=cfg.domain)
    table = convergence_study(problem, levels, cfg.lambda_policy, rel_tol=cfg.solver_tol)
    csv = table.to_csv()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    if args.dat:
        with open(args.dat, "w") as fh:
            fh.write(table.to_dat())
    for row in table.rows:
        if not row.certified:
            print(f"level {row.n}: M-matrix certification failed\n{row.report.to_text()}",
                  file=sys.stderr)
    return EXIT_OK if table.certified else EXIT_CERT


def cmd_check(args):
    cfg = _resolve_config(args)
    problem, mesh = _setup(cfg)
    report = mesh_condition_check(mesh, problem, strict=args.strict)
    print(report.to_text())
    return EXIT_OK if report.passed else EXIT_CERT


def cmd_export_matrix(args):
    cfg = _resolve_config(args)
    problem, mesh = _setup(cfg)
    system = assemble(mesh, problem, cfg.lambda_policy)
    export_matrix(system, args.output)
    if args.load:
        export_vector(system.b, args.load)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "convergence": cmd_convergence, "check": cmd_check,
            "export-matrix": cmd_export_matrix}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (AdmissibilityError, EllipticityError) as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return EXIT_CERT
    except (ConfigError, UnknownProblemError, MeshParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MonoQ1Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

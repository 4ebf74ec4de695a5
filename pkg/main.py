#!/usr/bin/env python3
"""
thicket-lab command line.

  params GRAPH            thicket number, vinewidth, treewidth and VC-dimension with certificates
  gaps GAME               exact packing/covering report
  allocate GAME           stabilizing allocation with its packing witness
  generate graph|game     edge lists and game documents for the named families
  reproduce EXPERIMENT    experiment tables
  verify-cert BUNDLE      re-validate a certificate bundle (JSON or .cbor frame)

Exit status: 0 all checks pass, 1 a check failed, 2 input error, 3 budget exceeded.
Documents go to stdout (or --out); progress and the HASH line go to stderr.
"""
import argparse
from dataclasses import replace
import os
import random
import sys

import documents
import experiments
from discrete_solvers import DEFAULT_NODE_BUDGET, min_hitting_set
from games import (ImplicitPathPowerGame, clique_grid_game, clique_half_game, grid_rowcol_game,
                   pathpower_explicit_game, primal_gap_game, random_game, thicket_game)
from graph_core import FAMILIES, format_graph, generate, random_connected_graph, random_tree
from report_log import OutputCapture, banner, progress
from solver_errors import EXIT_ASSERTION, EXIT_OK, InputError, LabError, exit_code_for
from stability import gap_report, sqrt_allocation, vine_allocation
from vc_dim import vc_dimension_exact
from width_params import (MAX_WIDTH_VERTICES, elimination_decomposition, thicket_number_exact,
                          treewidth_ordering, vinewidth_exact)

GAME_CONSTRUCTIONS = ("grid-rowcol", "clique-grid", "clique-half", "thicket", "primal-gap",
                      "path-power", "random")


def emit(doc, args):
    """Write a document to --out (a .cbor path gets a binary frame) or stdout."""
    progress(f"HASH: {documents.fingerprint(doc)}")
    if args.out:
        if args.out.endswith(".cbor"):
            documents.write_frame(args.out, doc)
        else:
            documents.write_text(args.out, documents.dumps_json(doc))
        progress(f"  Saved: {args.out}")
    else:
        sys.stdout.write(documents.dumps_json(doc))


def cmd_params(args):
    g = documents.load_graph(args.graph)
    banner(f"params {args.graph} (n={g.n}, m={len(g.edges)})")
    limit = args.max_vertices or MAX_WIDTH_VERTICES
    d, shatter = vc_dimension_exact(g)
    tau, thicket = thicket_number_exact(g, limit, args.budget_nodes, upper_bound=d)
    nu, vine = vinewidth_exact(g, limit, args.budget_nodes)
    omega, order = treewidth_ordering(g)
    certificates = [
        documents.thicket_certificate(thicket, tau),
        documents.decomposition_certificate(vine),
        documents.decomposition_certificate(elimination_decomposition(g, order)),
    ]
    if shatter.shattered_set:
        certificates.append(documents.shatter_certificate(shatter))
    doc = documents.certificate_bundle(g, certificates)
    doc.update({"tau": tau, "nu": nu, "omega": omega, "d": d})
    emit(doc, args)
    return EXIT_OK


def cmd_gaps(args):
    game = documents.load_game(args.game)
    banner(f"gaps {args.game} ({len(game.coalitions)} coalitions)")
    tau = args.assert_tau
    if tau is None and args.compute_tau:
        tau, _ = thicket_number_exact(game.graph, args.max_vertices or MAX_WIDTH_VERTICES,
                                      args.budget_nodes)
    report = gap_report(game, tau, node_budget=args.budget_nodes)
    emit(documents.gap_report_document(report), args)
    for name, ok in sorted(report.checks.items()):
        progress(f"  {name}: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_ASSERTION


def _vine_from_file(path, g):
    bundle = documents.load_bundle(path)
    certificates = bundle.get("certificates") if isinstance(bundle, dict) else None
    if not isinstance(certificates, list):
        raise InputError(f"{path} is not a certificate bundle")
    for cert in certificates:
        if isinstance(cert, dict) and cert.get("kind") == "vine":
            violations = documents.certificate_violations(g, cert)
            if violations:
                raise InputError(f"{path}: vine certificate does not fit the game graph: "
                                 + "; ".join(violations))
            return documents.decomposition_from_certificate(g, cert)
    raise InputError(f"{path} holds no vine certificate")


def cmd_allocate(args):
    game = documents.load_game(args.game)
    banner(f"allocate {args.game} ({args.method})")
    if args.method == "sqrt":
        allocation = sqrt_allocation(game)
        packing = gap_report(game, node_budget=args.budget_nodes).certificates["packing"]
        certificates = [documents.allocation_certificate(allocation),
                        documents.packing_certificate(packing.coalitions, packing.value)]
    else:
        if args.vine:
            d = _vine_from_file(args.vine, game.graph)
        else:
            _, d = vinewidth_exact(game.graph, args.max_vertices or MAX_WIDTH_VERTICES,
                                   args.budget_nodes, cross_check=False)
        allocation, witness, _ = vine_allocation(game, d)
        certificates = [documents.decomposition_certificate(d),
                        documents.allocation_certificate(allocation),
                        documents.packing_certificate(witness.coalitions, witness.value)]
    emit(documents.certificate_bundle(game.graph, certificates, game), args)
    return EXIT_OK


def _int_params(values, count, what):
    if len(values) != count:
        raise InputError(f"{what} takes {count} integer parameter(s), got {len(values)}")
    try:
        return [int(v) for v in values]
    except ValueError as e:
        raise InputError(f"{what}: parameters must be integers, got {values}") from e


def build_graph(family, params, seed):
    rng = random.Random(f"{seed}:graph:{family}:{':'.join(params)}")
    if family == "random":
        if len(params) != 2:
            raise InputError("random takes n and p")
        try:
            n, p = int(params[0]), float(params[1])
        except ValueError as e:
            raise InputError(f"random: bad parameters {params}") from e
        return random_connected_graph(n, p, rng)
    if family == "random-tree":
        return random_tree(*_int_params(params, 1, family), rng)
    if family in FAMILIES:
        return generate(family, *_int_params(params, FAMILIES[family][1], family))
    return generate(family, *params)


def build_game(construction, params, seed, args):
    if construction == "grid-rowcol":
        return grid_rowcol_game(*_int_params(params, 1, construction))
    if construction == "clique-grid":
        return clique_grid_game(*_int_params(params, 1, construction))
    if construction == "clique-half":
        return clique_half_game(*_int_params(params, 1, construction))
    if construction == "path-power":
        return pathpower_explicit_game(ImplicitPathPowerGame(*_int_params(params, 3, construction)))
    if not params:
        raise InputError(f"{construction} needs a graph family and its parameters")
    g = build_graph(params[0], params[1:], seed)
    limit = args.max_vertices or MAX_WIDTH_VERTICES
    if construction == "thicket":
        _, t = thicket_number_exact(g, limit, args.budget_nodes)
        return thicket_game(g, t)
    if construction == "primal-gap":
        _, t = thicket_number_exact(g, limit, args.budget_nodes)
        x = min_hitting_set(t.sets, g.n, args.budget_nodes)
        return primal_gap_game(g, t, x, node_budget=args.budget_nodes)
    if construction == "random":
        return random_game(g, random.Random(f"{seed}:game"))
    raise InputError(f"unknown game construction {construction!r}; "
                     f"known: {', '.join(GAME_CONSTRUCTIONS)}")


def cmd_generate(args):
    if args.kind == "graph":
        g = build_graph(args.name, args.params, args.seed)
        text = format_graph(g)
        if args.out:
            documents.write_text(args.out, text)
            progress(f"  Saved: {args.out}")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    emit(documents.game_document(build_game(args.name, args.params, args.seed, args)), args)
    return EXIT_OK


def cmd_reproduce(args):
    if args.quick:
        config = experiments.ExperimentConfig.quick(args.experiment)
    else:
        config = experiments.ExperimentConfig(args.experiment)
    config = replace(config, seed=args.seed, node_budget=args.budget_nodes, workers=args.workers,
                     max_vertices=args.max_vertices or config.max_vertices, out_dir=args.out)
    banner(f"reproduce {config.name}")
    rows = experiments.run_experiment(config)
    doc = experiments.experiment_document(config, rows)
    csv_text = experiments.rows_csv(rows)

    if config.out_dir:
        json_path = os.path.join(config.out_dir, f"{config.name}.json")
        csv_path = os.path.join(config.out_dir, f"{config.name}.csv")
        documents.write_text(json_path, documents.dumps_json(doc))
        documents.write_text(csv_path, csv_text)
        progress(f"  Saved: {json_path}")
        progress(f"  Saved: {csv_path}")
    elif args.format == "csv":
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(documents.dumps_json(doc))
    progress(f"HASH: {documents.fingerprint(doc)}")

    if args.plot:
        import visualize
        directory = config.out_dir or "plots"
        visualize.save_ratio_chart(rows, f"{config.name}: measured vs bound",
                                   os.path.join(directory, f"{config.name}.pdf"))

    totals = doc["summary"]
    progress(f"  {totals['passed']}/{totals['rows']} passed, {totals['failed']} failed, "
             f"{totals['budget']} over budget, {totals['errors']} errors")
    return totals["exit_status"]


def cmd_verify_cert(args):
    bundle = documents.load_bundle(args.bundle)
    banner(f"verify-cert {args.bundle}")
    results = documents.verify_bundle(bundle, os.path.dirname(os.path.abspath(args.bundle)))
    failed = False
    for index, kind, violations in results:
        if violations:
            failed = True
            print(f"certificate {index} ({kind}): INVALID")
            for violation in violations:
                print(f"  - {violation}")
        else:
            print(f"certificate {index} ({kind}): valid")
    return EXIT_ASSERTION if failed else EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-nodes", type=int, default=DEFAULT_NODE_BUDGET,
                        help="search node budget per solver call")
    common.add_argument("--max-vertices", type=int, default=None,
                        help="raise the vertex limit of the exact width searches")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output path (directory for reproduce)")
    common.add_argument("--log", action="store_true", help="tee output into logs/")

    parser = argparse.ArgumentParser(prog="thicket-lab", description=__doc__.split("\n\n")[0])
    commands = parser.add_subparsers(dest="command", required=True)

    params = commands.add_parser("params", parents=[common], help="graph width parameters")
    params.add_argument("graph")
    params.set_defaults(func=cmd_params)

    gaps = commands.add_parser("gaps", parents=[common], help="packing/covering report")
    gaps.add_argument("game")
    gaps.add_argument("--assert-tau", type=int, default=None,
                      help="check every ratio against this thicket number")
    gaps.add_argument("--compute-tau", action="store_true",
                      help="compute the thicket number of the game graph")
    gaps.set_defaults(func=cmd_gaps)

    allocate = commands.add_parser("allocate", parents=[common], help="stabilizing allocation")
    allocate.add_argument("game")
    allocate.add_argument("--method", choices=("vine", "sqrt"), default="vine")
    allocate.add_argument("--vine", default=None, help="bundle holding the vine decomposition")
    allocate.set_defaults(func=cmd_allocate)

    gen = commands.add_parser("generate", parents=[common], help="graphs and game documents")
    gen.add_argument("kind", choices=("graph", "game"))
    gen.add_argument("name", help="graph family or game construction")
    gen.add_argument("params", nargs="*")
    gen.set_defaults(func=cmd_generate)

    reproduce = commands.add_parser("reproduce", parents=[common], help="experiment tables")
    reproduce.add_argument("experiment", choices=sorted(experiments.EXPERIMENTS))
    reproduce.add_argument("--format", choices=("json", "csv"), default="json")
    reproduce.add_argument("--workers", type=int, default=1)
    reproduce.add_argument("--quick", action="store_true", help="reduced sample sizes")
    reproduce.add_argument("--plot", action="store_true", help="write a PDF chart")
    reproduce.set_defaults(func=cmd_reproduce)

    verify = commands.add_parser("verify-cert", parents=[common], help="re-validate certificates")
    verify.add_argument("bundle")
    verify.set_defaults(func=cmd_verify_cert)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    capture = OutputCapture(args.command).start() if args.log else None
    try:
        if args.budget_nodes < 1:
            raise InputError("--budget-nodes must be positive")
        return args.func(args)
    except LabError as e:
        progress(f"error: {e}")
        return exit_code_for(e)
    except (KeyError, TypeError, AttributeError, ValueError) as e:
        # structure the document loaders did not anticipate
        progress(f"error: malformed input: {e!r}")
        return exit_code_for(e)
    finally:
        if capture:
            capture.stop()


if __name__ == "__main__":
    sys.exit(main())

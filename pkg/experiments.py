#!/usr/bin/env python3
"""
Reproducible experiments over graph families and seeded random games.

Every experiment expands into a list of instances. Instances run on worker
threads fed from a queue; rows come back sorted by instance identifier, so
the table does not depend on completion order. A BudgetExceeded turns into a
row with status "budget" and the run goes on.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import queue
import random
import threading

import pandas as pd

from discrete_solvers import (DEFAULT_NODE_BUDGET, integral_covering, integral_packing,
                              min_hitting_set, minimum_hitting_sets)
from exact_lp import covering_lp, format_rational, packing_lp
from games import (ImplicitPathPowerGame, clique_grid_game, clique_half_game, grid_rowcol_game,
                   pathpower_cover_number, pathpower_explicit_game, pathpower_frac_upper,
                   pathpower_lower_bound, primal_gap_game, random_game, random_simple_game,
                   thicket_game)
from graph_core import (clique_graph, connected_set_masks, grid_graph, min_vertex_separator,
                        path_graph, path_power_graph, random_connected_graph, random_tree,
                        small_connected_graphs, star_graph)
from report_log import progress
from solver_errors import (EXIT_ASSERTION, EXIT_BUDGET, EXIT_OK, BudgetExceeded, InputError,
                           LabError)
from stability import gap_report, sqrt_allocation, sqrt_bound_holds, vine_allocation
from vc_dim import ShatterWitness, is_shattered, justified_packing, vc_dimension_exact
from width_params import (MAX_WIDTH_VERTICES, clique_majority_thicket, clique_vine,
                          elimination_decomposition, grid_column_vine, grid_cross_thicket,
                          internal_nodes, node_separator_check, pad_labels, pathpower_vine,
                          thicket_number_exact, treewidth_ordering, validate_thicket,
                          validate_tree_decomposition, validate_vine, vine_to_tree,
                          vinewidth_exact)

STATUS_OK = "ok"
STATUS_BUDGET = "budget"
STATUS_ERROR = "error"

DUAL_GRID_KS = (3, 4, 5)
DUAL_CLIQUE_NS = (4, 9)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    seed: int = 0
    node_budget: int = DEFAULT_NODE_BUDGET
    max_vertices: int = MAX_WIDTH_VERTICES
    small_graph_n: int = 6
    minmax_random: int = 50
    minmax_random_n: int = 7
    games: int = 200
    game_max_n: int = 8
    clique_ns: tuple = (4, 5, 6, 7, 8)
    clique_random: int = 100
    clique_random_ns: tuple = (4, 5, 6, 7)
    sqrt_games: int = 100
    sqrt_max_n: int = 16
    tree_games: int = 100
    tree_max_n: int = 10
    separator_thickets: int = 50
    pathpower_ns: tuple = (6, 9, 12)
    pathpower_max_n: int = 12
    workers: int = 1
    out_dir: str = None

    def __post_init__(self):
        if self.node_budget < 1:
            raise InputError("node budget must be positive")
        if self.workers < 1:
            raise InputError("worker count must be positive")

    @classmethod
    def quick(cls, name, **overrides):
        """Reduced sample sizes for smoke runs and the test suite."""
        sizes = dict(small_graph_n=4, minmax_random=3, minmax_random_n=6, games=8, game_max_n=6,
                     clique_ns=(4, 5, 6), clique_random=3, clique_random_ns=(4, 5),
                     sqrt_games=5, sqrt_max_n=9, tree_games=6, tree_max_n=7,
                     separator_thickets=4, pathpower_ns=(6,), pathpower_max_n=6)
        sizes.update(overrides)
        return cls(name, **sizes)

    def rng(self, stream, index):
        """Random stream fully determined by the seed, a stream name and an index."""
        return random.Random(f"{self.seed}:{stream}:{index}")


@dataclass(frozen=True)
class Outcome:
    fields: dict
    checks: dict
    measured: Fraction = None
    bound: Fraction = None


@dataclass(frozen=True)
class ReportRow:
    instance: str
    fields: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    status: str = STATUS_OK
    detail: str = ""
    measured: Fraction = None
    bound: Fraction = None

    @property
    def passed(self):
        return self.status == STATUS_OK and all(self.checks.values())


@dataclass(frozen=True)
class Task:
    instance: str
    run: object


# --- shared instance corpora ---

def _corpus_graphs(config):
    graphs = [(f"small-{i:03d}", g)
              for i, g in enumerate(small_connected_graphs(config.small_graph_n))]
    for i in range(config.minmax_random):
        rng = config.rng("minmax-graph", i)
        graphs.append((f"random-{i:03d}",
                       random_connected_graph(config.minmax_random_n, 0.4, rng)))
    return graphs


def explicit_random_game(config, index):
    """The shared random game corpus; seeded independently of the experiment name."""
    rng = config.rng("games", index)
    n = rng.randint(2, config.game_max_n)
    g = random_connected_graph(n, 0.4, rng)
    return random_game(g, rng, max_coalitions=15, max_value=3)


def _width(g, config):
    return vinewidth_exact(g, max(config.max_vertices, g.n), config.node_budget, cross_check=False)


def _tau(g, config):
    return thicket_number_exact(g, max(config.max_vertices, g.n), config.node_budget)


# --- experiments ---

def minmax_tasks(config):
    def check(g):
        def run():
            tau, thicket = _tau(g, config)
            nu, d = _width(g, config)
            return Outcome(
                {"n": g.n, "m": len(g.edges), "tau": tau, "nu": nu},
                {"tau_eq_nu": tau == nu,
                 "thicket_valid": not validate_thicket(g, thicket),
                 "vine_valid": not validate_vine(g, d) and d.width == nu})
        return run
    return [Task(name, check(g)) for name, g in _corpus_graphs(config)]


def strong_duality_tasks(config):
    def check(index):
        def run():
            game = explicit_random_game(config, index)
            covering, packing = covering_lp(game), packing_lp(game)
            return Outcome(
                {"n": game.graph.n, "coalitions": len(game.coalitions),
                 "kappa_f": covering.objective, "rho_f": packing.objective},
                {"strong_duality": covering.objective == packing.objective})
        return run
    return [Task(f"game-{i:03d}", check(i)) for i in range(config.games)]


def _report_outcome(report, extra=None, checks=None, measured=None, bound=None):
    fields = {"kappa": report.kappa, "kappa_f": report.kappa_f, "rho": report.rho,
              "rho_f": report.rho_f, "ratio_pc": report.ratio_pc}
    fields.update(extra or {})
    all_checks = dict(report.checks)
    all_checks.update(checks or {})
    return Outcome(fields, all_checks, measured, bound)


def _named_thicket_graphs():
    return [("path5", path_graph(5)), ("K4", clique_graph(4)), ("K6", clique_graph(6)),
            ("R3", grid_graph(3))]


def sandwich_tasks(config):
    def random_check(index):
        def run():
            game = explicit_random_game(config, index)
            tau, _ = _tau(game.graph, config)
            omega, _ = treewidth_ordering(game.graph)
            report = gap_report(game, tau, omega, config.node_budget)
            return _report_outcome(report, {"n": game.graph.n, "tau": tau, "omega": omega},
                                   measured=report.ratio_pc, bound=Fraction(tau))
        return run

    def thicket_check(g):
        def run():
            tau, thicket = _tau(g, config)
            report = gap_report(thicket_game(g, thicket), tau, node_budget=config.node_budget)
            return _report_outcome(report, {"n": g.n, "tau": tau},
                                   {"ratio_eq_tau": report.ratio_pc == tau},
                                   report.ratio_pc, Fraction(tau))
        return run

    tasks = [Task(f"game-{i:03d}", random_check(i)) for i in range(config.games)]
    tasks += [Task(f"thicket-{name}", thicket_check(g)) for name, g in _named_thicket_graphs()]
    return tasks


def dual_grid_tasks(config):
    def grid_check(k):
        def run():
            report = gap_report(grid_rowcol_game(k), node_budget=config.node_budget)
            return _report_outcome(report, {"k": k},
                                   {"rho_eq_1": report.rho == 1,
                                    "rho_f_eq_half_k": report.rho_f == Fraction(k, 2)},
                                   report.gap_dual, Fraction(k, 2))
        return run

    def clique_check(n):
        def run():
            report = gap_report(clique_grid_game(n), node_budget=config.node_budget)
            tau = (n + 1) // 2
            return _report_outcome(report, {"n": n, "tau": tau},
                                   {"dual_gap_sq_le_8tau": report.gap_dual ** 2 <= 8 * tau},
                                   report.gap_dual ** 2, Fraction(8 * tau))
        return run

    tasks = [Task(f"grid-rowcol-{k}", grid_check(k)) for k in DUAL_GRID_KS]
    tasks += [Task(f"clique-grid-{n:02d}", clique_check(n)) for n in DUAL_CLIQUE_NS]
    return tasks


def clique_random_game(config, n, index):
    return random_simple_game(clique_graph(n), config.rng(f"clique-{n}", index))


def _clique_primal_bound(n):
    return Fraction((n + 1) // 2, 2) + 1


def primal_clique_tasks(config):
    def half_check(n):
        def run():
            report = gap_report(clique_half_game(n), node_budget=config.node_budget)
            half = (n + 1) // 2
            return _report_outcome(report, {"n": n},
                                   {"kappa_eq_floor_half_plus_1": report.kappa == n // 2 + 1,
                                    "kappa_f_eq_n_over_ceil_half": report.kappa_f == Fraction(n, half),
                                    "primal_gap_le_bound": report.gap_primal <= _clique_primal_bound(n)},
                                   report.gap_primal, _clique_primal_bound(n))
        return run

    def random_check(n, index):
        def run():
            game = clique_random_game(config, n, index)
            report = gap_report(game, node_budget=config.node_budget)
            bound = _clique_primal_bound(n)
            return _report_outcome(report, {"n": n},
                                   {"primal_gap_le_bound": report.gap_primal <= bound},
                                   report.gap_primal, bound)
        return run

    tasks = [Task(f"half-{n:02d}", half_check(n)) for n in config.clique_ns]
    tasks += [Task(f"random-K{n:02d}-{i:03d}", random_check(n, i))
              for n in config.clique_random_ns for i in range(config.clique_random)]
    return tasks


def _primal_gap_graphs():
    """(name, graph, maximum thicket, width-tau vine) for the primal-gap constructions."""
    return [("R3", grid_graph(3), grid_cross_thicket(3), grid_column_vine(3)),
            ("K6", clique_graph(6), clique_majority_thicket(6), clique_vine(6))]


def _primal_gap_game(g, thicket, config):
    x = min_hitting_set(thicket.sets, g.n, config.node_budget)
    game = primal_gap_game(g, thicket, x, max_members=len(thicket.sets),
                           node_budget=config.node_budget)
    return game, x.size


def primal_gap_tasks(config):
    def check(g, thicket):
        def run():
            game, tau = _primal_gap_game(g, thicket, config)
            report = gap_report(game, tau, node_budget=config.node_budget)
            return _report_outcome(report, {"n": g.n, "tau": tau},
                                   {"kappa_f_le_2": report.kappa_f <= 2,
                                    "kappa_ge_floor_half_plus_1": report.kappa >= tau // 2 + 1,
                                    "primal_gap_ge_quarter_tau": 4 * report.gap_primal >= tau},
                                   report.gap_primal, Fraction(tau, 4))
        return run
    return [Task(name, check(g, thicket)) for name, g, thicket, _ in _primal_gap_graphs()]


def path_power_tasks(config):
    def tau_check(n, r):
        def run():
            tau, _ = _tau(path_power_graph(n, r), config)
            return Outcome({"n": n, "r": r, "tau": tau}, {"tau_eq_r": tau == r})
        return run

    def lazy_check():
        game = ImplicitPathPowerGame(27, 2, 3)
        kappa = pathpower_cover_number(game, config.node_budget)
        frac = pathpower_frac_upper(game)
        gap = Fraction(kappa) / frac
        return Outcome({"n": 27, "r": 2, "k": 3, "kappa": kappa, "kappa_f_upper": frac,
                        "lower_bound": pathpower_lower_bound(game)},
                       {"kappa_ge_4": kappa >= 4, "frac_upper_eq_3": frac == 3,
                        "primal_gap_ge_4_3": gap >= Fraction(4, 3)},
                       gap, Fraction(4, 3))

    def explicit_check(n, r, k):
        def run():
            game = ImplicitPathPowerGame(n, r, k)
            lazy = pathpower_cover_number(game, config.node_budget)
            explicit = integral_covering(pathpower_explicit_game(game), config.node_budget).cost
            bound = pathpower_lower_bound(game)
            return Outcome({"n": n, "r": r, "k": k, "kappa_lazy": lazy, "kappa": explicit,
                            "lower_bound": bound},
                           {"lazy_eq_explicit": explicit == lazy,
                            "lower_bound_holds": bound <= lazy})
        return run

    tasks = [Task(f"tau-{n:02d}-{r}", tau_check(n, r)) for n, r in ((6, 1), (6, 2), (8, 2), (9, 3))]
    tasks.append(Task("lazy-27-2-3", lazy_check))
    tasks += [Task(f"explicit-{n:02d}-{r}-{k:02d}", explicit_check(n, r, k))
              for n in range(3, config.pathpower_max_n + 1)
              for r in range(1, n // 3 + 1) for k in range(1, n + 1)]
    return tasks


def _vine_instances(config):
    """(name, build) for every named game with a width-tau vine; build returns (game, d)."""
    def thicket_instance(g):
        def build():
            _, thicket = _tau(g, config)
            _, d = _width(g, config)
            return thicket_game(g, thicket), d
        return build

    def primal_gap_instance(g, thicket, d):
        def build():
            return _primal_gap_game(g, thicket, config)[0], d
        return build

    named = [(f"grid-rowcol-{k}", lambda k=k: (grid_rowcol_game(k), grid_column_vine(k)))
             for k in DUAL_GRID_KS]
    named += [(f"clique-grid-{n:02d}", lambda n=n: (clique_grid_game(n), clique_vine(n)))
              for n in DUAL_CLIQUE_NS]
    named += [(f"clique-half-{n:02d}", lambda n=n: (clique_half_game(n), clique_vine(n)))
              for n in config.clique_ns]
    named += [(f"random-K{n:02d}-{i:03d}",
               lambda n=n, i=i: (clique_random_game(config, n, i), clique_vine(n)))
              for n in config.clique_random_ns for i in range(config.clique_random)]
    named += [(f"primal-gap-{name}", primal_gap_instance(g, thicket, d))
              for name, g, thicket, d in _primal_gap_graphs()]
    named += [(f"thicket-{name}", thicket_instance(g)) for name, g in _named_thicket_graphs()]
    named += [(f"path-power-{n:02d}-{r}-2",
               lambda n=n, r=r: (pathpower_explicit_game(ImplicitPathPowerGame(n, r, 2)),
                                 pathpower_vine(n, r)))
              for n in config.pathpower_ns for r in (1, 2) if n >= 3 * r]
    return named


def _allocation_outcome(game, d, config):
    allocation, witness, _ = vine_allocation(game, d)
    width = d.width
    kappa = integral_covering(game, config.node_budget).cost
    rho = integral_packing(game, config.node_budget).value
    fields = {"n": game.graph.n, "width": width, "cost": allocation.cost,
              "witness": witness.value, "kappa": kappa, "rho": rho}
    ratio = allocation.cost / witness.value if witness.value else Fraction(0)
    return Outcome(fields,
                   {"cost_le_width_witness": allocation.cost <= width * witness.value,
                    "witness_le_rho": witness.value <= rho,
                    "cost_ge_kappa": allocation.cost >= kappa},
                   ratio, Fraction(width))


def allocation_tasks(config):
    def random_check(index):
        def run():
            game = explicit_random_game(config, index)
            _, d = _width(game.graph, config)
            return _allocation_outcome(game, d, config)
        return run

    def named_check(build):
        def run():
            game, d = build()
            return _allocation_outcome(game, d, config)
        return run

    def sqrt_check(index):
        def run():
            rng = config.rng("sqrt-games", index)
            n = rng.randint(2, config.sqrt_max_n)
            g = random_connected_graph(n, 0.3, rng)
            game = random_game(g, rng, max_coalitions=15, max_value=3,
                               connected=connected_set_masks(g))
            allocation = sqrt_allocation(game)
            rho = integral_packing(game, config.node_budget).value
            squared = (allocation.cost / rho) ** 2 if rho else Fraction(0)
            return Outcome({"n": n, "cost": allocation.cost, "rho": rho},
                           {"cost_sq_le_4n_rho_sq": sqrt_bound_holds(allocation, n, rho)},
                           squared, Fraction(4 * n))
        return run

    tasks = [Task(f"game-{i:03d}", random_check(i)) for i in range(config.games)]
    tasks += [Task(name, named_check(build)) for name, build in _vine_instances(config)]
    tasks += [Task(f"sqrt-{i:03d}", sqrt_check(i)) for i in range(config.sqrt_games)]
    return tasks


def vc_dim_tasks(config):
    def graph_check(g):
        def run():
            d, _ = vc_dimension_exact(g)
            tau, thicket = _tau(g, config)
            x = min_hitting_set(thicket.sets, g.n, config.node_budget).members
            shattered = isinstance(is_shattered(g, x), ShatterWitness)
            return Outcome({"n": g.n, "d": d, "tau": tau},
                           {"tau_le_d": tau <= d, "hitting_set_shattered": shattered},
                           Fraction(tau), Fraction(d))
        return run

    def star_check(leaves):
        def run():
            g = star_graph(leaves)
            d, _ = vc_dimension_exact(g)
            tau, _ = _tau(g, config)
            return Outcome({"leaves": leaves, "d": d, "tau": tau},
                           {"d_eq_leaves": d == leaves, "tau_eq_1": tau == 1})
        return run

    def game_check(index):
        def run():
            game = explicit_random_game(config, index)
            d, _ = vc_dimension_exact(game.graph)
            report = gap_report(game, node_budget=config.node_budget)
            return _report_outcome(report, {"n": game.graph.n, "d": d},
                                   {"ratio_le_d": report.ratio_pc <= d},
                                   report.ratio_pc, Fraction(d))
        return run

    def justified_check(index):
        def run():
            rng = config.rng("justified", index)
            g = random_connected_graph(rng.randint(2, config.game_max_n), 0.4, rng)
            game = random_simple_game(g, rng)
            d, _ = vc_dimension_exact(g)
            x, packing = justified_packing(game, config.node_budget)
            return Outcome({"n": g.n, "d": d, "hitting": len(x), "packing": len(packing)},
                           {"packing_ge_hitting_over_d_plus_1": len(packing) * (d + 1) >= len(x)})
        return run

    # one-vertex graphs have no connected set avoiding their vertex
    graphs = [(name, g) for name, g in _corpus_graphs(config) if g.n >= 2]
    tasks = [Task(name, graph_check(g)) for name, g in graphs]
    tasks += [Task(f"star-{n}", star_check(n)) for n in (3, 4, 5, 6)]
    tasks += [Task(f"game-{i:03d}", game_check(i)) for i in range(config.games)]
    tasks += [Task(f"justified-{i:03d}", justified_check(i)) for i in range(config.games)]
    return tasks


def trees_tasks(config):
    def check(index):
        def run():
            rng = config.rng("trees", index)
            g = random_tree(rng.randint(2, config.tree_max_n), rng)
            report = gap_report(random_game(g, rng), 1, node_budget=config.node_budget)
            return _report_outcome(report, {"n": g.n},
                                   {"balanced": report.kappa == report.rho == report.kappa_f
                                    == report.rho_f})
        return run
    return [Task(f"tree-{i:03d}", check(i)) for i in range(config.tree_games)]


def _separator_outcome(g, d):
    """Every internal node label separates, before and after padding to full width."""
    padded = pad_labels(d)
    nodes = internal_nodes(d)
    return Outcome({"n": g.n, "width": d.width, "internal_nodes": len(nodes)},
                   {"internal_nodes_separate": all(node_separator_check(g, d, t) for t in nodes),
                    "padded_nodes_separate": all(node_separator_check(g, padded, t)
                                                 for t in nodes)})


def separators_tasks(config):
    def decomposition_check(g):
        def run():
            _, d = _width(g, config)
            return _separator_outcome(g, d)
        return run

    def allocation_game_check(index):
        def run():
            g = explicit_random_game(config, index).graph
            _, d = _width(g, config)
            return _separator_outcome(g, d)
        return run

    def named_check(build):
        def run():
            game, d = build()
            return _separator_outcome(game.graph, d)
        return run

    def thicket_check(index):
        def run():
            for attempt in range(100):
                rng = config.rng("separators", f"{index}:{attempt}")
                g = random_connected_graph(rng.randint(3, config.minmax_random_n), 0.4, rng)
                _, thicket = _tau(g, config)
                hitting = minimum_hitting_sets(thicket.sets, g.n, config.node_budget)
                if len(hitting) >= 2:
                    a, b = hitting[0].members, hitting[-1].members
                    separator = min_vertex_separator(g, a, b)
                    size = hitting[0].size
                    return Outcome({"n": g.n, "attempt": attempt, "hitting": size,
                                    "separator": separator},
                                   {"separator_ge_hitting": separator >= size},
                                   Fraction(size), Fraction(separator))
            raise InputError("no thicket with two minimum hitting sets in 100 attempts")
        return run

    tasks = [Task(name, decomposition_check(g)) for name, g in _corpus_graphs(config)]
    tasks += [Task(f"allocation-game-{i:03d}", allocation_game_check(i))
              for i in range(config.games)]
    tasks += [Task(f"allocation-{name}", named_check(build))
              for name, build in _vine_instances(config)]
    tasks += [Task(f"thicket-{i:03d}", thicket_check(i)) for i in range(config.separator_thickets)]
    return tasks


def conversion_tasks(config):
    def graph_check(g):
        def run():
            nu, d = _width(g, config)
            tree = vine_to_tree(d, g)
            omega, order = treewidth_ordering(g)
            elimination = elimination_decomposition(g, order)
            return Outcome({"n": g.n, "nu": nu, "tree_width": tree.width, "omega": omega},
                           {"tree_valid": not validate_tree_decomposition(g, tree),
                            "width_le_2nu_minus_1": tree.width <= 2 * nu - 1,
                            "omega_le_tree_width": omega <= tree.width,
                            "elimination_valid": not validate_tree_decomposition(g, elimination)
                            and elimination.width == omega},
                           Fraction(tree.width), Fraction(2 * nu - 1))
        return run

    def clique_check(n):
        def run():
            g = clique_graph(n)
            tree = vine_to_tree(clique_vine(n), g)
            return Outcome({"n": n, "tree_width": tree.width},
                           {"tree_valid": not validate_tree_decomposition(g, tree),
                            "width_eq_n_minus_1": tree.width == n - 1},
                           Fraction(tree.width), Fraction(n - 1))
        return run

    tasks = [Task(name, graph_check(g)) for name, g in _corpus_graphs(config)]
    tasks += [Task(f"clique-{n}", clique_check(n)) for n in (4, 6)]
    return tasks


EXPERIMENTS = {
    "minmax": minmax_tasks,
    "strong-duality": strong_duality_tasks,
    "sandwich": sandwich_tasks,
    "dual-grid": dual_grid_tasks,
    "primal-clique": primal_clique_tasks,
    "primal-gap": primal_gap_tasks,
    "path-power": path_power_tasks,
    "allocation": allocation_tasks,
    "vc-dim": vc_dim_tasks,
    "trees": trees_tasks,
    "separators": separators_tasks,
    "conversion": conversion_tasks,
}


# --- runner ---

def run_task(task):
    try:
        outcome = task.run()
    except BudgetExceeded as e:
        return ReportRow(task.instance, status=STATUS_BUDGET, detail=str(e))
    except (LabError, ValueError, ZeroDivisionError) as e:
        return ReportRow(task.instance, status=STATUS_ERROR, detail=f"{type(e).__name__}: {e}")
    return ReportRow(task.instance, outcome.fields, outcome.checks,
                     measured=outcome.measured, bound=outcome.bound)


def _report_progress(done, total, row):
    state = row.status if row.status != STATUS_OK else ("pass" if row.passed else "FAIL")
    progress(f"  [{done}/{total}] {row.instance}: {state}")


def task_worker(task_queue, results, lock, stop_event, total):
    while not stop_event.is_set():
        try:
            task = task_queue.get_nowait()
        except queue.Empty:
            return
        row = run_task(task)
        with lock:
            results.append(row)
            _report_progress(len(results), total, row)
        task_queue.task_done()


def run_experiment(config):
    if config.name not in EXPERIMENTS:
        raise InputError(f"unknown experiment {config.name!r}; known: {', '.join(EXPERIMENTS)}")
    tasks = EXPERIMENTS[config.name](config)
    instances = [t.instance for t in tasks]
    if len(set(instances)) != len(instances):
        raise InputError(f"experiment {config.name} repeats an instance identifier")
    progress(f"Running {config.name}: {len(tasks)} instances on {config.workers} worker(s)")

    results = []
    if config.workers == 1:
        for task in tasks:
            results.append(run_task(task))
            _report_progress(len(results), len(tasks), results[-1])
    else:
        task_queue = queue.Queue()
        for task in tasks:
            task_queue.put(task)
        lock = threading.Lock()
        stop_event = threading.Event()
        threads = [threading.Thread(target=task_worker,
                                    args=(task_queue, results, lock, stop_event, len(tasks)),
                                    daemon=True)
                   for _ in range(config.workers)]
        for thread in threads:
            thread.start()
        try:
            for thread in threads:
                thread.join()
        except KeyboardInterrupt:
            stop_event.set()
            raise
    return sorted(results, key=lambda row: row.instance)


def summary_status(rows):
    if any(row.status == STATUS_ERROR or (row.status == STATUS_OK and not row.passed)
           for row in rows):
        return EXIT_ASSERTION
    if any(row.status == STATUS_BUDGET for row in rows):
        return EXIT_BUDGET
    return EXIT_OK


def summary(rows):
    return {
        "rows": len(rows),
        "passed": sum(1 for row in rows if row.passed),
        "failed": sum(1 for row in rows if row.status == STATUS_OK and not row.passed),
        "budget": sum(1 for row in rows if row.status == STATUS_BUDGET),
        "errors": sum(1 for row in rows if row.status == STATUS_ERROR),
        "exit_status": summary_status(rows),
    }


# --- tables ---

def _cell(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, bool):
        return "pass" if value else "fail"
    return value


def row_document(row):
    doc = {"instance": row.instance, "status": row.status,
           "fields": {k: _cell(v) for k, v in sorted(row.fields.items())},
           "checks": {k: _cell(v) for k, v in sorted(row.checks.items())}}
    if row.detail:
        doc["detail"] = row.detail
    return doc


def experiment_document(config, rows):
    return {"experiment": config.name, "seed": config.seed,
            "rows": [row_document(row) for row in rows], "summary": summary(rows)}


def rows_frame(rows):
    """One line per row; check columns are prefixed with check_."""
    records = []
    for row in rows:
        record = {"instance": row.instance, "status": row.status}
        record.update({k: _cell(v) for k, v in sorted(row.fields.items())})
        record.update({f"check_{k}": _cell(v) for k, v in sorted(row.checks.items())})
        record["detail"] = row.detail
        records.append(record)
    df = pd.DataFrame.from_records(records)
    if df.empty:
        return pd.DataFrame(columns=["instance", "status", "detail"])
    leading = ["instance", "status"]
    checks = sorted(c for c in df.columns if c.startswith("check_"))
    values = sorted(c for c in df.columns if c not in leading and c not in checks and c != "detail")
    return df[leading + values + checks + ["detail"]]


def rows_csv(rows):
    return rows_frame(rows).to_csv(index=False, lineterminator="\n")



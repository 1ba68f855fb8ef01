from dataclasses import asdict, dataclass
from typing import Callable

from rich.pretty import pprint
from rich.table import Table
from rich.tree import Tree

from .patterns import ConnectionPattern, component_slots, interaction_graph, interactions
from .solvers import MoveTrace
from .verify import LemmaReport


def interaction_tree(p: ConnectionPattern) -> Tree:
    """The sequential components of `p` with the components each interacts with."""
    comps = component_slots(p)
    simple, _ = interaction_graph(p)
    tree = Tree(f"[bold]{p}[/bold]  k={p.k}, {len(comps)} components")
    for j, slots in enumerate(comps):
        branch = tree.add(f"#{j} slots {[s + 1 for s in slots]}")
        for other in sorted(simple[j]):
            times = interactions(p, slots, comps[other])
            branch.add(f"#{other} x{times}")
    return tree


def lemma_table(*reports: LemmaReport) -> Table:
    table = Table(title="Pattern checks")
    for column in ("check", "k", "universe", "irreducible", "matching", "violations", "result"):
        table.add_column(column, justify="left" if column == "check" else "right")
    for r in reports:
        expected = f" / {r.expected_matching}" if r.expected_matching is not None else ""
        table.add_row(
            r.lemma.value,
            str(r.k),
            str(r.total),
            str(r.irreducible),
            f"{r.matching}{expected}",
            str(len(r.violations)),
            "[green]pass[/green]" if r.passed else "[red]FAIL[/red]",
        )
    return table


def print_trace(trace: MoveTrace, print_func: Callable[[str], None] = print):
    """Write a local search run as text: the starting tour weight, each applied
    move with its size, gain and the weight after it, then the total gain.

    `print_func` gets one line per call, so `list.append` collects them.
    """
    print_func(f"start    weight {trace.initial_weight}")
    for step_no, step in enumerate(trace.steps, start=1):
        print_func(f"{step_no:>4}  k={step.k}  gain {step.move.gain:>4}  weight {step.weight}")
    print_func(f"total    gain {trace.total_gain}  weight {trace.final_weight}")


@dataclass
class TraceSummary:
    moves: int
    initial_weight: int
    final_weight: int
    gains_by_k: dict[int, int]

    def pprint(self):
        pprint(asdict(self))


def summarize(trace: MoveTrace) -> TraceSummary:
    gains: dict[int, int] = {}
    for step in trace.steps:
        gains[step.k] = gains.get(step.k, 0) + step.move.gain
    return TraceSummary(len(trace), trace.initial_weight, trace.final_weight, gains)

"""Command line entry point.

Machine output goes to stdout as JSON lines, logs go to stderr. Every
command exits with 0 when it found an improving move or its check passed,
1 when there is none or the check failed, 2 on a usage or input error and 3
when a quasi-linear engine ran into a smaller improving move.
"""

from enum import Enum
import json
from pathlib import Path
import time
from typing import Annotated, Callable

from rich.console import Console
import typer

from . import verify as _verify
from ._config import Settings, using
from ._errors import KoptRuntimeError, PreconditionViolationError
from ._log import configure_logging
from .hardness import (
    TriangleMode,
    gen_subiso_instance,
    gen_triangle_instance,
    parse_patterned_host,
    parse_tripartite,
)
from .instance import (
    Move,
    TourInstance,
    move_to_json,
    parse_instance,
    random_instance,
    serialize_instance,
)
from .solvers import (
    Engine,
    Strategy,
    best_move_c_sequential,
    best_move_meet,
    best_move_pathwidth_dp,
    brute_force_best_move,
    detect_k8_bounded,
    detect_quasilinear,
    local_search,
)
from .viz import lemma_table

EXIT_FOUND = 0
EXIT_NONE = 1
EXIT_ERROR = 2
EXIT_PRECONDITION = 3

app = typer.Typer(no_args_is_help=True, add_completion=False, help=__doc__)
gen_app = typer.Typer(no_args_is_help=True, help="Generate reduction instances.")
app.add_typer(gen_app, name="gen")

err = Console(stderr=True)


class Algorithm(str, Enum):
    ORACLE = "oracle"
    MEET = "meet"
    DP = "dp"
    QUASI = "quasi"
    K8 = "k8"


class Decomposition(str, Enum):
    PATH = "path"
    TREE = "tree"


def _fail(message: str) -> typer.Exit:
    err.print(f"[red]error:[/red] {message}")
    return typer.Exit(EXIT_ERROR)


def _settings(ctx: typer.Context) -> Settings:
    return ctx.obj if isinstance(ctx.obj, Settings) else Settings.from_env()


def _read_instance(path: Path) -> TourInstance:
    try:
        return parse_instance(path.read_bytes())
    except OSError as exc:
        raise _fail(f"cannot read {path}: {exc.strerror}") from None
    except KoptRuntimeError as exc:
        raise _fail(f"{path}: {exc}") from None


def _guarded(settings: Settings, run: Callable[[], int]) -> int:
    """Run under `settings`, mapping package errors to exit codes."""
    with using(settings):
        try:
            return run()
        except PreconditionViolationError as exc:
            err.print(f"[yellow]precondition violated:[/yellow] {exc}")
            typer.echo(move_to_json(exc.move))
            return EXIT_PRECONDITION
        except (KoptRuntimeError, ValueError, OSError) as exc:
            raise _fail(str(exc)) from None


@app.callback()
def main(
    ctx: typer.Context,
    log_level: Annotated[
        str | None, typer.Option(help="Log level for stderr output.")
    ] = None,
    threads: Annotated[
        int | None, typer.Option(min=1, help="Pattern-level worker threads.")
    ] = None,
):
    settings = Settings.from_env().override(log_level=log_level, threads=threads)
    configure_logging(settings.log_level)
    ctx.obj = settings


@app.command()
def solve(
    ctx: typer.Context,
    instance: Annotated[Path, typer.Option(help="Instance file.")],
    k: Annotated[int, typer.Option(min=2, help="Number of removed edges.")],
    alg: Annotated[Algorithm, typer.Option(help="Search algorithm.")] = Algorithm.MEET,
    W: Annotated[
        int | None, typer.Option("--W", help="Weight bound, required by k8.")
    ] = None,
    c: Annotated[
        int | None, typer.Option(min=1, help="Number of sequential components.")
    ] = None,
    decomposition: Annotated[
        Decomposition, typer.Option(help="Decomposition the dp runs on.")
    ] = Decomposition.PATH,
):
    """Print the best improving k-move, or NONE."""
    if alg is Algorithm.K8:
        if W is None:
            raise _fail("--alg k8 needs --W, the largest edge weight it may assume.")
        if k != 8:
            raise _fail(f"--alg k8 searches 8-moves only, got --k {k}.")
    inst = _read_instance(instance)

    def run() -> int:
        move: Move | None
        match alg:
            case Algorithm.ORACLE:
                move = brute_force_best_move(inst, k, components=c)
            case Algorithm.MEET:
                move = best_move_meet(inst, k) if c is None else best_move_c_sequential(inst, k, c)
            case Algorithm.DP:
                move = best_move_pathwidth_dp(inst, k, decomposition=decomposition.value)
            case Algorithm.QUASI:
                move = detect_quasilinear(inst, k)
            case Algorithm.K8:
                move = detect_k8_bounded(inst, W)
        if move is None:
            typer.echo("NONE")
            return EXIT_NONE
        typer.echo(move_to_json(move))
        return EXIT_FOUND

    raise typer.Exit(_guarded(_settings(ctx), run))


@app.command("local-search")
def local_search_cmd(
    ctx: typer.Context,
    instance: Annotated[Path, typer.Option(help="Instance file.")],
    kmax: Annotated[int, typer.Option(min=2, help="Largest move size tried.")],
    out: Annotated[Path, typer.Option(help="Where to write the improved instance.")],
    strategy: Annotated[Strategy, typer.Option()] = Strategy.FIRST,
    engine: Annotated[Engine, typer.Option()] = Engine.QUASI,
    W: Annotated[int | None, typer.Option("--W", help="Weight bound for k=8.")] = None,
):
    """Apply improving moves until none is left; print the trace and weights."""
    inst = _read_instance(instance)

    def run() -> int:
        final, trace = local_search(inst, kmax, strategy, engine, W=W)
        out.write_text(serialize_instance(final))
        for step in trace.steps:
            line = json.loads(move_to_json(step.move))
            typer.echo(json.dumps({"k": step.k, **line, "weight": step.weight}, separators=(",", ":")))
        typer.echo(
            json.dumps(
                {"initial_weight": trace.initial_weight, "final_weight": trace.final_weight},
                separators=(",", ":"),
            )
        )
        return EXIT_FOUND if len(trace) else EXIT_NONE

    raise typer.Exit(_guarded(_settings(ctx), run))


@app.command("verify")
def verify_cmd(
    ctx: typer.Context,
    lemma: Annotated[
        str,
        typer.Option(
            help="Which pattern check to run: interactions (5.3), adjacent-swap (5.4)"
            " or pair-relax (5.7)."
        ),
    ],
    k: Annotated[int | None, typer.Option(help="Pattern size, where the check takes one.")] = None,
    table: Annotated[bool, typer.Option(help="Also render a table on stderr.")] = False,
):
    """Enumerate the pattern universe and check one structural fact."""

    def run() -> int:
        report = _verify.run(lemma, k)
        typer.echo(report.to_json())
        if table:
            err.print(lemma_table(report))
        return EXIT_FOUND if report.passed else EXIT_NONE

    raise typer.Exit(_guarded(_settings(ctx), run))


def _write_generated(out: Path, manifest: Path | None, inst: TourInstance, data: dict) -> None:
    out.write_text(serialize_instance(inst))
    (manifest or out.with_suffix(out.suffix + ".json")).write_text(json.dumps(data, indent=1))


@gen_app.command("triangle")
def gen_triangle(
    ctx: typer.Context,
    graph: Annotated[Path, typer.Argument(help="Tripartite graph file.")],
    out: Annotated[Path, typer.Option(help="Instance file to write.")],
    manifest: Annotated[Path | None, typer.Option(help="Manifest file; defaults to OUT.json.")] = None,
    mode: Annotated[TriangleMode, typer.Option()] = TriangleMode.UNIT,
):
    """Encode triangle detection as 9-opt detection."""

    def run() -> int:
        ti = gen_triangle_instance(parse_tripartite(graph.read_bytes()), mode)
        _write_generated(out, manifest, ti.instance, ti.manifest())
        typer.echo(
            json.dumps({"n": ti.instance.n, "catalogue": len(ti.catalogue)}, separators=(",", ":"))
        )
        return EXIT_FOUND

    raise typer.Exit(_guarded(_settings(ctx), run))


@gen_app.command("subiso")
def gen_subiso(
    ctx: typer.Context,
    graph: Annotated[Path, typer.Argument(help="Pattern and host graph file.")],
    out: Annotated[Path, typer.Option(help="Instance file to write.")],
    manifest: Annotated[Path | None, typer.Option(help="Manifest file; defaults to OUT.json.")] = None,
):
    """Encode partitioned subgraph isomorphism as a cheaper-tour question."""

    def run() -> int:
        si = gen_subiso_instance(parse_patterned_host(graph.read_bytes()))
        _write_generated(out, manifest, si.instance, si.manifest())
        typer.echo(
            json.dumps(
                {"n": si.instance.n, "beta": si.beta, "L": si.choice_gadgets, "k_prime": si.k_prime},
                separators=(",", ":"),
            )
        )
        return EXIT_FOUND

    raise typer.Exit(_guarded(_settings(ctx), run))


@app.command()
def bench(
    ctx: typer.Context,
    sizes: Annotated[str, typer.Option(help="Comma separated instance sizes.")] = "10000,20000,40000",
    alg: Annotated[Algorithm, typer.Option()] = Algorithm.QUASI,
    k: Annotated[int, typer.Option(min=2)] = 7,
    seed: Annotated[int, typer.Option()] = 0,
    W: Annotated[int, typer.Option("--W", help="Largest weight of the random instances.")] = 1,
):
    """Time one algorithm on seeded random cubic instances of growing size.

    With the default W=1 no move improves, so every run scans its whole
    search space.
    """
    try:
        ns = [int(s) for s in sizes.split(",") if s.strip()]
    except ValueError:
        raise _fail(f"--sizes takes comma separated integers, got {sizes!r}.") from None

    def run() -> int:
        previous: float | None = None
        for n in ns:
            inst = random_instance(n, seed=seed, max_weight=W)
            started = time.perf_counter()
            match alg:
                case Algorithm.QUASI:
                    detect_quasilinear(inst, k)
                case Algorithm.K8:
                    detect_k8_bounded(inst, W)
                case Algorithm.MEET:
                    best_move_meet(inst, k)
                case Algorithm.DP:
                    best_move_pathwidth_dp(inst, k)
                case Algorithm.ORACLE:
                    brute_force_best_move(inst, k)
            seconds = time.perf_counter() - started
            ratio = None if previous is None else seconds / previous
            typer.echo(
                json.dumps(
                    {"alg": alg.value, "k": k, "n": n, "seconds": round(seconds, 6), "ratio": ratio},
                    separators=(",", ":"),
                )
            )
            previous = seconds
        return EXIT_FOUND

    raise typer.Exit(_guarded(_settings(ctx), run))

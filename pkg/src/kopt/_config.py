import contextlib
import contextvars
from dataclasses import dataclass, fields, replace
import os
from typing import Any, Generator, Self

ENV_PREFIX = "KOPT_"


@dataclass(frozen=True)
class Settings:
    """Knobs shared by the solvers, the local search driver and the CLI.

    Parameters
    ----------
    oracle_budget: int
        Maximum number of removed-edge subsets the brute-force oracle visits.
    iteration_budget: int
        Maximum number of moves local search applies before giving up.
    threads: int
        Size of the pattern-level worker pool. 1 keeps everything in-thread.
    hamiltonian_budget: int
        Node budget for the exhaustive Hamiltonian cycle search.
    log_level: str
        Level handed to `kopt.configure_logging` by the CLI.
    """

    oracle_budget: int = 2_000_000
    iteration_budget: int = 10_000
    threads: int = 1
    hamiltonian_budget: int = 5_000_000
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> Self:
        env = os.environ if environ is None else environ
        overrides: dict[str, Any] = {}
        for f in fields(cls):
            raw = env.get(ENV_PREFIX + f.name.upper())
            if raw is None:
                continue
            overrides[f.name] = raw if f.type in (str, "str") else int(raw)
        return cls(**overrides)

    def override(self, **changes: Any) -> Self:
        """Copy with every non-None keyword applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


active = contextvars.ContextVar[Settings | None]("active_settings", default=None)


@contextlib.contextmanager
def using(settings: Settings) -> Generator[Settings, None, None]:
    """Make `settings` the default for every solver call inside the block."""
    token = active.set(settings)
    try:
        yield settings
    finally:
        active.reset(token)


def resolve(settings: Settings | None) -> Settings:
    if settings is not None:
        return settings
    if (current := active.get()) is not None:
        return current
    return Settings.from_env()

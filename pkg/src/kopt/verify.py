"""Exhaustive checks of the structural facts the quasi-linear engines rely on.

Each check streams one pattern universe, keeps the feasible irreducible
patterns whose shape the fact talks about, and records every counterexample.
All predicates come from `kopt.patterns`.
"""

from dataclasses import asdict, dataclass, field
from enum import Enum
import itertools
import json
import logging
from typing import Callable, Iterator

from .patterns import (
    ConnectionPattern,
    PatternUniverse,
    component_slots,
    enumerate_patterns,
    interactions,
    is_reducible,
    relaxable,
)

logger = logging.getLogger(__name__)

PAIR_RELAX_K = 8
PAIR_RELAX_TOTAL = 645120
PAIR_RELAX_MATCHING = 136


class Lemma(str, Enum):
    INTERACTIONS = "interactions"
    """No feasible irreducible pattern holds two 2-swaps interacting twice."""
    ADJACENT_SWAP = "adjacent-swap"
    """Exchanging the slots of a single 2-swap interaction keeps the pattern
    feasible or reducible."""
    PAIR_RELAX = "pair-relax"
    """For a 2-swap wedged between two 3-swaps, one side can be relaxed."""

    @classmethod
    def _missing_(cls, value: object) -> "Lemma | None":
        return _NUMBERED.get(value) if isinstance(value, str) else None


_NUMBERED = {"5.3": Lemma.INTERACTIONS, "5.4": Lemma.ADJACENT_SWAP, "5.7": Lemma.PAIR_RELAX}


@dataclass
class LemmaReport:
    """Outcome of one check.

    `total` counts the whole universe, `irreducible` the irreducible patterns
    of the shape under test and `matching` those meeting the precondition.
    Violations are pattern strings, with the offending 1-based slots after `@`.
    A check passes without violations when the universe and the matching
    count have their expected sizes.
    """

    lemma: Lemma
    k: int
    total: int = 0
    irreducible: int = 0
    matching: int = 0
    violations: list[str] = field(default_factory=list)
    expected_total: int | None = None
    expected_matching: int | None = None

    @property
    def passed(self) -> bool:
        return (
            not self.violations
            and self.expected_total in (None, self.total)
            and self.expected_matching in (None, self.matching)
        )

    def as_dict(self) -> dict:
        data = asdict(self)
        data["lemma"] = self.lemma.value
        data["passed"] = self.passed
        return data

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), separators=(",", ":"))


def _candidates(
    report: LemmaReport, shape: Callable[[list[int]], bool]
) -> Iterator[tuple[ConnectionPattern, list[tuple[int, ...]]]]:
    """Irreducible patterns of the appendix universe whose component sizes pass
    `shape`, with their sequential components. Counts go into `report`."""
    for p in enumerate_patterns(report.k, PatternUniverse.APPENDIX):
        report.total += 1
        comps = component_slots(p)
        if not shape(sorted(len(c) for c in comps)) or is_reducible(p):
            continue
        report.irreducible += 1
        yield p, comps


def _check_k(k: int, lo: int, hi: int) -> None:
    if not lo <= k <= hi:
        raise ValueError(f"This check covers {lo} <= k <= {hi}, got k={k}.")


def check_lemma_interactions(k: int) -> LemmaReport:
    """Look for two 2-swaps interacting at least twice, for 6 <= k <= 8."""
    _check_k(k, 6, 8)
    report = LemmaReport(Lemma.INTERACTIONS, k)
    for p, comps in _candidates(report, lambda sizes: sizes.count(2) >= 2):
        twos = [c for c in comps if len(c) == 2]
        report.matching += 1
        if any(interactions(p, x, y) >= 2 for x, y in itertools.combinations(twos, 2)):
            report.violations.append(str(p))
    logger.info("interactions k=%d: %d matching, %d violations", k, report.matching, len(report.violations))
    return report


def check_lemma_relax1(k: int) -> LemmaReport:
    """For three sequential swaps with two of size 2 interacting exactly once,
    exchanging the two interacting slots gives a feasible or reducible pattern."""
    _check_k(k, 4, 8)
    report = LemmaReport(Lemma.ADJACENT_SWAP, k)
    for p, comps in _candidates(report, lambda sizes: len(sizes) == 3 and sizes.count(2) >= 2):
        twos = [c for c in comps if len(c) == 2]
        checked = False
        for x, y in itertools.combinations(twos, 2):
            links = [
                i for i in range(k - 1)
                if (i in x and i + 1 in y) or (i in y and i + 1 in x)
            ]
            if len(links) != 1:
                continue
            checked = True
            if not relaxable(p, links[0]):
                report.violations.append(f"{p} @ {links[0] + 1}")
        report.matching += checked
    logger.info("adjacent-swap k=%d: %d matching, %d violations", k, report.matching, len(report.violations))
    return report


def pair_relax_precondition(
    comps: list[tuple[int, ...]],
) -> list[tuple[int, int, tuple[int, ...], tuple[int, ...]]]:
    """Every labelling (i, j, Y, Z) with X = {i, j} the 2-swap, both neighbours
    of i in Y and both neighbours of j in Z."""
    if sorted(len(c) for c in comps) != [2, 3, 3]:
        return []
    (x,) = [c for c in comps if len(c) == 2]
    threes = [c for c in comps if len(c) == 3]
    found = []
    for i, j in ((x[0], x[1]), (x[1], x[0])):
        for y, z in (threes, threes[::-1]):
            if {i - 1, i + 1} <= set(y) and {j - 1, j + 1} <= set(z):
                found.append((i, j, y, z))
    return found


def _relaxable_side(p: ConnectionPattern, a: int, side: tuple[int, ...]) -> bool:
    return (
        a - 2 not in side
        and a + 2 not in side
        and relaxable(p, a)
        and relaxable(p, a - 1)
    )


def check_lemma_relax2() -> LemmaReport:
    """For every 8-pattern made of a 2-swap X = {i, j} and 3-swaps Y, Z with
    both neighbours of i in Y and both of j in Z, (i, Y) or (j, Z) can be
    relaxed on both sides."""
    report = LemmaReport(
        Lemma.PAIR_RELAX,
        PAIR_RELAX_K,
        expected_total=PAIR_RELAX_TOTAL,
        expected_matching=PAIR_RELAX_MATCHING,
    )
    for p, comps in _candidates(report, lambda sizes: sizes == [2, 3, 3]):
        labellings = pair_relax_precondition(comps)
        if not labellings:
            continue
        report.matching += 1
        for i, j, y, z in labellings:
            if not (_relaxable_side(p, i, y) or _relaxable_side(p, j, z)):
                report.violations.append(f"{p} @ {i + 1},{j + 1}")
    logger.info(
        "pair-relax: %d patterns, %d matching, %d violations",
        report.total, report.matching, len(report.violations),
    )
    if report.total != PAIR_RELAX_TOTAL:
        logger.warning("universe holds %d patterns, expected %d", report.total, PAIR_RELAX_TOTAL)
    if report.matching != PAIR_RELAX_MATCHING:
        logger.warning(
            "%d patterns meet the precondition, expected %d",
            report.matching,
            PAIR_RELAX_MATCHING,
        )
    return report


def run(lemma: Lemma | str, k: int | None = None) -> LemmaReport:
    match Lemma(lemma):
        case Lemma.INTERACTIONS:
            return check_lemma_interactions(k or 6)
        case Lemma.ADJACENT_SWAP:
            return check_lemma_relax1(k or 6)
        case Lemma.PAIR_RELAX:
            return check_lemma_relax2()

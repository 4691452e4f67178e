"""
Monotone 1-in-3-SAT instances: file format, exhaustive oracle and a
propagation-based cross-check.

File format::

    p m1in3 <t> <c>
    i j k          # c lines, 1-based variable indices

Lines starting with ``c`` or ``#`` are comments.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence


class SatFormatError(ValueError):
    def __init__(self, kind: str, message: str, line: int | None = None):
        self.kind = kind
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{kind}: {message}")


@dataclass(frozen=True)
class SatInstance:
    t: int
    clauses: tuple  # tuple of (i, j, k), 0-based, pairwise distinct

    def __post_init__(self):
        for cl in self.clauses:
            if len(cl) != 3:
                raise SatFormatError("arity", f"clause {cl!r} does not have 3 variables")
            if any(not 0 <= v < self.t for v in cl):
                raise SatFormatError("index-out-of-range", f"clause {cl!r} with t={self.t}")
            if len(set(cl)) != 3:
                raise SatFormatError("repeated-variable", f"clause {cl!r}")

    @property
    def c(self) -> int:
        return len(self.clauses)

    @property
    def occurrences(self) -> tuple:
        n = [0] * self.t
        for cl in self.clauses:
            for v in cl:
                n[v] += 1
        return tuple(n)

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(sum(bool(assignment[v]) for v in cl) == 1 for cl in self.clauses)

    def without_unused(self) -> tuple["SatInstance", list[int]]:
        """Drop variables that appear in no clause.

        Returns the compacted instance and, for each new variable, its index
        in the original instance.
        """
        used = sorted({v for cl in self.clauses for v in cl})
        renum = {v: i for i, v in enumerate(used)}
        clauses = tuple(tuple(renum[v] for v in cl) for cl in self.clauses)
        return SatInstance(len(used), clauses), used


def parse_sat(text: str) -> SatInstance:
    header = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#") or line.split()[0] == "c":
            continue
        fields = line.split()
        if fields[0] == "p":
            if header is not None:
                raise SatFormatError("syntax", "duplicate header", lineno)
            if len(fields) != 4 or fields[1] != "m1in3":
                raise SatFormatError("syntax", "expected 'p m1in3 <t> <c>'", lineno)
            try:
                header = (int(fields[2]), int(fields[3]))
            except ValueError:
                raise SatFormatError("syntax", "non-integer header field", lineno) from None
            if min(header) < 0:
                raise SatFormatError("syntax", "negative count in header", lineno)
            continue
        if header is None:
            raise SatFormatError("syntax", "clause before header", lineno)
        try:
            lits = [int(x) for x in fields]
        except ValueError:
            raise SatFormatError("syntax", f"bad clause {line!r}", lineno) from None
        if len(lits) != 3:
            raise SatFormatError("arity", f"clause has {len(lits)} variables", lineno)
        t = header[0]
        for v in lits:
            if not 1 <= v <= t:
                raise SatFormatError("index-out-of-range", f"variable {v} with t={t}", lineno)
        if len(set(lits)) != 3:
            raise SatFormatError("repeated-variable", f"clause {line!r}", lineno)
        clauses.append(tuple(v - 1 for v in lits))
    if header is None:
        raise SatFormatError("syntax", "missing 'p m1in3' header")
    if len(clauses) != header[1]:
        raise SatFormatError("syntax", f"header declares {header[1]} clauses, "
                             f"found {len(clauses)}")
    return SatInstance(header[0], tuple(clauses))


def serialize_sat(inst: SatInstance) -> str:
    lines = [f"p m1in3 {inst.t} {inst.c}"]
    lines += [" ".join(str(v + 1) for v in cl) for cl in inst.clauses]
    return "\n".join(lines) + "\n"


MAX_EXHAUSTIVE_VARS = 30


def sat_oracle(inst: SatInstance) -> tuple[bool, Optional[tuple]]:
    """Exhaustive sweep of all 2^t assignments.

    Returns ``(solvable, assignment)`` with the first satisfying assignment
    in binary counting order (variable 0 least significant).
    """
    if inst.t > MAX_EXHAUSTIVE_VARS:
        raise ValueError(f"t={inst.t} exceeds the exhaustive limit {MAX_EXHAUSTIVE_VARS}")
    masks = [(1 << i) | (1 << j) | (1 << k) for i, j, k in inst.clauses]
    for bits in range(1 << inst.t):
        if all((bits & m).bit_count() == 1 for m in masks):
            return True, tuple(bool(bits >> v & 1) for v in range(inst.t))
    return False, None


def solve_by_propagation(inst: SatInstance) -> tuple[bool, Optional[tuple]]:
    """Clause-by-clause search with unit propagation.

    Picks the first clause with no true variable and branches on which of
    its unassigned variables is the true one; everything else in a clause
    with a true variable is forced false.
    """
    value: dict[int, bool] = {}

    def propagate(assign: dict[int, bool]) -> bool:
        changed = True
        while changed:
            changed = False
            for cl in inst.clauses:
                trues = [v for v in cl if assign.get(v) is True]
                if len(trues) > 1:
                    return False
                free = [v for v in cl if v not in assign]
                if trues:
                    for v in free:
                        assign[v] = False
                        changed = True
                elif not free:
                    return False
                elif len(free) == 1:
                    assign[free[0]] = True
                    changed = True
        return True

    def search(assign):
        if not propagate(assign):
            return None
        for cl in inst.clauses:
            if not any(assign.get(v) for v in cl):
                for v in cl:
                    if v not in assign:
                        trial = dict(assign)
                        trial[v] = True
                        found = search(trial)
                        if found is not None:
                            return found
                return None
        return assign

    result = search(value)
    if result is None:
        return False, None
    return True, tuple(result.get(v, False) for v in range(inst.t))


def random_instance(rng: random.Random, t: int, c: int,
                    all_used: bool = True, max_tries: int = 1000) -> SatInstance:
    """Uniform random clauses of three distinct variables.

    With ``all_used`` the draw is repeated until every variable occurs.
    """
    if t < 3 and c > 0:
        raise ValueError("clauses need at least 3 variables")
    if all_used and 3 * c < t:
        raise ValueError(f"{c} clauses cannot use all {t} variables")
    for _ in range(max_tries):
        clauses = tuple(tuple(sorted(rng.sample(range(t), 3))) for _ in range(c))
        inst = SatInstance(t, clauses)
        if not all_used or all(inst.occurrences):
            return inst
    raise RuntimeError("could not draw an instance using every variable")

"""Budgeted backtracking over finite-domain variables with nogood pruning.

Variables are assigned in index order.  A nogood is a set of ``(var, value)``
pairs that may not all hold at once; it is attached to its largest variable
so it gets checked the moment it becomes fully assigned.  Callers choose the
variable order (lexicographic site order for pattern enumeration, centre-out
orders for counterexample searches).
"""

from __future__ import annotations

from collections import defaultdict
from typing import Callable, Iterable, Iterator, Sequence

from .errors import BudgetExhausted


class Budget:
    """Node counter shared between searches. ``limit=None`` means unbounded."""

    def __init__(self, limit: int | None = None):
        self.limit = limit
        self.spent = 0

    def spend(self, k: int = 1) -> None:
        self.spent += k
        if self.limit is not None and self.spent > self.limit:
            raise BudgetExhausted(f"node budget {self.limit} exhausted", spent=self.spent)

    @property
    def remaining(self) -> int | None:
        return None if self.limit is None else max(0, self.limit - self.spent)


def as_budget(budget: Budget | int | None) -> Budget:
    if isinstance(budget, Budget):
        return budget
    return Budget(budget)


Nogood = Sequence[tuple[int, int]]
Predicate = Callable[[list[int]], bool]


class Problem:
    def __init__(self, domains: Sequence[int]):
        self.domains = list(domains)
        n = len(self.domains)
        # _nogoods[var][value] -> list of partial nogoods over earlier vars
        self._nogoods: list[dict[int, list[tuple[tuple[int, int], ...]]]] = [
            defaultdict(list) for _ in range(n)
        ]
        self._predicates: list[list[Predicate]] = [[] for _ in range(n)]
        self.infeasible = False

    def forbid(self, nogood: Iterable[tuple[int, int]]) -> None:
        items: dict[int, int] = {}
        for var, val in nogood:
            if items.get(var, val) != val:
                return  # self-contradictory, can never fire
            items[var] = val
        if not items:
            self.infeasible = True
            return
        for var, val in items.items():
            if not 0 <= val < self.domains[var]:
                return
        last = max(items)
        rest = tuple(sorted((v, s) for v, s in items.items() if v != last))
        self._nogoods[last][items[last]].append(rest)

    def require(self, variables: Iterable[int], predicate: Predicate) -> None:
        """Attach ``predicate(values) -> bool`` once all ``variables`` are set."""
        variables = list(variables)
        if not variables:
            raise ValueError("predicate needs at least one variable")
        self._predicates[max(variables)].append(predicate)

    def solutions(self, budget: Budget | int | None = None) -> Iterator[list[int]]:
        """Yield every consistent total assignment in lexicographic order."""
        budget = as_budget(budget)
        n = len(self.domains)
        if self.infeasible:
            return
        if n == 0:
            yield []
            return
        if any(d == 0 for d in self.domains):
            return
        vals = [-1] * n
        domains = self.domains
        nogoods = self._nogoods
        predicates = self._predicates
        i = 0
        while i >= 0:
            vals[i] += 1
            if vals[i] >= domains[i]:
                vals[i] = -1
                i -= 1
                continue
            budget.spend()
            bad = False
            for rest in nogoods[i].get(vals[i], ()):
                for v, s in rest:
                    if vals[v] != s:
                        break
                else:
                    bad = True
                    break
            if not bad:
                for pred in predicates[i]:
                    if not pred(vals):
                        bad = True
                        break
            if bad:
                continue
            if i == n - 1:
                yield list(vals)
            else:
                i += 1

    def first_solution(self, budget: Budget | int | None = None) -> list[int] | None:
        for sol in self.solutions(budget):
            return sol
        return None

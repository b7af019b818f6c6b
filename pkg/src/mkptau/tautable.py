"""Tables of tau-functions, the hand-off between the fermionic and hierarchy layers."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .algebra.timepoly import TimePolynomial, TimeSpace


@dataclass
class TauTable:
    """``tau^p_{alpha beta}(t)`` for ``p_lo <= p <= p_hi`` and all component pairs.

    Entries are exact polynomials in ``space``; ``taus[(p, a, a)]`` is the
    diagonal tau ``tau^p``.
    """

    n_components: int
    p_lo: int
    p_hi: int
    space: TimeSpace
    taus: dict
    provenance: dict = field(default_factory=dict)

    def tau(self, p: int, alpha: int | None = None, beta: int | None = None) -> TimePolynomial:
        if alpha is None:
            alpha = beta = 1
        if not self.p_lo <= p <= self.p_hi:
            raise KeyError(f"p={p} outside tau table range [{self.p_lo}, {self.p_hi}]")
        return self.taus[(p, alpha, beta)]

    @property
    def p_range(self) -> range:
        return range(self.p_lo, self.p_hi + 1)

    def restricted(self, space: TimeSpace) -> "TauTable":
        return TauTable(self.n_components, self.p_lo, self.p_hi, space,
                        {k: v.restrict(space) for k, v in self.taus.items()}, dict(self.provenance))

    def to_dict(self) -> dict:
        entries = []
        for (p, a, b) in sorted(self.taus):
            entries.append({"p": p, "alpha": a, "beta": b, "tau": self.taus[(p, a, b)].to_text()})
        return {
            "N": self.n_components,
            "p_range": [self.p_lo, self.p_hi],
            "time_space": {"max_order": self.space.max_order, "degree_cap": self.space.degree_cap},
            "provenance": self.provenance,
            "entries": entries,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

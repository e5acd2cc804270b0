"""Conflict removal among overlapping modes and reliable-part extraction.

Modes discovered from different start vertices overlap freely.  The parse is
a single greedy pass in descending confidence order: the strongest mode keeps
all of its vertices, weaker ones lose any vertex already claimed and survive
only if at least two vertices remain (a trimmed singleton carries no
structural evidence).  Trimmed modes are re-scored on what is left of them so
the per-part voting weight reflects the surviving evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .hypergraph import Hypergraph, mode_confidence
from .mode_seeking import Mode

MIN_TRIMMED_MODE_SIZE = 2


@dataclass(frozen=True)
class ReliablePart:
    """A target part with its matched candidate and voting weight."""

    target_part_id: int
    matched_candidate_id: int
    weight: float


def parse_modes(
    modes: Sequence[Mode],
    graph: Hypergraph,
    assoc_weight: float,
    geom_weight: float,
) -> tuple[list[Mode], list[ReliablePart]]:
    """Resolve vertex conflicts across modes and emit the reliable part set.

    Returns the accepted (pairwise vertex-disjoint) modes in processing order
    and one ``ReliablePart`` per target part.  A target part contested across
    accepted modes stays with the mode processed first (highest confidence);
    within one mode, the vertex with the higher association confidence wins,
    ties breaking toward the smaller candidate id.
    """
    ordered = sorted(modes, key=lambda m: (-m.omega, m.start_vertex))
    used: set[int] = set()
    accepted: list[Mode] = []
    for mode in ordered:
        remaining = frozenset(mode.vertex_ids) - used
        if not remaining:
            continue
        if remaining == frozenset(mode.vertex_ids):
            kept = mode
        else:
            if len(remaining) < MIN_TRIMMED_MODE_SIZE:
                continue
            kept = Mode(
                vertex_ids=remaining,
                omega=mode_confidence(remaining, graph, assoc_weight, geom_weight),
                start_vertex=mode.start_vertex,
                n_updates=mode.n_updates,
            )
        accepted.append(kept)
        used |= kept.vertex_ids

    vset = graph.vertices
    chosen: dict[int, ReliablePart] = {}
    for mode in accepted:
        members = sorted(mode.vertex_ids, key=lambda v: (-vset.gamma[v], vset.cand_key[v], v))
        for v in members:
            tgt = int(vset.tgt_key[v])
            if tgt not in chosen:
                chosen[tgt] = ReliablePart(
                    target_part_id=tgt,
                    matched_candidate_id=int(vset.cand_key[v]),
                    weight=float(mode.omega),
                )
    reliable = [chosen[t] for t in sorted(chosen)]
    return accepted, reliable

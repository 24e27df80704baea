"""Theme decision and the final two-spot sightseeing plan.

Yes-answered spots become candidates; sentiment ranks them; the desired
spot, when known, is always included and leads the plan.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .nlu.sentiment import SentimentScore
from .nlu.yesno import YesNoResult
from .spots import SpotCatalog, Theme

PLAN_SIZE = 2


class PlanError(Exception):
    pass


class EvidenceSource(enum.Enum):
    YES_ANSWER = "YesAnswer"
    SENTIMENT_RANK = "SentimentRank"
    DESIRED_OVERRIDE = "DesiredOverride"


@dataclass(frozen=True)
class PlanEvidence:
    source: EvidenceSource
    sentiment: float | None
    label: str | None


@dataclass(frozen=True)
class Plan:
    spots: tuple[str, str]
    rationale_text: str
    evidence: dict[str, PlanEvidence]

    def with_rationale(self, text: str) -> Plan:
        return replace(self, rationale_text=text)

    def to_export(self, catalog: SpotCatalog | None = None) -> dict:
        spots = []
        for spot_id in self.spots:
            record = catalog.get(spot_id) if catalog else None
            spots.append(
                {
                    "id": spot_id,
                    "name": record.name if record else spot_id,
                    "reason_source": self.evidence[spot_id].source.value,
                }
            )
        return {"spots": spots, "rationale_text": self.rationale_text}


def determine_theme(frame, catalog: SpotCatalog | None = None) -> Theme:
    """Recommended theme: the desired spot's theme when one is known,
    else the Yes-answered probe with the highest sentiment, else Others."""
    desired = getattr(frame, "desired_spot", None)
    if desired and catalog is not None:
        spot = catalog.get(desired)
        if spot is not None:
            return spot.theme
    best: tuple[float, int] | None = None
    best_theme = None
    for index, (theme, (answer, sentiment)) in enumerate(frame.theme_probes.items()):
        if answer.label != "yes":
            continue
        key = (-sentiment.value, index)
        if best is None or key < best:
            best = key
            best_theme = theme
    return best_theme if best_theme is not None else Theme.OTHERS


def build_plan(
    introduced: list[str],
    answers: dict[str, YesNoResult],
    sentiments: dict[str, SentimentScore],
    desired: str | None = None,
) -> Plan:
    """Assemble the two-spot plan.

    Slot order: desired spot first when set; then Yes-answered spots by
    sentiment descending; then the rest ranked Other before No, again by
    sentiment.  Id ascending breaks every tie.
    """
    missing = [s for s in introduced if s not in answers]
    if missing:
        raise PlanError(f"answers missing for introduced spots: {missing}")

    def sentiment_of(spot_id: str) -> float:
        score = sentiments.get(spot_id)
        return score.value if score is not None else 0.0

    chosen: list[str] = []
    evidence: dict[str, PlanEvidence] = {}

    if desired is not None:
        chosen.append(desired)
        evidence[desired] = PlanEvidence(
            EvidenceSource.DESIRED_OVERRIDE,
            sentiments[desired].value if desired in sentiments else None,
            answers[desired].label if desired in answers else None,
        )

    yes_spots = [s for s in introduced if answers[s].label == "yes" and s not in chosen]
    yes_spots.sort(key=lambda s: (-sentiment_of(s), s))
    for spot in yes_spots:
        if len(chosen) >= PLAN_SIZE:
            break
        chosen.append(spot)
        evidence[spot] = PlanEvidence(
            EvidenceSource.YES_ANSWER, sentiment_of(spot), answers[spot].label
        )

    if len(chosen) < PLAN_SIZE:
        label_rank = {"other": 0, "no": 1}
        rest = [s for s in introduced if s not in chosen]
        rest.sort(key=lambda s: (label_rank.get(answers[s].label, 0), -sentiment_of(s), s))
        for spot in rest:
            if len(chosen) >= PLAN_SIZE:
                break
            chosen.append(spot)
            evidence[spot] = PlanEvidence(
                EvidenceSource.SENTIMENT_RANK, sentiment_of(spot), answers[spot].label
            )

    if len(chosen) < PLAN_SIZE:
        raise PlanError(f"only {len(chosen)} distinct plan candidates available")

    return Plan(spots=(chosen[0], chosen[1]), rationale_text="", evidence=evidence)


def render_recommendation_reason(plan: Plan, frame, catalog: SpotCatalog) -> str:
    """Template-based reason referencing icebreaker facts when available."""

    def name(spot_id: str) -> str:
        spot = catalog.get(spot_id)
        return spot.name if spot else spot_id

    first, second = plan.spots
    parts = [f"I recommend visiting {name(first)} and then {name(second)}."]

    facts: list[str] = []
    desired = getattr(frame, "desired_spot", None)
    if desired and desired in plan.spots:
        facts.append(f"you told me you really wanted to see {name(desired)}")
    visited = sorted(getattr(frame, "visited_spots", ()) or ())
    if visited:
        visited_names = ", ".join(name(v) for v in visited)
        facts.append(f"you have already been to {visited_names}, so these are new to you")
    theme = getattr(frame, "theme", None)
    if theme is not None and not facts:
        facts.append(f"you seemed to enjoy the {theme.value} theme most")

    if facts:
        parts.append("I chose them because " + " and ".join(facts) + ".")
    else:
        parts.append("They are close together, so both fit comfortably into one day.")

    yes_names = [
        name(s)
        for s in plan.spots
        if plan.evidence[s].source is EvidenceSource.YES_ANSWER
    ]
    if yes_names:
        parts.append(f"You sounded interested in {' and '.join(yes_names)}.")
    return " ".join(parts)

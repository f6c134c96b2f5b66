"""Weighted multi-stream sampling driven by an explicit phase schedule.

Each phase draws a fixed number of documents from named streams under its own
weights; switching weights between phases is how sampling ratios are adjusted
over the course of a run (including a final phase pointed at high-quality
streams for re-feeding). One seeded generator drives the whole schedule.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

ON_EXHAUSTED_RENORMALIZE = "renormalize"
ON_EXHAUSTED_ERROR = "error"


class SampleError(ValueError):
    pass


@dataclass
class Phase:
    weights: dict[str, float]
    length: int


@dataclass
class SamplingSchedule:
    phases: list[Phase]

    def __post_init__(self):
        if not self.phases:
            raise SampleError("schedule has no phases")
        for i, phase in enumerate(self.phases):
            if phase.length < 1:
                raise SampleError(f"phase {i}: length must be >= 1")
            if any(w < 0 for w in phase.weights.values()):
                raise SampleError(f"phase {i}: negative weight")
            if not any(w > 0 for w in phase.weights.values()):
                raise SampleError(f"phase {i}: needs at least one positive weight")


def schedule_from_obj(obj: dict) -> SamplingSchedule:
    try:
        phases = [Phase(dict(p["weights"]), int(p["length"])) for p in obj["phases"]]
    except (KeyError, TypeError) as e:
        raise SampleError(f"malformed schedule: {e}") from e
    return SamplingSchedule(phases)


def sample_stream(streams: dict, schedule: SamplingSchedule, seed: int,
                  on_exhausted: str = ON_EXHAUSTED_RENORMALIZE):
    """Yield documents drawn per the schedule from named document sources.

    Within a phase every draw picks a stream from the normalized weights via
    the seeded generator and takes that stream's next document in order.
    Streams found exhausted are dropped from the draw (or raise, when
    `on_exhausted` is "error"); running out of every weighted stream before
    the schedule completes always raises.
    """
    if on_exhausted not in (ON_EXHAUSTED_RENORMALIZE, ON_EXHAUSTED_ERROR):
        raise SampleError(f"unknown exhaustion policy: {on_exhausted!r}")
    for i, phase in enumerate(schedule.phases):
        missing = set(phase.weights) - set(streams)
        if missing:
            raise SampleError(f"phase {i} references unknown streams: {sorted(missing)}")
    iters = {name: iter(src) for name, src in streams.items()}
    exhausted: set[str] = set()
    rng = random.Random(seed)
    sentinel = object()

    for phase_index, phase in enumerate(schedule.phases):
        emitted = 0
        while emitted < phase.length:
            active = sorted(
                name for name, w in phase.weights.items()
                if w > 0 and name not in exhausted
            )
            if not active:
                raise SampleError(
                    f"all streams exhausted in phase {phase_index} "
                    f"after {emitted} of {phase.length} documents"
                )
            total = sum(phase.weights[name] for name in active)
            r = rng.random() * total
            acc = 0.0
            chosen = active[-1]
            for name in active:
                acc += phase.weights[name]
                if r < acc:
                    chosen = name
                    break
            doc = next(iters[chosen], sentinel)
            if doc is sentinel:
                if on_exhausted == ON_EXHAUSTED_ERROR:
                    raise SampleError(f"stream {chosen!r} exhausted in phase {phase_index}")
                exhausted.add(chosen)
                continue
            yield doc
            emitted += 1

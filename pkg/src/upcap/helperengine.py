"""Receiver-side engine: inter-arrival throughput samples and outlier filtering.

A helper accepts probe frames, turns the cumulative byte counter carried by
each accepted pair into a throughput sample, and at the end of a test filters
the sample set (median band + iterated standard-deviation trim) and reports
the surviving average.  A continuous mode serves sliding-window estimates
over the most recent samples.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

from .wire import ReportFrame


@dataclass(frozen=True)
class FilterParams:
    p1: float = 0.2          # lower median band factor
    p2: float = 5.0          # upper median band factor
    q: float = 1.0           # std-deviation band factor for the iterated trim
    K: int = 3               # trim loop guard: only trim while count > K
    min_p: int = 5           # samples needed before a continuous-mode estimate
    idle_timeout: float = 5.0  # seconds of silence treated as completion

    def __post_init__(self) -> None:
        if not (0.0 <= self.p1 <= 1.0 <= self.p2):
            raise ValueError("need p1 <= 1 <= p2")
        if self.q <= 0 or self.K < 1 or self.min_p < 2:
            raise ValueError("bad filter parameters")


def median(values: list[float]) -> float:
    """Middle element for odd counts, mean of the two middle ones for even."""
    if not values:
        raise ValueError("median of empty list")
    return statistics.median(values)


def median_band_filter(samples: list[float], p1: float, p2: float) -> list[float]:
    """Drop values strictly outside [p1*median, p2*median] (inclusive band)."""
    if not samples:
        raise ValueError("empty sample list")
    med = median(samples)
    return [s for s in samples if p1 * med <= s <= p2 * med]


def iterated_trim(samples: list[float], q: float, K: int) -> list[float]:
    """While more than K samples remain, drop values outside mean +/- q*sigma.

    sigma is the population standard deviation; boundaries are inclusive.
    Stops as soon as a round removes nothing.
    """
    if not samples:
        raise ValueError("empty sample list")
    vals = list(samples)
    while len(vals) > K:
        um = statistics.fmean(vals)
        sgm = statistics.pstdev(vals)
        kept = [v for v in vals if um - q * sgm <= v <= um + q * sgm]
        if not kept or len(kept) == len(vals):
            # A round that removes nothing -- or, through floating-point
            # rounding on near-identical values, would remove everything --
            # ends the trim.
            break
        vals = kept
    return vals


def filter_pipeline(samples: list[float], params: FilterParams) -> list[float]:
    return iterated_trim(median_band_filter(samples, params.p1, params.p2), params.q, params.K)


def filtered_average(samples: list[float], params: FilterParams) -> tuple[float, int]:
    """(mean of surviving samples, surviving count) after the full pipeline."""
    kept = filter_pipeline(samples, params)
    return statistics.fmean(kept), len(kept)


@dataclass(frozen=True)
class FrameOutcome:
    accepted: bool
    sample: float | None = None
    clock_anomaly: bool = False


@dataclass
class ArrivalRecord:
    tab: int
    t: float


class HelperEngine:
    """Single-helper state machine; all inputs arrive as explicit events."""

    def __init__(self, params: FilterParams | None = None, continuous: bool = False) -> None:
        self.params = params or FilterParams()
        self.continuous = continuous
        self.samples: list[float] = []
        self.arrivals: list[ArrivalRecord] = []
        self.clock_anomalies = 0
        self.discarded = 0
        self.finalized = False
        self.last_activity: float | None = None

    def accept_frame(self, tab: int, now: float) -> FrameOutcome:
        if self.finalized:
            self.discarded += 1
            return FrameOutcome(accepted=False)
        prev = self.arrivals[-1] if self.arrivals else None
        if prev is not None and tab <= prev.tab:
            self.discarded += 1
            return FrameOutcome(accepted=False)
        self.arrivals.append(ArrivalRecord(tab, now))
        self.last_activity = now
        if prev is None:
            return FrameOutcome(accepted=True)
        if now <= prev.t:
            self.clock_anomalies += 1
            return FrameOutcome(accepted=True, clock_anomaly=True)
        u = (tab - prev.tab) / (now - prev.t)
        self.samples.append(u)
        return FrameOutcome(accepted=True, sample=u)

    def sliding_estimate(self) -> float | None:
        if not self.continuous or len(self.samples) < self.params.min_p:
            return None
        window = self.samples[-self.params.min_p :]
        avg, _ = filtered_average(window, self.params)
        return avg

    def on_completion(self, now: float) -> None:
        self.finalized = True
        self.last_activity = now

    def check_idle(self, now: float) -> bool:
        """Finalize if idle_timeout elapsed since the last accepted frame."""
        if self.finalized:
            return True
        if self.last_activity is not None and now - self.last_activity >= self.params.idle_timeout:
            self.finalized = True
        return self.finalized

    def report(self) -> ReportFrame | None:
        """Final per-helper report, or None when no sample survived.

        A missing report is distinct from a zero estimate: with no samples
        there is nothing to average.
        """
        if not self.samples:
            return None
        avg, count = filtered_average(self.samples, self.params)
        return ReportFrame(uavg_bps=round(avg), sample_count=count)

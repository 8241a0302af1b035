"""Cooperative upload-capacity estimation and ring-constrained allocation.

A source measures its upload capacity by streaming probe frames to helper
peers, each of which converts probe inter-arrival times into throughput
samples, filters outliers and reports an average back; the source
aggregates the reports into one capacity figure with a confidence flag.
Rate-limited variants search for the currently *available* upload
bandwidth.  A companion solver maximizes total allocation on a ring of
providers and consumers, in four algorithmic flavors that cross-check
each other.
"""

from .wire import (
    CompletionFrame,
    Frame,
    FrameError,
    ProbeFrame,
    ReportFrame,
    StreamDecoder,
    decode_stream,
    encode_frame,
)
from .helperengine import (
    FilterParams,
    HelperEngine,
    filter_pipeline,
    filtered_average,
    iterated_trim,
    median,
    median_band_filter,
)
from .sender import (
    AggregationParams,
    AubResult,
    AubSearchParams,
    AubStepper,
    CapacityEstimate,
    PingProbeParams,
    PingStats,
    SenderConfig,
    SenderEngine,
    TokenBucket,
    aggregate_reports,
    aub_search,
    evaluate_ping_quality,
)
from .netsim import BackgroundFlow, PathConfig, PingConfig, SimConfig, Simulator
from .scenarios import (
    SessionResult,
    run_aub_search,
    run_capacity_test,
    run_headroom_check,
    run_ping_probe,
    run_rate_limited,
)
from .ringalloc import (
    AllocationInstance,
    AllocationResult,
    InstanceTooLarge,
    RsumProfile,
    ShapeViolation,
    brute_force_oracle,
    compute_fg,
    format_instance,
    greedy_algo,
    parse_instance,
    rsum_closed_form,
    rsum_max,
    rsum_naive,
    rsum_sweep,
)

__version__ = "0.1.0"

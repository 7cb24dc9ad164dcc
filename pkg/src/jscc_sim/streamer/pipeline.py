"""
Dual-worker streaming pipeline

Worker 1 encodes frames as they arrive at the frame rate and puts them into a
bounded buffer, blocking while the buffer is full. Worker 2 takes frames in
FIFO order, transmits them, then blocks for channel access before the next
one. The receiver is a single decoder: a frame starts decoding once it is
received and the previous frame has left the decoder.

Stage durations are drawn once per frame from the configured time models, so
the discrete-event and wall-clock modes replay the same schedule.
"""

import logging
import queue
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Tuple, Union

import numpy as np
import simpy

from jscc_sim.core.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

DISCRETE_EVENT = "discrete-event"
WALL_CLOCK = "wall-clock"

IDLE = "idle"
WORKING = "working"
BLOCKING = "blocking"

# Seconds between stop checks while a wall-clock worker waits on the buffer
POLL_INTERVAL = 0.01

StageFn = Callable[[Any], Any]


@dataclass(frozen=True)
class StageTime:
    """Stage duration in seconds: fixed when jitter is 0, else normal and clipped at 0"""
    mean: float
    jitter: float = 0.0

    def __post_init__(self) -> None:
        if self.mean < 0 or self.jitter < 0:
            raise InvalidArgumentError(f"stage time needs mean, jitter >= 0, got {self.mean}, {self.jitter}")

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        if self.jitter == 0:
            return np.full(count, float(self.mean))
        return np.maximum(rng.normal(self.mean, self.jitter, size=count), 0.0)


def _as_stage_time(value: Union[StageTime, float, int]) -> StageTime:
    if isinstance(value, StageTime):
        return value
    return StageTime(float(value))


@dataclass
class PipelineConfig:
    frame_rate: float = 30.0
    buffer_capacity: int = 2
    encode_time_model: StageTime = field(default_factory=lambda: StageTime(0.005))
    transmit_time_model: StageTime = field(default_factory=lambda: StageTime(0.005))
    n_frames: int = 100
    mode: str = DISCRETE_EVENT
    decode_time_model: StageTime = field(default_factory=lambda: StageTime(0.0))
    channel_wait_model: StageTime = field(default_factory=lambda: StageTime(0.0))

    def __post_init__(self) -> None:
        self.encode_time_model = _as_stage_time(self.encode_time_model)
        self.transmit_time_model = _as_stage_time(self.transmit_time_model)
        self.decode_time_model = _as_stage_time(self.decode_time_model)
        self.channel_wait_model = _as_stage_time(self.channel_wait_model)
        if self.frame_rate <= 0:
            raise InvalidArgumentError(f"frame_rate must be positive, got {self.frame_rate}")
        if self.buffer_capacity < 1:
            raise InvalidArgumentError(f"buffer_capacity must be >= 1, got {self.buffer_capacity}")
        if self.n_frames < 0:
            raise InvalidArgumentError(f"n_frames must be >= 0, got {self.n_frames}")
        if self.mode not in (DISCRETE_EVENT, WALL_CLOCK):
            raise InvalidArgumentError(f"mode must be {DISCRETE_EVENT!r} or {WALL_CLOCK!r}, got {self.mode!r}")

    @property
    def frame_interval(self) -> float:
        return 1.0 / self.frame_rate


@dataclass
class FrameEvent:
    """Timestamps (seconds from pipeline start) of one frame"""
    frame_index: int
    arrival_time: float
    encode_start: float = 0.0
    encode_end: float = 0.0
    enqueue_time: float = 0.0
    transmit_start: float = 0.0
    transmit_end: float = 0.0
    decode_start: float = 0.0
    decode_end: float = 0.0
    states: Tuple[str, ...] = ()

    @property
    def encoder_blocking(self) -> float:
        """Time worker 1 waited for buffer space"""
        return self.enqueue_time - self.encode_end


@dataclass
class PipelineReport:
    events: List[FrameEvent] = field(default_factory=list)
    occupancy: List[Tuple[float, int]] = field(default_factory=list)
    outputs: List[Any] = field(default_factory=list)
    buffer_capacity: int = 1

    @property
    def gaps(self) -> np.ndarray:
        """Inter-frame decode gaps in seconds"""
        ends = np.array([e.decode_end for e in self.events])
        return np.diff(ends) if ends.size > 1 else np.zeros(0)


@dataclass
class _Schedule:
    encode: np.ndarray
    transmit: np.ndarray
    channel_wait: np.ndarray
    decode: np.ndarray


class _Stopped(Exception):
    """The other wall-clock worker failed"""


def _draw_schedule(config: PipelineConfig, seed: int) -> _Schedule:
    rng = np.random.default_rng(seed)
    n = config.n_frames
    return _Schedule(
        encode=config.encode_time_model.sample(rng, n),
        transmit=config.transmit_time_model.sample(rng, n),
        channel_wait=config.channel_wait_model.sample(rng, n),
        decode=config.decode_time_model.sample(rng, n),
    )


def _identity(value: Any) -> Any:
    return value


def _decode_window(event: FrameEvent, previous_end: float, duration: float) -> None:
    event.decode_start = max(previous_end, event.transmit_end)
    event.decode_end = event.decode_start + duration


def _visited(event: FrameEvent, idle_before_encode: bool, idle_before_transmit: bool,
             channel_wait: float) -> Tuple[str, ...]:
    states = {WORKING}
    if idle_before_encode or idle_before_transmit:
        states.add(IDLE)
    if event.encoder_blocking > 0 or channel_wait > 0:
        states.add(BLOCKING)
    return tuple(s for s in (IDLE, WORKING, BLOCKING) if s in states)


def _run_discrete_event(config: PipelineConfig, schedule: _Schedule, encode_fn: StageFn,
                        channel_fn: StageFn, decode_fn: StageFn) -> PipelineReport:
    env = simpy.Environment()
    buffer = simpy.Store(env, capacity=config.buffer_capacity)
    report = PipelineReport(buffer_capacity=config.buffer_capacity)
    events = [FrameEvent(frame_index=i, arrival_time=i * config.frame_interval) for i in range(config.n_frames)]
    idle_encode = [False] * config.n_frames
    outputs: List[Any] = [None] * config.n_frames

    def record_occupancy() -> None:
        report.occupancy.append((float(env.now), len(buffer.items)))

    def encoder():
        for i, event in enumerate(events):
            if env.now < event.arrival_time:
                idle_encode[i] = True
                yield env.timeout(event.arrival_time - env.now)
            event.encode_start = env.now
            payload = encode_fn(i)
            yield env.timeout(schedule.encode[i])
            event.encode_end = env.now
            yield buffer.put((i, payload))
            event.enqueue_time = env.now
            record_occupancy()

    def transmitter():
        decoded_until = 0.0
        for _ in range(config.n_frames):
            waited_from = env.now
            i, payload = yield buffer.get()
            record_occupancy()
            event = events[i]
            event.transmit_start = env.now
            rx = channel_fn(payload)
            yield env.timeout(schedule.transmit[i])
            event.transmit_end = env.now
            _decode_window(event, decoded_until, schedule.decode[i])
            decoded_until = event.decode_end
            outputs[i] = decode_fn(rx)
            event.states = _visited(event, idle_encode[i], event.transmit_start > waited_from,
                                    schedule.channel_wait[i])
            if schedule.channel_wait[i] > 0:
                yield env.timeout(schedule.channel_wait[i])

    env.process(encoder())
    env.process(transmitter())
    env.run()

    report.events = events
    report.outputs = outputs
    return report


def _run_wall_clock(config: PipelineConfig, schedule: _Schedule, encode_fn: StageFn,
                    channel_fn: StageFn, decode_fn: StageFn) -> PipelineReport:
    buffer: "queue.Queue[Tuple[int, Any]]" = queue.Queue(maxsize=config.buffer_capacity)
    report = PipelineReport(buffer_capacity=config.buffer_capacity)
    events = [FrameEvent(frame_index=i, arrival_time=i * config.frame_interval) for i in range(config.n_frames)]
    idle_encode = [False] * config.n_frames
    outputs: List[Any] = [None] * config.n_frames
    lock = threading.Lock()
    stop = threading.Event()
    errors: List[BaseException] = []
    start = time.perf_counter()

    def now() -> float:
        return time.perf_counter() - start

    def hold(since: float, duration: float) -> None:
        remaining = duration - (now() - since)
        if remaining > 0:
            time.sleep(remaining)

    def record_occupancy() -> None:
        with lock:
            report.occupancy.append((now(), buffer.qsize()))

    def put(item: Tuple[int, Any]) -> None:
        while not stop.is_set():
            try:
                buffer.put(item, timeout=POLL_INTERVAL)
                return
            except queue.Full:
                continue
        raise _Stopped

    def get() -> Tuple[int, Any]:
        while not stop.is_set():
            try:
                return buffer.get(timeout=POLL_INTERVAL)
            except queue.Empty:
                continue
        raise _Stopped

    def fail(error: BaseException) -> None:
        errors.append(error)
        stop.set()

    def encoder() -> None:
        try:
            for i, event in enumerate(events):
                ahead = event.arrival_time - now()
                if ahead > 0:
                    idle_encode[i] = True
                    time.sleep(ahead)
                event.encode_start = now()
                payload = encode_fn(i)
                hold(event.encode_start, schedule.encode[i])
                event.encode_end = now()
                put((i, payload))
                event.enqueue_time = now()
                record_occupancy()
        except _Stopped:
            pass
        except BaseException as e:  # surfaced by the coordinator
            fail(e)

    def transmitter() -> None:
        decoded_until = 0.0
        try:
            for _ in range(config.n_frames):
                waited_from = now()
                i, payload = get()
                record_occupancy()
                event = events[i]
                event.transmit_start = now()
                rx = channel_fn(payload)
                hold(event.transmit_start, schedule.transmit[i])
                event.transmit_end = now()
                outputs[i] = decode_fn(rx)
                _decode_window(event, decoded_until, schedule.decode[i])
                decoded_until = event.decode_end
                event.states = _visited(event, idle_encode[i], event.transmit_start - waited_from > 1e-4,
                                        schedule.channel_wait[i])
                if schedule.channel_wait[i] > 0:
                    time.sleep(schedule.channel_wait[i])
        except _Stopped:
            pass
        except BaseException as e:
            fail(e)

    workers = [
        threading.Thread(target=encoder, name="encoder", daemon=True),
        threading.Thread(target=transmitter, name="transmitter", daemon=True),
    ]
    for worker in workers:
        worker.start()
    for worker in workers:
        worker.join()
    if errors:
        raise errors[0]

    report.events = events
    report.outputs = outputs
    return report


def run_pipeline(config: PipelineConfig, encode_fn: Optional[StageFn] = None,
                 channel_fn: Optional[StageFn] = None, decode_fn: Optional[StageFn] = None,
                 seed: int = 0) -> PipelineReport:
    """
    Run the two-worker pipeline

    Args:
        config: Rates, buffer size, stage time models and mode
        encode_fn: Called with the frame index, returns the buffered payload
        channel_fn: Called with a payload at transmission, returns what is received
        decode_fn: Called with the received value, result lands in report.outputs
        seed: Seed for sampled stage times

    Returns:
        Per-frame events, buffer occupancy trace and decoded outputs
    """
    encode_fn = encode_fn or _identity
    channel_fn = channel_fn or _identity
    decode_fn = decode_fn or _identity
    if config.n_frames == 0:
        return PipelineReport(buffer_capacity=config.buffer_capacity)

    schedule = _draw_schedule(config, seed)
    logger.info("Running %s pipeline: %d frames at %.1f FPS, buffer %d",
                config.mode, config.n_frames, config.frame_rate, config.buffer_capacity)
    if config.mode == DISCRETE_EVENT:
        return _run_discrete_event(config, schedule, encode_fn, channel_fn, decode_fn)
    return _run_wall_clock(config, schedule, encode_fn, channel_fn, decode_fn)

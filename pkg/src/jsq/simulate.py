"""Event-driven simulation of four coupled loss systems on shared clocks.

Four independent Poisson streams drive everything: two arrival streams of
rate rho and two departure streams of rate 1.  The same stream epochs are
fed to the JSQ pair, an M/M/1/K queue (arrival 2 rho, service 2), an
M/M/2/2K queue and an M/M/1/2K queue.  Under the coupling's service
assignment rules the pathwise ordering

    N_mm1_2k <= N_mm2_2k <= L1 + L2 <= K + N_mm1_k

holds at every event; the simulator counts violations (always expected 0).

The tie and server-dedication rules below are load-bearing for the
coupling; do not "simplify" them:
  - departure stream 1 serves the currently longest JSQ queue, queue 1 on
    a tie, and is the M/M/2 server that works whenever >= 1 customer is
    present;
  - departure stream 2 serves the shortest JSQ queue, queue 2 on a tie,
    and is the M/M/2 server that works only when >= 2 are present;
  - on an arrival tie with room, stream-1 arrivals go to queue 1 and
    stream-2 arrivals to queue 2.

Exponential clocks come from counter-based Philox generators keyed by
(seed, stream id) with inversion sampling, so every run is replayable and
streams stay independent.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .model import SymmetricParams

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap if not (args and callable(args[0])) else args[0]


N_STREAMS = 4  # arr-1, arr-2, dep-1, dep-2
WARMUP_FRACTION = 0.1


def _stream_gaps(rho: float, seed: int, sizes) -> list:
    """Per-stream i.i.d. exponential inter-event times (inversion method)."""
    rates = (rho, rho, 1.0, 1.0)
    out = []
    for sid in range(N_STREAMS):
        bg = np.random.Philox(key=np.uint64(seed) * np.uint64(N_STREAMS) + np.uint64(sid))
        gen = np.random.Generator(bg)
        out.append(gen.standard_exponential(sizes[sid], method="inv") / rates[sid])
    return out


@njit(cache=True)
def _event_loop(e0, e1, e2, e3, K, n_events, max_arrivals, warmup_events, blocked):
    # next absolute epoch per stream; inf once a stream is exhausted
    nxt = np.empty(4)
    ptr = np.zeros(4, dtype=np.int64)
    lens = np.array([e0.shape[0], e1.shape[0], e2.shape[0], e3.shape[0]])
    nxt[0] = e0[0] if lens[0] > 0 else np.inf
    nxt[1] = e1[0] if lens[1] > 0 else np.inf
    nxt[2] = e2[0] if lens[2] > 0 else np.inf
    nxt[3] = e3[0] if lens[3] > 0 else np.inf

    L1 = 0
    L2 = 0
    nb = 0  # M/M/1/K
    nn = 0  # M/M/2/2K
    nbb = 0  # M/M/1/2K
    viol = 0
    arrivals = 0
    blk = np.zeros(4, dtype=np.int64)  # blocked arrivals: jsq, mm1k, mm2, mm1_2k
    ev_count = np.zeros(4, dtype=np.int64)
    occ_int = np.zeros(4)  # post-warmup time integrals of the four totals
    t = 0.0
    post_time = 0.0
    events = 0
    exhausted = False

    while events < n_events and arrivals < max_arrivals:
        s = 0
        for c in range(1, 4):
            if nxt[c] < nxt[s]:
                s = c
        t_new = nxt[s]
        if t_new == np.inf:
            exhausted = True
            break
        dt = t_new - t
        if events >= warmup_events:
            occ_int[0] += (L1 + L2) * dt
            occ_int[1] += nb * dt
            occ_int[2] += nn * dt
            occ_int[3] += nbb * dt
            post_time += dt
        t = t_new
        ptr[s] += 1
        if ptr[s] < lens[s]:
            if s == 0:
                nxt[s] = t + e0[ptr[s]]
            elif s == 1:
                nxt[s] = t + e1[ptr[s]]
            elif s == 2:
                nxt[s] = t + e2[ptr[s]]
            else:
                nxt[s] = t + e3[ptr[s]]
        else:
            nxt[s] = np.inf
        ev_count[s] += 1

        if s <= 1:  # arrival epoch (both streams feed every system)
            if L1 == K and L2 == K:
                blk[0] += 1
                blocked[arrivals] = 1
            else:
                blocked[arrivals] = 0
                if L1 < L2:
                    L1 += 1
                elif L2 < L1:
                    L2 += 1
                elif s == 0:
                    L1 += 1
                else:
                    L2 += 1
            if nb < K:
                nb += 1
            else:
                blk[1] += 1
            if nn < 2 * K:
                nn += 1
            else:
                blk[2] += 1
            if nbb < 2 * K:
                nbb += 1
            else:
                blk[3] += 1
            arrivals += 1
        elif s == 2:  # dep stream 1: longest queue, queue 1 on tie
            if L1 >= L2 and L1 >= 1:
                L1 -= 1
            elif L2 > L1:
                L2 -= 1
            if nb >= 1:
                nb -= 1
            if nn >= 1:
                nn -= 1
            if nbb >= 1:
                nbb -= 1
        else:  # dep stream 2: shortest queue, queue 2 on tie
            if 1 <= L1 < L2:
                L1 -= 1
            elif L2 >= 1 and L2 <= L1:
                L2 -= 1
            if nn >= 2:
                nn -= 1
            if nb >= 1:
                nb -= 1
            if nbb >= 1:
                nbb -= 1
        events += 1
        if not (nbb <= nn and nn <= L1 + L2 and L1 + L2 <= K + nb):
            viol += 1

    return (
        events,
        arrivals,
        viol,
        blk,
        ev_count,
        occ_int,
        post_time,
        t,
        exhausted,
    )


@dataclass
class CoupledReport:
    """Aggregates of one replica run; deterministic given (params, seed)."""

    rho: float
    K: int
    seed: int
    n_events: int
    arrivals: int
    ordering_violations: int
    blocked: dict  # per system, counts over the full path
    blocking_fraction: dict  # blocked / arrivals
    mean_occupancy: dict  # post-warmup time averages of the totals
    stream_events: list
    model_time: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


_SYSTEMS = ("jsq", "mm1_k", "mm2_2k", "mm1_2k")


def simulate_coupled(p: SymmetricParams, n_events: int, seed: int) -> CoupledReport:
    """Run the four coupled systems for exactly n_events stream epochs."""
    rho, K = float(p.rho), p.K
    if n_events < 1:
        raise ValueError("n_events must be >= 1")
    total_rate = 2 * rho + 2
    margin = 1.3
    while True:
        sizes = [
            int(n_events * (rho / total_rate) * margin) + 1024,
            int(n_events * (rho / total_rate) * margin) + 1024,
            int(n_events * (1.0 / total_rate) * margin) + 1024,
            int(n_events * (1.0 / total_rate) * margin) + 1024,
        ]
        gaps = _stream_gaps(rho, seed, sizes)
        blocked = np.zeros(sizes[0] + sizes[1], dtype=np.uint8)
        warmup = int(n_events * WARMUP_FRACTION)
        (events, arrivals, viol, blk, ev_count, occ_int, post_time, t, exhausted) = _event_loop(
            gaps[0], gaps[1], gaps[2], gaps[3],
            K, n_events, 2 ** 62, warmup, blocked,
        )
        if not exhausted and events == n_events:
            break
        margin *= 1.5  # prefix property of the streams keeps results identical
    return CoupledReport(
        rho=rho,
        K=K,
        seed=seed,
        n_events=events,
        arrivals=arrivals,
        ordering_violations=viol,
        blocked={s: int(blk[i]) for i, s in enumerate(_SYSTEMS)},
        blocking_fraction={
            s: (int(blk[i]) / arrivals if arrivals else 0.0) for i, s in enumerate(_SYSTEMS)
        },
        mean_occupancy={
            s: (float(occ_int[i]) / post_time if post_time > 0 else 0.0)
            for i, s in enumerate(_SYSTEMS)
        },
        stream_events=[int(c) for c in ev_count],
        model_time=float(t),
    )


def merge_reports(reports: list) -> dict:
    """Pure reducer over replica reports (event-weighted means)."""
    tot_events = sum(r.n_events for r in reports)
    tot_arr = sum(r.arrivals for r in reports)
    return {
        "replicas": len(reports),
        "n_events": tot_events,
        "arrivals": tot_arr,
        "ordering_violations": sum(r.ordering_violations for r in reports),
        "blocking_fraction": {
            s: sum(r.blocked[s] for r in reports) / tot_arr for s in _SYSTEMS
        },
        "mean_occupancy": {
            s: sum(r.mean_occupancy[s] * r.n_events for r in reports) / tot_events
            for s in _SYSTEMS
        },
    }


def estimate_blocking(
    p: SymmetricParams, n_arrivals: int, seed: int, n_batches: int = 20
) -> tuple:
    """JSQ blocking estimate over n_arrivals arrivals, with a batch-means CI.

    The first 10% of arrivals are discarded as warm-up; the rest are split
    into n_batches contiguous batches and a normal-approximation 95%
    half-width is computed from the batch means.  Returns (estimate, half).
    """
    rho, K = float(p.rho), p.K
    if n_arrivals < n_batches * 2:
        raise ValueError("need at least two arrivals per batch")
    horizon = n_arrivals / (2 * rho)
    margin = 1.1
    while True:
        arr_size = int(n_arrivals * 0.55 * margin) + 1024
        dep_size = int(horizon * margin) + 1024
        sizes = [arr_size, arr_size, dep_size, dep_size]
        gaps = _stream_gaps(rho, seed, sizes)
        blocked = np.zeros(2 * arr_size, dtype=np.uint8)
        (events, arrivals, viol, blk, ev_count, occ_int, post_time, t, exhausted) = _event_loop(
            gaps[0], gaps[1], gaps[2], gaps[3],
            K, 2 ** 62, n_arrivals, 0, blocked,
        )
        if arrivals == n_arrivals:
            break
        margin *= 1.4
    flags = blocked[:arrivals].astype(np.float64)
    start = int(arrivals * WARMUP_FRACTION)
    kept = flags[start:]
    per = len(kept) // n_batches
    means = kept[: per * n_batches].reshape(n_batches, per).mean(axis=1)
    est = float(means.mean())
    half = 1.96 * float(means.std(ddof=1)) / math.sqrt(n_batches)
    return est, half

"""Cost-to-goal estimators shared by the lattice domains.

Two estimators live here because they are domain-independent geometry:
shortest Dubins paths between planar poses (minimum turning radius, six
candidate word families) and an exact 2D distance table built by running
Dijkstra backwards from the goal cell over the free space of an occupancy
grid.
"""
from __future__ import annotations

import heapq
import math
from typing import Iterable, Optional

import numpy as np

TWO_PI = 2.0 * math.pi

DUBINS_WORDS = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")


def _mod2pi(theta: float) -> float:
    return theta % TWO_PI


def _lsl(alpha: float, beta: float, d: float):
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    p_sq = 2.0 + d * d - 2.0 * math.cos(alpha - beta) + 2.0 * d * (sa - sb)
    if p_sq < 0.0:
        return None
    tmp = math.atan2(cb - ca, d + sa - sb)
    return _mod2pi(tmp - alpha), math.sqrt(p_sq), _mod2pi(beta - tmp)


def _rsr(alpha: float, beta: float, d: float):
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    p_sq = 2.0 + d * d - 2.0 * math.cos(alpha - beta) + 2.0 * d * (sb - sa)
    if p_sq < 0.0:
        return None
    tmp = math.atan2(ca - cb, d - sa + sb)
    return _mod2pi(alpha - tmp), math.sqrt(p_sq), _mod2pi(tmp - beta)


def _lsr(alpha: float, beta: float, d: float):
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    p_sq = -2.0 + d * d + 2.0 * math.cos(alpha - beta) + 2.0 * d * (sa + sb)
    if p_sq < 0.0:
        return None
    p = math.sqrt(p_sq)
    tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
    return _mod2pi(tmp - alpha), p, _mod2pi(tmp - beta)


def _rsl(alpha: float, beta: float, d: float):
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    p_sq = -2.0 + d * d + 2.0 * math.cos(alpha - beta) - 2.0 * d * (sa + sb)
    if p_sq < 0.0:
        return None
    p = math.sqrt(p_sq)
    tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
    return _mod2pi(alpha - tmp), p, _mod2pi(beta - tmp)


def _rlr(alpha: float, beta: float, d: float):
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    tmp = (6.0 - d * d + 2.0 * math.cos(alpha - beta) + 2.0 * d * (sa - sb)) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = _mod2pi(TWO_PI - math.acos(tmp))
    t = _mod2pi(alpha - math.atan2(ca - cb, d - sa + sb) + p / 2.0)
    q = _mod2pi(alpha - beta - t + p)
    return t, p, q


def _lrl(alpha: float, beta: float, d: float):
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    tmp = (6.0 - d * d + 2.0 * math.cos(alpha - beta) + 2.0 * d * (sb - sa)) / 8.0
    if abs(tmp) > 1.0:
        return None
    p = _mod2pi(TWO_PI - math.acos(tmp))
    t = _mod2pi(-alpha + math.atan2(cb - ca, d + sa - sb) + p / 2.0)
    q = _mod2pi(beta - alpha - t + p)
    return t, p, q


_WORD_FNS = {
    "LSL": _lsl, "RSR": _rsr, "LSR": _lsr, "RSL": _rsl, "RLR": _rlr, "LRL": _lrl,
}


def dubins_candidates(start: tuple, goal: tuple, radius: float):
    """Yield (word, total_length, (t, p, q)) for every feasible word family.

    Poses are (x, y, heading) with heading in radians; segment params t/p/q
    are in radius-normalised units (arc segments in radians).
    """
    if radius <= 0.0:
        raise ValueError("turn radius must be positive")
    dx = goal[0] - start[0]
    dy = goal[1] - start[1]
    big_d = math.hypot(dx, dy)
    d = big_d / radius
    theta = math.atan2(dy, dx) if big_d > 0.0 else 0.0
    alpha = _mod2pi(start[2] - theta)
    beta = _mod2pi(goal[2] - theta)
    for word, fn in _WORD_FNS.items():
        res = fn(alpha, beta, d)
        if res is None:
            continue
        t, p, q = res
        yield word, (t + p + q) * radius, (t, p, q)


def dubins_distance(start: tuple, goal: tuple, radius: float) -> float:
    """Length in metres of the shortest Dubins path between two poses."""
    best = math.inf
    for _word, length, _params in dubins_candidates(start, goal, radius):
        if length < best:
            best = length
    if not math.isfinite(best):
        # every pose pair admits some word; non-finite means degenerate input
        raise ValueError(f"no Dubins word for {start!r} -> {goal!r}")
    return best


def dubins_sample(start: tuple, radius: float, word: str, params: tuple,
                  step: float = 0.05) -> list[tuple]:
    """Forward-integrate a word from ``start``; used for validation."""
    x, y, th = float(start[0]), float(start[1]), float(start[2])
    poses = [(x, y, th)]
    for seg, seg_len in zip(word, params):
        if seg == "S":
            length = seg_len * radius
            n = max(1, int(math.ceil(length / step)))
            for _ in range(n):
                x += (length / n) * math.cos(th)
                y += (length / n) * math.sin(th)
                poses.append((x, y, th))
        else:
            turn = 1.0 if seg == "L" else -1.0
            n = max(1, int(math.ceil(seg_len * radius / step)))
            dth = turn * seg_len / n
            for _ in range(n):
                # rotate about the current turn centre
                cx = x - turn * radius * math.sin(th)
                cy = y + turn * radius * math.cos(th)
                th += dth
                x = cx + turn * radius * math.sin(th)
                y = cy - turn * radius * math.cos(th)
                poses.append((x, y, th))
    return poses


# -- backward Dijkstra table --------------------------------------------------------

SQRT2 = math.sqrt(2.0)


def backward_dijkstra(free: np.ndarray, goal_cell: tuple,
                      cell_size: float = 1.0) -> np.ndarray:
    """Exact 8-connected shortest-path distances from every free cell to goal.

    ``free`` is a boolean [height, width] array. Distances are metric
    (axis = cell_size, diagonal = sqrt(2) * cell_size); a diagonal edge
    exists whenever both endpoint cells are free, so the table satisfies
    |table[c] - table[c']| <= edge length on every adjacent free pair.
    Unreached cells hold +inf. A blocked goal yields an all-inf table.
    """
    height, width = free.shape
    table = np.full((height, width), math.inf, dtype=np.float64)
    gx, gy = int(goal_cell[0]), int(goal_cell[1])
    if not (0 <= gx < width and 0 <= gy < height) or not free[gy, gx]:
        return table
    freeflat = free.ravel()
    dist = [math.inf] * (height * width)
    start = gy * width + gx
    dist[start] = 0.0
    heap = [(0.0, start)]
    axis = cell_size
    diag = SQRT2 * cell_size
    while heap:
        d, idx = heapq.heappop(heap)
        if d > dist[idx]:
            continue
        x = idx % width
        y = idx // width
        for dx, dy, w in ((1, 0, axis), (-1, 0, axis), (0, 1, axis), (0, -1, axis),
                          (1, 1, diag), (1, -1, diag), (-1, 1, diag), (-1, -1, diag)):
            nx = x + dx
            ny = y + dy
            if not (0 <= nx < width and 0 <= ny < height):
                continue
            nidx = ny * width + nx
            if not freeflat[nidx]:
                continue
            nd = d + w
            if nd < dist[nidx]:
                dist[nidx] = nd
                heapq.heappush(heap, (nd, nidx))
    table[:] = np.asarray(dist, dtype=np.float64).reshape(height, width)
    return table


def octile(a: tuple, b: tuple, cell_size: float = 1.0) -> float:
    """Closed-form 8-connected metric distance on an empty map."""
    dx = abs(a[0] - b[0])
    dy = abs(a[1] - b[1])
    lo, hi = (dx, dy) if dx < dy else (dy, dx)
    return cell_size * (SQRT2 * lo + (hi - lo))

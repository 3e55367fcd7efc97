"""Joint-space reference path: projection, phase lookup and banded tracking errors.

The reference gait is a closed curve in (hip, knee) joint space. Tracking is
spatial, not temporal: the controller only ever sees the distance between the
current pose and the nearest point of the curve, split into a dead band (no
assistance), a stimulation band and a hybrid band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

HIP = 0
KNEE = 1
JOINT_NAMES = ("hip", "knee")


class PathFormatError(ValueError):
    """Raised when a reference path (file or array) violates the format contract."""


@dataclass
class ReferencePath:
    """Discretised reference curve in joint space.

    points: (n, 2) array of (hip, knee) angles in radians.
    phase:  (n,) normalized cycle position of each sample, values in [0, 1).
            Strictly increasing along the point order; a closed path may wrap
            through 1.0 exactly once (rotated sample order).
    closed: gait paths are cyclic; open paths are supported for analytic tests.
    """

    points: np.ndarray
    phase: np.ndarray
    closed: bool = True

    # segment cache, built on construction
    _seg_start: np.ndarray = field(init=False, repr=False)
    _seg_delta: np.ndarray = field(init=False, repr=False)
    _seg_len2: np.ndarray = field(init=False, repr=False)
    _seg_phase0: np.ndarray = field(init=False, repr=False)
    _seg_span: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.phase = np.asarray(self.phase, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise PathFormatError("points must be an (n, 2) array")
        n = self.points.shape[0]
        if n < 3:
            raise PathFormatError("reference path needs at least 3 points")
        if self.phase.shape != (n,):
            raise PathFormatError("phase must have one entry per point")
        if np.any(self.phase < 0.0) or np.any(self.phase >= 1.0):
            raise PathFormatError("phase values must lie in [0, 1)")
        if np.any(np.all(np.diff(self.points, axis=0) == 0.0, axis=1)):
            raise PathFormatError("consecutive path points must be distinct")
        dphase = np.diff(self.phase)
        wraps = int(np.sum(dphase <= 0.0))
        if self.closed:
            if wraps > 1:
                raise PathFormatError("phase must increase along the path (one wrap allowed)")
        elif wraps > 0:
            raise PathFormatError("phase must be strictly increasing on an open path")

        starts = self.points if self.closed else self.points[:-1]
        ends = np.roll(self.points, -1, axis=0) if self.closed else self.points[1:]
        p0 = self.phase if self.closed else self.phase[:-1]
        p1 = np.roll(self.phase, -1) if self.closed else self.phase[1:]
        span = np.mod(p1 - p0, 1.0)
        if self.closed:
            # the wrap segment gets its true forward span, not 0
            span[span == 0.0] = 1.0 - 1e-12
        self._seg_start = starts
        self._seg_delta = ends - starts
        self._seg_len2 = np.einsum("ij,ij->i", self._seg_delta, self._seg_delta)
        self._seg_phase0 = p0
        self._seg_span = span

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def point_at_phase(self, phi: float) -> np.ndarray:
        """Interpolate the path point at a given normalized cycle position."""
        phi = float(phi) % 1.0
        # distance from each segment's start phase, going forward around the cycle
        ahead = np.mod(phi - self._seg_phase0, 1.0)
        inside = ahead <= self._seg_span
        if not np.any(inside):
            i = int(np.argmin(ahead - self._seg_span))
        else:
            i = int(np.flatnonzero(inside)[0])
        t = min(ahead[i] / self._seg_span[i], 1.0)
        return self._seg_start[i] + t * self._seg_delta[i]


@dataclass
class BandedError:
    """Tracking error of one pose against the path, before and after banding.

    All angles in radians. fes_error is the raw error soft-thresholded by the
    dead-band radius, exo_error by the (wider) stimulation-band radius, so
    |exo_error| <= |fes_error| <= |raw_error| componentwise.
    """

    reference_point: np.ndarray
    raw_error: np.ndarray
    fes_error: np.ndarray
    exo_error: np.ndarray
    phase: float


def soft_threshold(eps: np.ndarray | float, r: float) -> np.ndarray | float:
    """Shrink an error toward zero by r, clipping to zero inside the band.

    Odd in eps and nonincreasing in magnitude as r grows.
    """
    if r < 0.0:
        raise ValueError("band radius must be nonnegative")
    return np.sign(eps) * np.maximum(np.abs(eps) - r, 0.0)


def nearest_reference(
    path: ReferencePath,
    q_act: np.ndarray,
    prev_phase: float | None = None,
) -> tuple[np.ndarray, float]:
    """Project a pose onto the path and return (reference point, its phase).

    The reference point is the closest point of the piecewise-linear curve in
    Euclidean joint-space distance. Among segments at (numerically) equal
    distance, the winner is the one whose phase lies closest ahead of
    prev_phase, so the returned phase never jumps backward mid-cycle on
    symmetric paths.
    """
    q = np.asarray(q_act, dtype=float)
    rel = q[None, :] - path._seg_start
    t = np.einsum("ij,ij->i", rel, path._seg_delta) / path._seg_len2
    np.clip(t, 0.0, 1.0, out=t)
    proj = path._seg_start + t[:, None] * path._seg_delta
    d2 = np.einsum("ij,ij->i", proj - q[None, :], proj - q[None, :])

    d2min = float(np.min(d2))
    tie_tol = 1e-12 * max(d2min, 1.0) + 1e-300
    candidates = np.flatnonzero(d2 <= d2min + tie_tol)
    if candidates.size == 1 or prev_phase is None:
        i = int(candidates[0])
    else:
        cand_phase = np.mod(
            path._seg_phase0[candidates] + t[candidates] * path._seg_span[candidates], 1.0
        )
        ahead = np.mod(cand_phase - float(prev_phase), 1.0)
        i = int(candidates[int(np.argmin(ahead))])

    phi = float(np.mod(path._seg_phase0[i] + t[i] * path._seg_span[i], 1.0))
    return proj[i].copy(), phi


def banded_error(
    path: ReferencePath,
    q_act: np.ndarray,
    r_db: float,
    r_fesb: float,
    prev_phase: float | None = None,
) -> BandedError:
    """Project a pose and soft-threshold the error with both band radii."""
    if r_db < 0.0 or r_fesb < 0.0:
        raise ValueError("band radii must be nonnegative")
    q_ref, phi = nearest_reference(path, q_act, prev_phase)
    eps = q_ref - np.asarray(q_act, dtype=float)
    return BandedError(
        reference_point=q_ref,
        raw_error=eps,
        fes_error=soft_threshold(eps, r_db),
        exo_error=soft_threshold(eps, r_fesb),
        phase=phi,
    )


def load_path_file(file_path: str | Path) -> ReferencePath:
    """Read a reference path from CSV with columns phase, hip_deg, knee_deg.

    A header line is required and the phase column must be sorted ascending
    in [0, 1). Angles are converted to radians on load.
    """
    file_path = Path(file_path)
    with file_path.open() as fh:
        header = fh.readline().strip().lower().replace(" ", "")
        if header.split(",")[:3] != ["phase", "hip_deg", "knee_deg"]:
            raise PathFormatError(
                f"{file_path}: expected header 'phase,hip_deg,knee_deg', got {header!r}"
            )
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise PathFormatError(f"{file_path}: malformed numeric record ({exc})") from exc
    if data.shape[1] < 3:
        raise PathFormatError(f"{file_path}: each record needs phase, hip_deg, knee_deg")
    phase = data[:, 0]
    if np.any(np.diff(phase) <= 0.0):
        raise PathFormatError(f"{file_path}: phase column must be strictly ascending")
    points = np.deg2rad(data[:, 1:3])
    return ReferencePath(points=points, phase=phase, closed=True)


# Fourier coefficients (deg) of the built-in gait curve, fitted offline to
# textbook sagittal hip/knee landmarks. Layout: a0, then (cos_k, sin_k) pairs.
_HIP_FOURIER_DEG = (13.0198, 20.0667, -1.4604, -2.5295, -2.1111, -0.2030, 1.0906)
_KNEE_FOURIER_DEG = (21.7613, 0.0542, -20.0058, -14.4460, 5.5976, -0.4124, 5.7268, 0.0842, 0.0814)


def _fourier_series(coeffs, phi: np.ndarray) -> np.ndarray:
    y = np.full_like(phi, coeffs[0])
    for k in range(1, (len(coeffs) - 1) // 2 + 1):
        w = 2.0 * math.pi * k * phi
        y = y + coeffs[2 * k - 1] * np.cos(w) + coeffs[2 * k] * np.sin(w)
    return y


def default_gait_path(n_points: int = 200) -> ReferencePath:
    """Synthetic gait-like closed curve shipped as the default reference.

    Hip swings about -10..31 deg, knee shows the loading-response bump near
    12% of the cycle and the swing flexion peak (~62 deg) near 74%. Phase 0
    is heel strike.
    """
    phi = np.arange(n_points, dtype=float) / n_points
    hip_deg = _fourier_series(_HIP_FOURIER_DEG, phi)
    knee_deg = _fourier_series(_KNEE_FOURIER_DEG, phi)
    points = np.deg2rad(np.column_stack([hip_deg, knee_deg]))
    return ReferencePath(points=points, phase=phi, closed=True)


def write_path_file(path: ReferencePath, file_path: str | Path) -> None:
    """Write a reference path in the CSV format accepted by load_path_file."""
    file_path = Path(file_path)
    deg = np.rad2deg(path.points)
    with file_path.open("w") as fh:
        fh.write("phase,hip_deg,knee_deg\n")
        for phi, (h, k) in zip(path.phase, deg):
            fh.write(f"{phi:.9g},{h:.9g},{k:.9g}\n")

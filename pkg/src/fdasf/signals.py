"""Gaussian mixture-model signal generation with exact second-order statistics.

The network-wide signals follow

    y(t) = mixture_s(t) s(t) + n(t)
    v(t) = mixture_r(t) r(t) + y(t)          (optional reference channel)
    d(t) = s_1(t) + w(t)                     (optional target channel)

with i.i.d. zero-mean Gaussian sources/noise.  Sample streams are indexed by
absolute time: the value at time index ``t`` is a pure function of
``(stream seed, t)``, so overlapping windows agree exactly and any window can
be re-generated on demand.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

__all__ = [
    "RampProfile",
    "AdaptiveDrift",
    "SignalModel",
    "SampleBatch",
    "SecondOrderStats",
    "draw_model",
    "sample_batch",
    "exact_stats",
    "batch_stats",
    "mixture_at",
]


@dataclass(frozen=True)
class RampProfile:
    """Piecewise-linear drift profile, values clamped to [0, 1].

    Constant extrapolation applies outside the knot range.
    """

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.knots:
            raise ValueError("ramp needs at least one knot")
        ts = [t for t, _ in self.knots]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("ramp knot times must be strictly increasing")
        if any(not 0.0 <= v <= 1.0 for _, v in self.knots):
            raise ValueError("ramp values must lie in [0, 1]")

    def value(self, t) -> np.ndarray:
        ts = np.array([k[0] for k in self.knots], dtype=float)
        vs = np.array([k[1] for k in self.knots], dtype=float)
        return np.interp(np.asarray(t, dtype=float), ts, vs)


@dataclass(frozen=True)
class AdaptiveDrift:
    """Time-dependent perturbation of the mixture matrices."""

    delta_s: np.ndarray
    delta_r: np.ndarray | None
    ramp: RampProfile


@dataclass(frozen=True)
class SignalModel:
    mixture_s: np.ndarray
    mixture_r: np.ndarray | None
    source_var: float
    noise_var: float
    mixture_var: float
    target_noise_var: float | None = None
    drift: AdaptiveDrift | None = None

    def __post_init__(self) -> None:
        for name in ("source_var", "noise_var", "mixture_var"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.target_noise_var is not None and self.target_noise_var < 0.0:
            raise ValueError("target_noise_var must be nonnegative")
        if self.drift is not None:
            if self.drift.delta_s.shape != self.mixture_s.shape:
                raise ValueError("delta_s shape must match mixture_s")
            if (self.mixture_r is None) != (self.drift.delta_r is None):
                raise ValueError("delta_r must be present iff mixture_r is")

    @property
    def n_channels(self) -> int:
        return self.mixture_s.shape[0]

    @property
    def n_sources(self) -> int:
        return self.mixture_s.shape[1]

    @property
    def n_ref_sources(self) -> int:
        return 0 if self.mixture_r is None else self.mixture_r.shape[1]

    @property
    def has_reference(self) -> bool:
        return self.mixture_r is not None

    @property
    def has_target(self) -> bool:
        return self.target_noise_var is not None

    def to_json(self) -> str:
        def matrix(a):
            return None if a is None else {"shape": list(a.shape), "data": a.ravel().tolist()}

        doc = {
            "mixture_s": matrix(self.mixture_s),
            "mixture_r": matrix(self.mixture_r),
            "source_var": self.source_var,
            "noise_var": self.noise_var,
            "mixture_var": self.mixture_var,
            "target_noise_var": self.target_noise_var,
        }
        if self.drift is not None:
            doc["drift"] = {
                "delta_s": matrix(self.drift.delta_s),
                "delta_r": matrix(self.drift.delta_r),
                "ramp": [list(k) for k in self.drift.ramp.knots],
            }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "SignalModel":
        doc = json.loads(text)

        def matrix(obj):
            if obj is None:
                return None
            return np.array(obj["data"], dtype=float).reshape(obj["shape"])

        drift = None
        if "drift" in doc and doc["drift"] is not None:
            d = doc["drift"]
            drift = AdaptiveDrift(
                matrix(d["delta_s"]),
                matrix(d["delta_r"]),
                RampProfile(tuple((float(t), float(v)) for t, v in d["ramp"])),
            )
        return cls(
            matrix(doc["mixture_s"]),
            matrix(doc["mixture_r"]),
            float(doc["source_var"]),
            float(doc["noise_var"]),
            float(doc["mixture_var"]),
            None if doc["target_noise_var"] is None else float(doc["target_noise_var"]),
            drift,
        )


@dataclass(frozen=True)
class SampleBatch:
    """A window of ``n`` consecutive time samples of all network channels."""

    start: int
    y: np.ndarray
    v: np.ndarray | None
    d: np.ndarray | None
    channels: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.y.shape[1] != sum(self.channels):
            raise ValueError("column count of y must equal the summed channel counts")

    @property
    def n(self) -> int:
        return self.y.shape[0]

    def node_slice(self, node: int) -> slice:
        start = int(sum(self.channels[: node - 1]))
        return slice(start, start + self.channels[node - 1])


@dataclass(frozen=True)
class SecondOrderStats:
    """Covariances / cross-moments, either analytic or sample-averaged."""

    r_yy: np.ndarray
    r_vv: np.ndarray | None = None
    r_yd: np.ndarray | None = None
    r_dd: float | None = None

    def validate(self, tol: float = 1e-12) -> None:
        for mat, name in ((self.r_yy, "r_yy"), (self.r_vv, "r_vv")):
            if mat is None:
                continue
            scale = max(1.0, float(np.abs(mat).max()))
            if np.abs(mat - mat.T).max() > tol * scale:
                raise ValueError(f"{name} is not symmetric")
            if np.linalg.eigvalsh(mat)[0] <= 0.0:
                raise ValueError(f"{name} is not positive definite")


def draw_model(
    m: int,
    s: int,
    r: int,
    source_var: float,
    noise_var: float,
    mixture_var: float,
    seed: int,
    target_noise_var: float | None = None,
    drift_var: float | None = None,
    ramp: RampProfile | None = None,
) -> SignalModel:
    """Draw mixture matrices with i.i.d. N(0, mixture_var) entries.

    ``r = 0`` omits the reference signal v.  When ``drift_var`` is given the
    perturbation matrices are drawn with that variance and ``ramp`` controls
    the time profile.
    """
    if m < 1 or s < 1 or r < 0:
        raise ValueError("need m >= 1, s >= 1, r >= 0")
    rng = np.random.default_rng(seed)
    mixture_s = rng.normal(0.0, np.sqrt(mixture_var), size=(m, s))
    mixture_r = rng.normal(0.0, np.sqrt(mixture_var), size=(m, r)) if r else None
    drift = None
    if drift_var is not None:
        if ramp is None:
            raise ValueError("drift_var requires a ramp profile")
        delta_s = rng.normal(0.0, np.sqrt(drift_var), size=(m, s))
        delta_r = rng.normal(0.0, np.sqrt(drift_var), size=(m, r)) if r else None
        drift = AdaptiveDrift(delta_s, delta_r, ramp)
    return SignalModel(
        mixture_s, mixture_r, source_var, noise_var, mixture_var,
        target_noise_var, drift,
    )


def mixture_at(model: SignalModel, t) -> tuple[np.ndarray, np.ndarray | None]:
    """Mixture matrices at time ``t`` (convex drift ramp, else static)."""
    if model.drift is None:
        return model.mixture_s, model.mixture_r
    p = float(model.drift.ramp.value(t))
    mix_s = model.mixture_s + p * model.drift.delta_s
    mix_r = None
    if model.mixture_r is not None:
        mix_r = model.mixture_r + p * model.drift.delta_r
    return mix_s, mix_r


def _stream_stride(model: SignalModel) -> int:
    return model.n_sources + model.n_ref_sources + model.n_channels + (
        1 if model.has_target else 0
    )


def _stream_window(seed: int, t0: int, n: int, stride: int) -> np.ndarray:
    """Standard normals for time indices [t0, t0+n), one row per index.

    The counter-based generator is advanced in whole 4-output blocks, so the
    per-time stride is padded to a multiple of 4 to keep windows aligned.
    """
    padded = stride + (-stride % 4)
    bg = np.random.Philox(key=seed)
    bg.advance(t0 * padded // 4)
    raw = bg.random_raw(n * padded)
    u = (raw >> np.uint64(11)) * (2.0 ** -53)
    z = ndtri(np.maximum(u, 2.0 ** -54))
    return z.reshape(n, padded)[:, :stride]


def sample_batch(
    model: SignalModel,
    t0: int,
    n: int,
    seed: int,
    channels: tuple[int, ...] | None = None,
) -> SampleBatch:
    """Generate samples for time indices [t0, t0+n).

    ``channels`` sets the per-node slicing boundaries carried by the batch
    (default: one node owning every channel).
    """
    if n < 1:
        raise ValueError("window length must be >= 1")
    s_dim, r_dim, m = model.n_sources, model.n_ref_sources, model.n_channels
    z = _stream_window(seed, t0, n, _stream_stride(model))
    src = z[:, :s_dim] * np.sqrt(model.source_var)
    ref = z[:, s_dim : s_dim + r_dim] * np.sqrt(model.source_var)
    noise = z[:, s_dim + r_dim : s_dim + r_dim + m] * np.sqrt(model.noise_var)

    if model.drift is None:
        y = src @ model.mixture_s.T + noise
        v = ref @ model.mixture_r.T + y if model.has_reference else None
    else:
        p = model.drift.ramp.value(np.arange(t0, t0 + n))[:, None]
        y = src @ model.mixture_s.T + (p * src) @ model.drift.delta_s.T + noise
        v = None
        if model.has_reference:
            v = ref @ model.mixture_r.T + (p * ref) @ model.drift.delta_r.T + y

    d = None
    if model.has_target:
        w = z[:, -1:] * np.sqrt(model.target_noise_var)
        d = src[:, :1] + w
    if channels is None:
        channels = (m,)
    return SampleBatch(t0, y, v, d, tuple(channels))


def exact_stats(model: SignalModel, t: int = 0) -> SecondOrderStats:
    """Closed-form second-order moments of the mixture model at time ``t``."""
    mix_s, mix_r = mixture_at(model, t)
    m = model.n_channels
    r_yy = model.source_var * (mix_s @ mix_s.T) + model.noise_var * np.eye(m)
    r_vv = None
    if mix_r is not None:
        r_vv = r_yy + model.source_var * (mix_r @ mix_r.T)
    r_yd = None
    r_dd = None
    if model.has_target:
        r_yd = model.source_var * mix_s[:, :1]
        r_dd = model.source_var + model.target_noise_var
    stats = SecondOrderStats(r_yy, r_vv, r_yd, r_dd)
    stats.validate()
    return stats


def batch_stats(batch: SampleBatch) -> SecondOrderStats:
    """Sample-average second-order moments of a batch (no mean removal)."""
    n = batch.n
    r_yy = batch.y.T @ batch.y / n
    r_vv = batch.v.T @ batch.v / n if batch.v is not None else None
    r_yd = batch.y.T @ batch.d / n if batch.d is not None else None
    r_dd = float(batch.d[:, 0] @ batch.d[:, 0] / n) if batch.d is not None else None
    return SecondOrderStats(r_yy, r_vv, r_yd, r_dd)

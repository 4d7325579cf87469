"""Haar-random unitaries, seeded streams and Monte-Carlo integration over U(d)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .errors import McEvaluationError

MC_CHUNK = 100_000


class RngStream:
    """Seedable, splittable source of randomness.

    A stream is identified by its 64-bit ``seed`` and a key path of stream
    ids; two streams with the same identity produce identical draws.
    Children made with :meth:`spawn` are independent by construction of
    numpy's ``SeedSequence``.
    """

    def __init__(self, seed: int, stream_id: int = 0, *, parent: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if stream_id < 0:
            raise ValueError("stream_id must be nonnegative")
        self.seed = seed
        self.stream_id = int(stream_id)
        self.key = tuple(parent) + (self.stream_id,)
        seq = np.random.SeedSequence(seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def spawn(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id, parent=self.key)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, key={self.key})"


@dataclass(frozen=True)
class McEstimate:
    mean: complex
    stderr: float
    samples: int


def summarize(values) -> McEstimate:
    """Sample mean with the larger of the real/imaginary standard errors."""
    v = np.asarray(values, dtype=complex).ravel()
    n = v.size
    if n < 2:
        raise ValueError("need at least two samples")
    se_re = np.std(v.real, ddof=1) / np.sqrt(n)
    se_im = np.std(v.imag, ddof=1) / np.sqrt(n)
    mean = complex(np.mean(v))
    return McEstimate(mean=mean, stderr=float(max(se_re, se_im)), samples=n)


def sample_haar_batch(d: int, n: int, rng: RngStream) -> np.ndarray:
    """``n`` independent Haar unitaries of size ``d``, shape ``(n, d, d)``.

    Ginibre matrix, QR, then each column of Q multiplied by the phase of
    the matching diagonal entry of R.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    gen = rng.generator
    z = gen.standard_normal((n, d, d)) + 1j * gen.standard_normal((n, d, d))
    q, r = np.linalg.qr(z / np.sqrt(2.0))
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, None, :]


def sample_haar(d: int, rng: RngStream) -> np.ndarray:
    return sample_haar_batch(d, 1, rng)[0]


def mc_integrate(f, d: int, n: int, rng: RngStream, *, vectorized: bool = False) -> McEstimate:
    """Monte-Carlo estimate of the Haar integral of ``f`` over U(d).

    With ``vectorized=True`` ``f`` receives a stack ``(k, d, d)`` and must
    return ``k`` values; otherwise it is called once per sample.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    values = np.empty(n, dtype=complex)
    done = 0
    while done < n:
        k = min(MC_CHUNK, n - done)
        gs = sample_haar_batch(d, k, rng)
        if vectorized:
            values[done:done + k] = np.asarray(f(gs), dtype=complex).reshape(k)
        else:
            for j in range(k):
                try:
                    values[done + j] = f(gs[j])
                except Exception as exc:
                    raise McEvaluationError(
                        f"integrand failed on sample {done + j} of {rng!r}: {exc}",
                        sample_index=done + j, seed=rng.seed, stream_key=rng.key,
                    ) from exc
        done += k
    return summarize(values)


def moment_G_exact(alpha: int, d: int) -> Fraction:
    """Exact value of the Haar integral of ``|g_11|^(2 alpha)`` over U(d)."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if d < 1:
        raise ValueError("d must be at least 1")
    return Fraction(factorial(alpha) * factorial(d - 1), factorial(alpha + d - 1))


def moment_G(alpha: int, d: int) -> float:
    # |g_11|^2 is Beta(1, d-1) distributed under the Haar measure.
    return float(moment_G_exact(alpha, d))

"""Two-port ABCD network engine: elements, cascading, S11 and swept traces.

Matrices carry scalar or array entries; every element evaluates over a whole
frequency vector at once, so a sweep is a handful of broadcast products.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

CSV_HEADER = ("freq_hz", "s11_re", "s11_im", "s11_db", "vswr")

# |gamma| above this is reported as an infinite VSWR
VSWR_CLIP = 1.0 - 1e-12
PASSIVITY_SLACK = 1e-9


class SingularNetworkError(ArithmeticError):
    pass


class PassivityError(ArithmeticError):
    """A sweep produced |S11| > 1; the network model is broken."""


@dataclass(frozen=True)
class AbcdMatrix:
    """Transmission matrix ``[[a, b], [c, d]]``; b in ohm, c in siemens."""

    a: complex | np.ndarray
    b: complex | np.ndarray
    c: complex | np.ndarray
    d: complex | np.ndarray

    @classmethod
    def identity(cls, n: int | None = None) -> AbcdMatrix:
        if n is None:
            return cls(1 + 0j, 0j, 0j, 1 + 0j)
        one, zero = np.ones(n, complex), np.zeros(n, complex)
        return cls(one, zero, zero.copy(), one.copy())

    def __matmul__(self, other: AbcdMatrix) -> AbcdMatrix:
        return AbcdMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def det(self):
        return self.a * self.d - self.b * self.c

    def to_array(self) -> np.ndarray:
        """Entries stacked as ``(..., 2, 2)``."""
        a, b, c, d = np.broadcast_arrays(self.a, self.b, self.c, self.d)
        return np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)


def abcd_uniform_line(z0: float, theta) -> AbcdMatrix:
    """Lossless line of impedance ``z0`` and electrical length ``theta`` (rad)."""
    if not z0 > 0:
        raise ValueError(f"line impedance must be > 0, got {z0}")
    cos, sin = np.cos(theta), np.sin(theta)
    return AbcdMatrix(cos + 0j, 1j * z0 * sin, 1j * sin / z0, cos + 0j)


def abcd_shunt(admittance) -> AbcdMatrix:
    y = np.asarray(admittance, complex)
    one = np.ones_like(y)
    return AbcdMatrix(one, np.zeros_like(y), y, one.copy())


def cascade(matrices: Sequence[AbcdMatrix]) -> AbcdMatrix:
    """Product of ``matrices`` taken left to right, source side first."""
    if len(matrices) == 0:
        raise ValueError("cannot cascade an empty list")
    out = matrices[0]
    for m in matrices[1:]:
        out = out @ m
    return out


# -- network elements ----------------------------------------------------------

@dataclass(frozen=True)
class UniformLine:
    z0: float
    length_mm: float
    phase_velocity: float  # m/s

    def __post_init__(self):
        if not (self.z0 > 0 and self.length_mm > 0 and self.phase_velocity > 0):
            raise ValueError(f"UniformLine parameters must be positive: {self}")

    def electrical_length(self, freqs) -> np.ndarray:
        return 2 * np.pi * np.asarray(freqs, float) * self.length_mm * 1e-3 / self.phase_velocity

    def abcd(self, freqs) -> AbcdMatrix:
        return abcd_uniform_line(self.z0, self.electrical_length(freqs))


@dataclass(frozen=True)
class ShuntSeriesRLC:
    """Series R-L-C branch connected across the line.

    ``r`` may be zero (lossless branch); ``l`` and ``c`` must be positive.
    """

    r: float
    l: float
    c: float

    def __post_init__(self):
        if not (self.r >= 0 and self.l > 0 and self.c > 0):
            raise ValueError(f"ShuntSeriesRLC needs r >= 0, l > 0, c > 0: {self}")

    @property
    def resonant_frequency(self) -> float:
        return 1.0 / (2 * math.pi * math.sqrt(self.l * self.c))

    def reactance(self, freqs):
        w = 2 * np.pi * np.asarray(freqs, float)
        return w * self.l - 1.0 / (w * self.c)

    def impedance(self, freqs):
        return self.r + 1j * self.reactance(freqs)

    def abcd(self, freqs) -> AbcdMatrix:
        z = np.asarray(self.impedance(freqs), complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            y = np.where(z == 0, np.inf + 0j, 1.0 / np.where(z == 0, 1, z))
        return abcd_shunt(y)


@dataclass(frozen=True)
class Cascade:
    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise ValueError("Cascade needs at least one element")

    def abcd(self, freqs) -> AbcdMatrix:
        return cascade([e.abcd(freqs) for e in self.elements])


NetworkElement = Union[UniformLine, ShuntSeriesRLC, Cascade]


# -- reflection ----------------------------------------------------------------

def s11_from_abcd(m: AbcdMatrix, z_ref: float, z_load: float):
    """Input reflection of ``m`` terminated in ``z_load``, referenced to ``z_ref``.

    ``z_load = math.inf`` models an open circuit.
    """
    if not z_ref > 0:
        raise ValueError(f"z_ref must be > 0, got {z_ref}")
    if not z_load > 0:
        raise ValueError(f"z_load must be > 0, got {z_load}")
    a, b, c, d = (np.asarray(x, complex) for x in (m.a, m.b, m.c, m.d))
    if math.isinf(z_load):
        num, den = a, c
    else:
        num, den = a * z_load + b, c * z_load + d
        if np.any(np.abs(den) < 1e-15):
            raise SingularNetworkError("input impedance undefined: c*z_load + d = 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        zin = num / den
        gamma = np.where(np.isinf(zin) | (np.abs(den) == 0), 1.0 + 0j, (zin - z_ref) / (zin + z_ref))
    return gamma[()] if gamma.ndim == 0 else gamma


def vswr_from_magnitude(mag):
    mag = np.asarray(mag, float)
    with np.errstate(divide="ignore"):
        return np.where(mag > VSWR_CLIP, np.inf, (1 + mag) / (1 - np.minimum(mag, VSWR_CLIP)))


@dataclass(frozen=True, eq=False)
class S11Trace:
    """Swept input reflection; frequencies strictly increasing."""

    freq_hz: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freq_hz, float)
        g = np.asarray(self.gamma, complex)
        if f.ndim != 1 or f.shape != g.shape:
            raise ValueError("freq_hz and gamma must be 1-D arrays of equal length")
        if f.size and (np.any(np.diff(f) <= 0) or f[0] <= 0):
            raise ValueError("frequencies must be positive and strictly increasing")
        object.__setattr__(self, "freq_hz", f)
        object.__setattr__(self, "gamma", g)

    def __len__(self):
        return self.freq_hz.size

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.gamma)

    @property
    def magnitude_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 20 * np.log10(self.magnitude)

    @property
    def vswr(self) -> np.ndarray:
        return vswr_from_magnitude(self.magnitude)

    @property
    def samples(self) -> Iterator[tuple[float, complex, float, float]]:
        for row in zip(self.freq_hz, self.gamma, self.magnitude_db, self.vswr):
            yield float(row[0]), complex(row[1]), float(row[2]), float(row[3])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for f, g, db, vswr in self.samples:
            w.writerow([repr(f), repr(g.real), repr(g.imag), repr(db), repr(vswr)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> S11Trace:
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != CSV_HEADER:
            raise ValueError(f"expected header {','.join(CSV_HEADER)}")
        data = np.array([[float(x) for x in r[:3]] for r in rows[1:]], float).reshape(-1, 3)
        return cls(data[:, 0], data[:, 1] + 1j * data[:, 2])


def sweep(network: NetworkElement, z_ref: float, z_load: float, freqs, workers: int = 1) -> S11Trace:
    """Evaluate S11 of ``network`` over ``freqs`` (Hz, strictly increasing).

    With ``workers > 1`` the grid is split into contiguous chunks evaluated on
    a thread pool; each point sees identical arithmetic so the result does not
    depend on the split.
    """
    f = np.asarray(freqs, float)
    if f.ndim != 1 or f.size == 0:
        raise ValueError("freqs must be a non-empty 1-D sequence")
    if np.any(np.diff(f) <= 0):
        raise ValueError("freqs must be strictly increasing")

    def run(chunk):
        return np.atleast_1d(s11_from_abcd(network.abcd(chunk), z_ref, z_load))

    if workers > 1 and f.size > 1:
        chunks = np.array_split(f, min(workers, f.size))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            gamma = np.concatenate(list(pool.map(run, chunks)))
    else:
        gamma = run(f)
    worst = float(np.max(np.abs(gamma)))
    if worst > 1 + PASSIVITY_SLACK:
        raise PassivityError(f"|S11| = {worst!r} exceeds 1")
    return S11Trace(f, gamma)


def frequency_grid(start_hz: float, stop_hz: float, step_hz: float) -> np.ndarray:
    """Inclusive uniform grid; the point count is rounded, not truncated."""
    if not (0 < start_hz < stop_hz and step_hz > 0):
        raise ValueError("need 0 < start < stop and step > 0")
    n = int(round((stop_hz - start_hz) / step_hz)) + 1
    return np.linspace(start_hz, stop_hz, n)

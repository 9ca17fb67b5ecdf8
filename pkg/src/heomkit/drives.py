"""
Pulse-train coefficient functions for dynamical decoupling.

A train of ``n_pulses`` rectangular pi pulses of width ``tau`` and
amplitude ``v`` (with ``v * tau = pi/2``) is placed either with equal gaps
``gap`` between consecutive pulses,

    pulse n: [n gap + (n-1) tau, n gap + n tau],

or at squared-sinusoidal fractions of the total window (the Uhrig
schedule),

    pulse n starts at sin^2(pi n / (2 n_p + 2)) (t_max - n_p tau) + (n-1) tau.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["PulseTrain", "pulse_windows", "drive_coefficient"]

PI_PULSE_AREA = np.pi / 2.0


@dataclass(frozen=True)
class PulseTrain:
    """Rectangular pi-pulse schedule; construct via :meth:`equal` or :meth:`udd`."""

    n_pulses: int
    tau: float
    amplitude: float
    spacing: str
    windows: tuple

    @staticmethod
    def _amplitude_for(tau, amplitude):
        if tau <= 0:
            raise ValueError("pulse width must be positive")
        if amplitude is None:
            amplitude = PI_PULSE_AREA / tau
        if abs(amplitude * tau - PI_PULSE_AREA) > 1e-12:
            raise ValueError(
                f"pulse area amplitude*tau = {amplitude * tau!r} must equal pi/2"
            )
        return amplitude

    @classmethod
    def equal(cls, n_pulses, tau, gap, amplitude=None):
        """Equally spaced train with gap ``gap`` between pulse edges."""
        amplitude = cls._amplitude_for(tau, amplitude)
        if n_pulses < 0:
            raise ValueError("n_pulses must be non-negative")
        if n_pulses > 0 and gap <= 0:
            raise ValueError("gap between pulses must be positive")
        windows = tuple(
            (n * gap + (n - 1) * tau, n * gap + n * tau)
            for n in range(1, n_pulses + 1)
        )
        return cls(n_pulses, tau, amplitude, "equal", windows)

    @classmethod
    def udd(cls, n_pulses, tau, t_max, amplitude=None):
        """Uhrig-spaced train inside the window ``[0, t_max]``."""
        amplitude = cls._amplitude_for(tau, amplitude)
        if n_pulses < 0:
            raise ValueError("n_pulses must be non-negative")
        stretch = t_max - n_pulses * tau
        if n_pulses > 0 and stretch <= 0:
            raise ValueError(
                f"{n_pulses} pulses of width {tau} overlap inside t_max={t_max}"
            )
        windows = []
        for n in range(1, n_pulses + 1):
            start = np.sin(np.pi * n / (2 * n_pulses + 2)) ** 2 * stretch + (n - 1) * tau
            windows.append((start, start + tau))
        for (_, end), (start, _) in zip(windows, windows[1:]):
            if start < end:
                raise ValueError("UDD pulse windows overlap; reduce the pulse width")
        return cls(n_pulses, tau, amplitude, "udd", tuple(windows))

    def coefficient(self, t):
        """Drive amplitude at time ``t`` (``amplitude`` inside a pulse, else 0)."""
        starts = [w[0] for w in self.windows]
        import bisect

        i = bisect.bisect_right(starts, t) - 1
        if i >= 0 and t <= self.windows[i][1]:
            return self.amplitude
        return 0.0

    @property
    def end(self):
        """End of the last pulse (0 for an empty train)."""
        return self.windows[-1][1] if self.windows else 0.0

    def edges(self, t_max):
        """Sorted pulse edges inside ``[0, t_max]``, for piecewise integration."""
        out = [0.0]
        for a, b in self.windows:
            if a < t_max:
                out.append(a)
            if b < t_max:
                out.append(b)
        out.append(t_max)
        return sorted(set(out))


def pulse_windows(train):
    """The train's ``(start, end)`` windows, ascending and disjoint."""
    return list(train.windows)


def drive_coefficient(train, t):
    """Amplitude of the train at time ``t``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return train.coefficient(t)

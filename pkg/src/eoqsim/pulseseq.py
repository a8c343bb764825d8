"""Pulse sequences: ordered exchange pulses addressed by axis label."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .lattice import GridSpec
from .statevec import FieldSpec, PureState, apply_exchange, evolve_segment


@dataclass(frozen=True)
class Pulse:
    axis_label: str
    theta: float
    t_pulse_s: Optional[float] = None
    t_idle_s: Optional[float] = None


@dataclass(frozen=True)
class PulseSeq:
    pulses: tuple[Pulse, ...]

    def __len__(self) -> int:
        return len(self.pulses)

    def __iter__(self):
        return iter(self.pulses)

    def reversed(self) -> "PulseSeq":
        # Pulses here are their own inverse up to phase only for theta = pi;
        # generally the reverse uses angle 2*pi - theta.
        return PulseSeq(
            tuple(
                Pulse(p.axis_label, (2 * np.pi - p.theta) % (2 * np.pi), p.t_pulse_s, p.t_idle_s)
                for p in reversed(self.pulses)
            )
        )

    @staticmethod
    def of(pulses: Iterable[Pulse]) -> "PulseSeq":
        return PulseSeq(tuple(pulses))


def execute_pulse_seq(
    state: PureState,
    grid: GridSpec,
    seq: PulseSeq,
    fields: Optional[FieldSpec] = None,
    *,
    in_place: bool = False,
) -> PureState:
    """Apply a pulse sequence to a register state.

    Pulses without timing are applied as ideal exchange rotations. Timed
    pulses evolve under the calibrated J = theta/(2*pi*t_pulse) together
    with the Zeeman fields, followed by an idle of t_idle when set.
    """
    out = state if in_place else state.copy()
    for p in seq:
        ax = grid.axis_by_label(p.axis_label)
        if not grid.axis_is_live(ax):
            raise ValueError(f"axis {p.axis_label} is dead")
        pair = (grid.dot_index(ax.a), grid.dot_index(ax.b))
        if p.t_pulse_s is None:
            apply_exchange(out, pair, p.theta, in_place=True)
        else:
            j_hz = p.theta / (2 * np.pi * p.t_pulse_s)
            evolve_segment(
                out, (pair, j_hz, p.axis_label), p.t_pulse_s, fields, in_place=True
            )
        if p.t_idle_s:
            evolve_segment(out, None, p.t_idle_s, fields, in_place=True)
    return out

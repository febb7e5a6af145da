from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable, Sequence


@dataclass(frozen=True)
class PathClass:
    """Basis element (p, q, [gamma]) of the homotopy path algebra.

    ``cls`` is the deck-translation vector on the torus and ``None`` on the
    sphere, where every class of paths between two points is trivial.
    """

    start: Hashable
    end: Hashable
    cls: Any = None

    def __repr__(self):
        tag = "" if self.cls is None else f", {self.cls}"
        return f"PathClass({self.start} -> {self.end}{tag})"


@dataclass(frozen=True)
class PiecewisePath:
    """A concatenation of geodesic segments, consumed only through its class."""

    segments: tuple[PathClass, ...]

    def __init__(self, segments: Sequence[PathClass]):
        if not segments:
            raise ValueError("a piecewise path needs at least one segment")
        object.__setattr__(self, "segments", tuple(segments))

    @property
    def start(self):
        return self.segments[0].start

    @property
    def end(self):
        return self.segments[-1].end


@dataclass(frozen=True)
class TwoForm:
    """``scale`` times the Riemannian area form of ``backend``."""

    backend: Any
    scale: float = 1.0

    @property
    def modulus(self) -> float:
        return self.backend.form_modulus(self.scale)

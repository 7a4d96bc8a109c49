"""Word-level agreement between the modular flow, the geometric model and the template knot."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

from ..model import ModelError, ModelParams, itinerary as model_itinerary, periodic_orbit_from_word
from ..modular import CrossSection, ModularError, Representation, orbit_steps, seed_periodic
from .alexander import alexander_from_braid, alexander_from_diagram
from .braids import genus_positive_braid, lorenz_braid
from .diagram import braid_closure_diagram
from .words import LorenzWord, word_to_matrix


@dataclass
class KnotCertificate:
    strands: int
    braid: list
    genus: int
    alexander: list
    alexander_diagram: list
    seifert_genus: int

    @property
    def consistent(self) -> bool:
        return self.alexander == self.alexander_diagram and self.genus == self.seifert_genus


@dataclass
class GhysReport:
    word: str
    trace: int
    seed_rotation: Optional[str] = None
    modular_itinerary: Optional[str] = None
    model_itinerary: Optional[str] = None
    return_time: Optional[float] = None
    geodesic_length: Optional[float] = None
    knot: Optional[KnotCertificate] = None
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d


def knot_certificate(w) -> KnotCertificate:
    b = lorenz_braid(w)
    d = braid_closure_diagram(b)
    return KnotCertificate(b.n, list(b.word), genus_positive_braid(b),
                           alexander_from_braid(b).to_list(),
                           alexander_from_diagram(d).to_list(),
                           d.seifert_genus() if len(d) else 0)


def ghys_word_check(w, rep: Representation, section: CrossSection,
                    model: ModelParams = ModelParams(r=0.1), length_tol: float = 1e-8) -> GhysReport:
    """Seed the periodic geodesic of w, read its itinerary, compare with the model orbit
    of w and attach the template-knot certificate.  Mismatches are listed in
    ``failures`` rather than raised."""
    w = w if isinstance(w, LorenzWord) else LorenzWord(w)
    if not (w.primitive and w.mixed):
        raise ValueError(f"{w} must be primitive and contain both letters")
    if rep.l <= 0:
        raise ModularError("the word check needs a funnel (l > 0)")
    if model.r <= 0:
        raise ModelError("the model orbit of an arbitrary word needs r > 0")
    report = GhysReport(str(w), int(round(word_to_matrix(w).trace())))
    try:
        seed = seed_periodic(rep, section, w.symbols)
        steps = orbit_steps(rep, section, seed.point, len(w))
        report.seed_rotation = seed.word
        report.modular_itinerary = "".join(s.letter for s in steps)
        report.return_time = float(sum(s.time for s in steps))
        report.geodesic_length = float(seed.length)
        if not w.cyclic_equal(report.modular_itinerary):
            report.failures.append(f"modular itinerary {report.modular_itinerary} != {w} cyclically")
        if abs(report.return_time - report.geodesic_length) > length_tol:
            report.failures.append("return time differs from the closed geodesic length")
    except ModularError as exc:
        report.failures.append(f"modular: {exc}")

    pt = periodic_orbit_from_word(w.symbols, model)
    report.model_itinerary = model_itinerary(pt, model, len(w))
    if not w.cyclic_equal(report.model_itinerary):
        report.failures.append(f"model itinerary {report.model_itinerary} != {w} cyclically")

    report.knot = knot_certificate(w)
    if not report.knot.consistent:
        report.failures.append("braid and diagram invariants disagree")
    return report

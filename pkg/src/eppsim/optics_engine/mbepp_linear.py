"""Linear-optics measurement-based round: two noisy SPDC copies, two heralded
three-photon resources, four BS+PBS Bell analyzers, twelve-mode coincidence.
"""

from __future__ import annotations

from .._numeric import coerce
from .elements import bs, pbs
from .protocol import OutputRule, ProtocolSpec
from .rules import Pattern
from .sources import SourceSpec


def bell_analyzer(x: str, y: str, tag: str) -> tuple:
    """BS then an H/V PBS on each port; detectors D_H<tag>a, D_V<tag>a, D_H<tag>b, D_V<tag>b."""
    o1, o2 = f"bs{tag}a", f"bs{tag}b"
    return (bs(x, y, o1, o2),
            pbs(o1, None, f"DH{tag}a", f"DV{tag}a"),
            pbs(o2, None, f"DH{tag}b", f"DV{tag}b"))


def mbepp_linear(F=0.85, p=0.1, branch: str = "postselected") -> ProtocolSpec:
    """Twelve-mode case: psi+ signature (D_H, D_V on the same BS port) on every
    analyzer, one photon in each output mode g5, h5. The heralds of the two
    resources are already folded into the resource state.

    ``branch="postselected"``: single-pair noisy copies and GHZ resources only.
    ``branch="full"``: SPDC copies up to double pairs and every resource term,
    restricted to the ten-photon sector. Double-pair copies then pass the
    pattern together with the H5H1V1 / V5H4V4 resource terms at the same
    order in p. The full case is slow (minutes) in float arithmetic and far
    slower with exact parameters, so the defaults are floats.
    """
    F = coerce(F)
    if branch == "postselected":
        copies = (SourceSpec("pair", ("a1", "b1"), {"state": "phi+", "bitflip": 1 - F}, "copy1"),
                  SourceSpec("pair", ("a2", "b2"), {"state": "phi+", "bitflip": 1 - F}, "copy2"))
        terms = "ghz"
    elif branch == "full":
        copies = (SourceSpec("spdc", ("a1", "b1"), {"p": p, "state": "phi+", "bitflip": 1 - F}, "copy1"),
                  SourceSpec("spdc", ("a2", "b2"), {"p": p, "state": "phi+", "bitflip": 1 - F}, "copy2"))
        terms = "all"
    else:
        raise ValueError("branch must be 'postselected' or 'full'")
    srcs = copies + (SourceSpec("heralded_ghz", ("g1", "g4", "g5"), {"p": p, "terms": terms}, "res_g"),
                     SourceSpec("heralded_ghz", ("h1", "h4", "h5"), {"p": p, "terms": terms}, "res_h"))
    circuit = (bell_analyzer("g1", "a1", "1") + bell_analyzer("g4", "a2", "3")
               + bell_analyzer("h1", "b1", "5") + bell_analyzer("h4", "b2", "7"))
    counts = {f"D{pol}{t}a": 1 for t in "1357" for pol in "HV"}
    counts.update({"g5": 1, "h5": 1})
    out = OutputRule(Pattern(counts), ("g5", "h5"), label="twelve-mode")
    return ProtocolSpec("mbepp_linear", srcs, circuit, (out,), truncation=10, photon_number=10,
                        group_truncation={"copy1": 4, "copy2": 4, "res_g": 3, "res_h": 3},
                        description="measurement-based round with SPDC copies and heralded resources")

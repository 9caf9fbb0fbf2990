from dataclasses import asdict, dataclass


@dataclass
class Stats:
    """Work counters; passed explicitly, never global."""

    evaluations: int = 0
    refinement_iterations: int = 0
    max_precision_bits: int = 0

    def to_json(self) -> dict:
        d = asdict(self)
        d["iterations"] = d.pop("refinement_iterations")
        return d

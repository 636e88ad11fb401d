"""Named model domains with their curves and contact orders."""
from dataclasses import dataclass
from typing import Dict, List


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    domain: str
    curve: str
    eta: int
    description: str = ''

    def to_dict(self) -> Dict:
        return {'name': self.name, 'domain': self.domain, 'curve': self.curve, 'eta': self.eta,
                'description': self.description}


def _e1(k: int) -> CorpusEntry:
    return CorpusEntry(f"e1_k{k}", f"Re(z3) + abs2(z2) + abs2(z1)^{k}", 't, 0, 0', 2 * k,
                       f"|z1|^{2 * k} model, one-segment diagram")


CORPUS: Dict[str, CorpusEntry] = {entry.name: entry for entry in [
    CorpusEntry('half_space', 'Re(z3)', 't, 0, 0', 4, 'no mixed term up to eta: Krantz branch'),
    _e1(1),
    _e1(2),
    _e1(3),
    CorpusEntry('e2', 'Re(z3) + abs2(z1)^2*abs2(z2) + abs2(z2)^3 + abs2(z1)^5', 't, 0, 0', 10,
                'two-segment diagram with vertices (10,0), (4,2), (0,6)'),
    CorpusEntry('kohn_nirenberg', 'Re(z3) + abs2(z1)^4 + (15/7)*abs2(z1)*Re(z1^6) + abs2(z2)', 't, 0, 0', 8,
                'pseudoconvex model without a local holomorphic support function'),
    CorpusEntry('parabola', 'Re(z3) + abs2(z2)', 't, t^2, 0', 4,
                'curve absorbed into z2; collinear diagram points'),
]}


def get_entry(name: str) -> CorpusEntry:
    try:
        return CORPUS[name]
    except KeyError:
        raise KeyError(f"Unknown corpus entry {name!r}; available: {', '.join(CORPUS)}")


def names() -> List[str]:
    return list(CORPUS)

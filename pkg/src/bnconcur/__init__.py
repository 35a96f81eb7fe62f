"""Boolean networks, read Petri nets and their concurrent semantics."""

__version__ = "0.1.0"

from .bn import BooleanNetwork, parse_bn, load_bn  # noqa: E402
from .rpn import ReadPetriNet, load_net  # noqa: E402

__all__ = ["BooleanNetwork", "ReadPetriNet", "parse_bn", "load_bn", "load_net", "__version__"]

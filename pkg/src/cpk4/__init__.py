"""4-colouring disjoint cycles with glued K4's by removing an independent transversal and 3-colouring the rest."""

__version__ = "0.1.0"

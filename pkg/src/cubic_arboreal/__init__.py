"""Automorphism groups of the ternary rooted tree attached to f(z) = -2z^3 + 3z^2.

Subpackages cover: exact portrait arithmetic on the tree (`tree_core`), the
parity-balanced subgroup chain and its sampling/enumeration (`en_groups`),
exact and asymptotic leaf-fixing counts (`fix_counting`), exact rational
polynomial arithmetic and local criteria (`poly_rational`), mod-p polynomial
machinery (`modp`), prime-scan experiments (`experiments`), and a CLI (`cli`).
"""

__version__ = "1.0.0"

"""Div least-squares finite element solver with supercloseness studies."""

try:
    from ._lsfem import (  # noqa: F401
        Mesh,
        expected_rates,
        load_mesh,
        solve,
        structured_mesh,
        study,
    )
except ImportError:  # build-tree layout: extension module next to the package
    from _lsfem import (  # noqa: F401
        Mesh,
        expected_rates,
        load_mesh,
        solve,
        structured_mesh,
        study,
    )

__all__ = [
    "Mesh",
    "expected_rates",
    "load_mesh",
    "solve",
    "structured_mesh",
    "study",
]

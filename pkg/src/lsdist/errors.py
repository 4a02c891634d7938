"""Exception and warning types shared across the package."""


class InputFormatError(ValueError):
    """Malformed input file (point-cloud CSV, PGM image, labels file)."""


class DegeneracyWarning(UserWarning):
    """A numerical degeneracy was detected and handled with a fallback
    (epsilon floor, ridge term, zero bandwidth).  Promoted to an error in
    strict mode."""

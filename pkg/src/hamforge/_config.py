import os

# Dimension at or below which eigen_low always diagonalizes densely.
DENSE_SWITCHOVER = 2 ** 10

# Coefficients below this magnitude are dropped after merging.
MERGE_TOL = 1e-14

DEGENERACY_TOL = 1e-9
ZERO_TOL = 1e-9


def dense_limit():
    """Largest matrix dimension that dense-only routines accept.

    Reads ``HAMFORGE_DENSE_LIMIT`` on every call so tests and the CLI can
    override it per process.
    """
    raw = os.environ.get("HAMFORGE_DENSE_LIMIT")
    if raw is None:
        return 2 ** 12
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"HAMFORGE_DENSE_LIMIT must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError("HAMFORGE_DENSE_LIMIT must be positive")
    return value


class DenseLimitError(ValueError):
    """Raised when a dense-only computation exceeds the configured size cap."""


def check_dense(dim, what="operation"):
    limit = dense_limit()
    if dim > limit:
        raise DenseLimitError(
            f"{what} needs a dense matrix of dimension {dim}, above the cap {limit} "
            "(set HAMFORGE_DENSE_LIMIT to override)"
        )

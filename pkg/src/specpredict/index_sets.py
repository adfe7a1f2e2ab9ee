"""Prediction geometries: which lags of the sequence are observed.

Families on the integers (the value at lag 0 is always the prediction
target, so 0 is never a member):

    all-but-zero      every lag except 0
    gap:n             everything except 0..n
    past              all negative lags
    nakazi:n          the past plus the next n future lags 1..n
    future-one:n      the past plus the single future lag n
    missing-past:n    the past with lag -n removed
    window:[...]      an explicit finite lag list
    cyclic:N:[...]    a subset of the cyclic group with N points

Each family knows its window truncation and, where the duality engine may
use it, the complement of its 0-augmented version.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

_FAMILIES = (
    "all-but-zero",
    "gap",
    "past",
    "nakazi",
    "future-one",
    "missing-past",
    "window",
    "cyclic",
)

_PARAMETRIC = {"gap", "nakazi", "future-one", "missing-past"}


@dataclass(frozen=True)
class IndexSetSpec:
    family: str
    n: int | None = None
    lags: tuple[int, ...] | None = None
    n_points: int | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ParseError(f"unknown index-set family {self.family!r}")
        if self.family in _PARAMETRIC:
            low = 0 if self.family == "nakazi" else 1
            if self.n is None or self.n < low:
                raise ParseError(f"family {self.family!r} needs an order n >= {low}")
        if self.family == "window":
            if not self.lags:
                raise ParseError("a window set needs at least one lag")
            if 0 in self.lags:
                raise ParseError("lag 0 is the prediction target and cannot be observed")
            object.__setattr__(self, "lags", tuple(sorted(set(self.lags))))
        if self.family == "cyclic":
            if not self.n_points or self.n_points < 2:
                raise ParseError("a cyclic set needs the group order N >= 2")
            if not self.lags:
                raise ParseError("a cyclic set needs at least one lag")
            reduced = sorted({k % self.n_points for k in self.lags})
            if 0 in reduced:
                raise ParseError("lag 0 is the prediction target and cannot be observed")
            object.__setattr__(self, "lags", tuple(reduced))

    # -- membership on the integers -----------------------------------------

    def truncate(self, window: int) -> list[int]:
        """Observed lags inside [-window, window]."""
        k = int(window)
        if k < 1:
            raise ParseError("window must be a positive integer")
        if self.family == "all-but-zero":
            return [l for l in range(-k, k + 1) if l != 0]
        if self.family == "gap":
            return list(range(-k, 0)) + list(range(self.n + 1, k + 1))
        if self.family == "past":
            return list(range(-k, 0))
        if self.family == "nakazi":
            return list(range(-k, 0)) + list(range(1, min(self.n, k) + 1))
        if self.family == "future-one":
            lags = list(range(-k, 0))
            if self.n <= k:
                lags.append(self.n)
            return lags
        if self.family == "missing-past":
            return [l for l in range(-k, 0) if l != -self.n]
        if self.family == "window":
            return [l for l in self.lags if -k <= l <= k]
        raise ParseError("cyclic sets have no integer-window truncation")

    def dual_lags(self, window: int) -> list[int]:
        """Lags of the complement of the 0-augmented set, inside [-window, window].

        Explicit window sets are served in the direct geometry only; their
        complement is not a finite alteration of a half-line, so no dual
        identification is attempted.
        """
        k = int(window)
        if self.family == "all-but-zero":
            return []
        if self.family == "gap":
            return list(range(1, min(self.n, k) + 1))
        if self.family == "past":
            return list(range(1, k + 1))
        if self.family == "nakazi":
            return list(range(self.n + 1, k + 1))
        if self.family == "future-one":
            return [l for l in range(1, k + 1) if l != self.n]
        if self.family == "missing-past":
            lags = list(range(1, k + 1))
            if self.n <= k:
                lags.insert(0, -self.n)
            return lags
        if self.family == "window":
            raise ParseError("window sets are direct-geometry only")
        raise ParseError("cyclic sets have no integer-window dual")

    def cyclic_lags(self) -> list[int]:
        if self.family != "cyclic":
            raise ParseError("not a cyclic set")
        return list(self.lags)

    # -- text forms ----------------------------------------------------------

    def to_text(self) -> str:
        if self.family in _PARAMETRIC:
            return f"{self.family}:{self.n}"
        if self.family == "window":
            return "window:[" + ",".join(str(l) for l in self.lags) + "]"
        if self.family == "cyclic":
            body = ",".join(str(l) for l in self.lags)
            return f"cyclic:{self.n_points}:[{body}]"
        return self.family

    def to_json_dict(self) -> dict:
        out: dict = {"family": self.family}
        if self.n is not None:
            out["n"] = self.n
        if self.family in ("window", "cyclic"):
            out["lags"] = list(self.lags)
        if self.n_points is not None:
            out["n_points"] = self.n_points
        return out


def _parse_lag_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError(f"expected a [k1,k2,...] lag list, got {text!r}")
    body = text[1:-1].strip()
    if not body:
        raise ParseError("lag list is empty")
    try:
        return tuple(int(part) for part in body.split(","))
    except ValueError as exc:
        raise ParseError(f"bad lag list {text!r}: {exc}") from exc


def parse_index_set(text: str) -> IndexSetSpec:
    """Parse the flat `family[:args]` form used by the command line."""
    text = text.strip()
    if text in ("all-but-zero", "past"):
        return IndexSetSpec(family=text)
    head, _, rest = text.partition(":")
    if head in _PARAMETRIC:
        try:
            n = int(rest)
        except ValueError as exc:
            raise ParseError(f"family {head!r} needs an integer order, got {rest!r}") from exc
        return IndexSetSpec(family=head, n=n)
    if head == "window":
        return IndexSetSpec(family="window", lags=_parse_lag_list(rest))
    if head == "cyclic":
        size, _, body = rest.partition(":")
        try:
            n_points = int(size)
        except ValueError as exc:
            raise ParseError(f"cyclic sets read as cyclic:N:[...], got {text!r}") from exc
        return IndexSetSpec(family="cyclic", n_points=n_points, lags=_parse_lag_list(body))
    raise ParseError(f"cannot parse index set {text!r}")

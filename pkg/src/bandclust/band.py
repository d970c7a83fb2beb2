"""Banded symmetric similarity matrices: storage, validation, builders, file I/O.

A symmetric p x p similarity matrix with ``s_ij = 0`` whenever ``|i - j| >= h``
is stored diagonal-major: row ``i`` (0-based) of ``bands`` holds
``s[i, i], s[i, i+1], ..., s[i, i+h-1]``, zero-padded past the right edge.
Only the diagonal and the h-1 superdiagonals are kept; symmetry is implied.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NonFiniteError

__all__ = [
    "BandMatrix",
    "GenotypeMatrix",
    "ContactMatrix",
    "from_dense",
    "from_coo",
    "to_dense",
    "shift_diagonal",
    "build_ld_r2",
    "build_hic_log",
    "read_coo_text",
    "write_coo_text",
    "read_dense_csv",
    "write_dense_csv",
    "read_genotype_csv",
]


@dataclass(frozen=True)
class BandMatrix:
    """Symmetric banded similarity matrix (diagonal-major dense band storage)."""

    p: int
    h: int
    bands: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.p < 1:
            raise InputError(f"p must be positive, got {self.p}")
        if not 1 <= self.h <= self.p:
            raise InputError(f"bandwidth h must be in [1, p], got h={self.h} p={self.p}")
        bands = np.ascontiguousarray(self.bands, dtype=np.float64)
        if bands.shape != (self.p, self.h):
            raise InputError(f"bands must have shape ({self.p}, {self.h}), got {bands.shape}")
        if not np.isfinite(bands).all():
            raise NonFiniteError("band matrix contains NaN or infinite entries")
        # padding beyond column p must stay zero so pencil sums are exact
        for d in range(1, self.h):
            if d > 0 and np.any(bands[self.p - d:, d] != 0.0):
                raise InputError("nonzero entries in the zero-padding region")
        bands.flags.writeable = False
        object.__setattr__(self, "bands", bands)

    def get(self, i: int, j: int) -> float:
        """Entry s_ij with 1-based indices; zero outside the band."""
        if not (1 <= i <= self.p and 1 <= j <= self.p):
            raise InputError(f"index ({i}, {j}) out of range for p={self.p}")
        lo, d = (i, j - i) if j >= i else (j, i - j)
        if d >= self.h:
            return 0.0
        return float(self.bands[lo - 1, d])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BandMatrix):
            return NotImplemented
        return self.p == other.p and self.h == other.h and np.array_equal(self.bands, other.bands)


@dataclass(frozen=True)
class GenotypeMatrix:
    """n samples x p loci of allele dosages in {0, 1, 2}; NaN marks missing."""

    n: int
    p: int
    dosages: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.asarray(self.dosages, dtype=np.float64)
        if d.shape != (self.n, self.p):
            raise InputError(f"dosages must have shape ({self.n}, {self.p}), got {d.shape}")
        if self.n < 2:
            raise InputError("at least 2 samples are required")
        ok = np.isnan(d) | (d == 0.0) | (d == 1.0) | (d == 2.0)
        if not ok.all():
            raise InputError("dosages must be 0, 1, 2 or missing")
        d.flags.writeable = False
        object.__setattr__(self, "dosages", d)


@dataclass(frozen=True)
class ContactMatrix:
    """Sparse nonnegative contact counts keyed by (i, j) with 1 <= i <= j <= p."""

    p: int
    counts: dict

    def __post_init__(self):
        if self.p < 1:
            raise InputError(f"p must be positive, got {self.p}")
        for (i, j), c in self.counts.items():
            if not (1 <= i <= j <= self.p):
                raise InputError(f"contact index ({i}, {j}) out of range for p={self.p}")
            if c < 0:
                raise InputError(f"negative contact count at ({i}, {j})")


def from_dense(values, h: int, symmetrize: bool = False, tol: float = 1e-8,
               strict: bool = False) -> BandMatrix:
    """Build a BandMatrix from a dense square array.

    Entries with |i - j| >= h are discarded; with ``strict`` they must not
    exceed ``tol`` in magnitude. Without ``symmetrize`` the input must be
    symmetric up to ``tol`` (relative); with it, (s_ij + s_ji) / 2 is used.
    """
    a = np.asarray(values, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"dense input must be square, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise NonFiniteError("dense input contains NaN or infinite entries")
    p = a.shape[0]
    if symmetrize:
        a = (a + a.T) / 2.0
    else:
        scale = np.maximum(np.abs(a), 1.0)
        if np.any(np.abs(a - a.T) > tol * np.maximum(scale, scale.T)):
            raise InputError("input is asymmetric beyond tolerance; pass symmetrize=True")
    if strict:
        mask = np.abs(np.subtract.outer(np.arange(p), np.arange(p))) >= h
        if np.any(np.abs(a[mask]) > tol):
            raise InputError("entries outside the band exceed tolerance")
    bands = np.zeros((p, h))
    for d in range(min(h, p)):
        bands[:p - d, d] = np.diagonal(a, d)
    return BandMatrix(p=p, h=h, bands=bands)


def to_dense(m: BandMatrix) -> np.ndarray:
    """Materialize the full symmetric p x p array (zeros outside the band)."""
    a = np.zeros((m.p, m.p))
    for d in range(m.h):
        idx = np.arange(m.p - d)
        a[idx, idx + d] = m.bands[:m.p - d, d]
        a[idx + d, idx] = m.bands[:m.p - d, d]
    return a


def from_coo(triplets, p: int, h: int, drop_out_of_band: bool = False) -> BandMatrix:
    """Build a BandMatrix from (i, j, value) triplets with 1-based indices.

    Unset entries are zero. A duplicate (i, j) key is an error; (i, j) and
    (j, i) may both appear only with equal values. Entries with |i - j| >= h
    are an error unless ``drop_out_of_band`` is set.
    """
    bands = np.zeros((p, h))
    seen = {}
    diag_set = np.zeros(p, dtype=bool)
    for i, j, v in triplets:
        if not (1 <= i <= p and 1 <= j <= p):
            raise InputError(f"COO index ({i}, {j}) out of range for p={p}")
        if not np.isfinite(v):
            raise NonFiniteError(f"non-finite COO value at ({i}, {j})")
        lo, hi = (i, j) if i <= j else (j, i)
        key = (lo, hi)
        if key in seen:
            val, orients = seen[key]
            if (i, j) in orients:
                raise InputError(f"duplicate COO entry at ({i}, {j})")
            if val != v:
                raise InputError(f"conflicting duplicate COO entries at ({i}, {j})")
            orients.add((i, j))
            continue  # equal mirrored entry
        seen[key] = (v, {(i, j)})
        d = hi - lo
        if d >= h:
            if drop_out_of_band:
                continue
            raise InputError(f"COO entry ({i}, {j}) lies outside the band (h={h})")
        bands[lo - 1, d] = v
        if d == 0:
            diag_set[lo - 1] = True
    if not diag_set.all():
        warnings.warn("diagonal entries absent from COO input default to 0", stacklevel=2)
    return BandMatrix(p=p, h=h, bands=bands)


def shift_diagonal(m: BandMatrix, lam: float) -> BandMatrix:
    """Return a copy of ``m`` with ``lam`` added to every diagonal entry."""
    bands = m.bands.copy()
    bands[:, 0] += lam
    return BandMatrix(p=m.p, h=m.h, bands=bands)


def build_ld_r2(g: GenotypeMatrix, h: int) -> BandMatrix:
    """Squared Pearson correlation of allele dosages for in-band locus pairs.

    Pairwise-complete observations; a constant locus (on the complete subset)
    yields r2 = 0 with its neighbours. The diagonal is identically 1.
    """
    p = g.p
    if not 1 <= h <= p:
        raise InputError(f"bandwidth h must be in [1, p], got h={h} p={p}")
    dos = g.dosages
    bands = np.zeros((p, h))
    bands[:, 0] = 1.0
    for d in range(1, h):
        for i in range(p - d):
            x = dos[:, i]
            y = dos[:, i + d]
            mask = ~np.isnan(x) & ~np.isnan(y)
            m = int(mask.sum())
            if m < 2:
                raise InputError(
                    f"loci {i + 1} and {i + d + 1}: only {m} complete sample pair(s)")
            xs = x[mask] - x[mask].mean()
            ys = y[mask] - y[mask].mean()
            vx = float(xs @ xs)
            vy = float(ys @ ys)
            if vx == 0.0 or vy == 0.0:
                continue  # zero-variance locus: r2 defined as 0
            c = float(xs @ ys)
            bands[i, d] = min(c * c / (vx * vy), 1.0)
    return BandMatrix(p=p, h=h, bands=bands)


def build_hic_log(c: ContactMatrix, h: int) -> BandMatrix:
    """log(1 + count) similarity from contact counts; out-of-band pairs dropped."""
    p = c.p
    if not 1 <= h <= p:
        raise InputError(f"bandwidth h must be in [1, p], got h={h} p={p}")
    bands = np.zeros((p, h))
    for (i, j), cnt in c.counts.items():
        d = j - i
        if d < h:
            bands[i - 1, d] = np.log1p(cnt)
    return BandMatrix(p=p, h=h, bands=bands)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def read_coo_text(path):
    """Read "i j value" triplets (1-based, '#' comments) from a text file.

    Returns (triplets, p) where p is the largest index seen.
    """
    triplets = []
    p = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise InputError(f"{path}:{lineno}: expected 'i j value', got {line!r}")
            try:
                i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
            triplets.append((i, j, v))
            p = max(p, i, j)
    if not triplets:
        raise InputError(f"{path}: no COO entries found")
    return triplets, p


def write_coo_text(m: BandMatrix, path) -> None:
    """Write the stored band entries as "i j value" triplets (upper triangle)."""
    with open(path, "w") as fh:
        for d in range(m.h):
            for i in range(m.p - d):
                v = m.bands[i, d]
                if v != 0.0:
                    fh.write(f"{i + 1} {i + 1 + d} {v:.12g}\n")


def read_dense_csv(path) -> np.ndarray:
    """Read a headerless p x p CSV of numbers."""
    try:
        a = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return a


def write_dense_csv(a, path) -> None:
    np.savetxt(path, np.asarray(a), delimiter=",", fmt="%.12g")


def read_genotype_csv(path) -> GenotypeMatrix:
    """Read an n x p CSV of dosages 0/1/2 with "NA" for missing."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            vals = []
            for tok in line.split(","):
                tok = tok.strip()
                if tok.upper() in ("NA", "NAN", ""):
                    vals.append(np.nan)
                else:
                    try:
                        vals.append(float(tok))
                    except ValueError as exc:
                        raise InputError(f"{path}:{lineno}: {exc}") from exc
            rows.append(vals)
    if not rows:
        raise InputError(f"{path}: empty genotype file")
    a = np.array(rows)
    return GenotypeMatrix(n=a.shape[0], p=a.shape[1], dosages=a)

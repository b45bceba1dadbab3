"""Finite radix-p transforms on quotient grids, and wavelet synthesis.

A quotient grid holds functions supported on the depth-M expanded unit
subgroup that are constant on depth-N cells; such a function is a vector
of p**(M+N) samples indexed by the digits at positions -M+1, ..., N
(first position most significant).  Band-limited, cell-constant
functions are represented exactly, so the transform pair below is the
honest Fourier transform of the group restricted to the grid, not an
approximation; aliasing is always an error, never silent wraparound.

The transform factors into one p-point kernel per digit position, giving
the radix-p generalization of the fast Walsh-Hadamard butterfly with
O(n (M+N) p) arithmetic.  The dual grid swaps the two depths because the
duality pairing matches position j with dual position 1 - j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .errors import AliasingError, BaseMismatchError, SchemaError
from .group import (
    GroupElement,
    check_base,
    format_element,
    from_digits,
    lambda_decode,
    parse_element,
)
from .setalg import Cylinder, PSet
from .verifier import WaveletFamily, congruence_partition

_NORM_RTOL = 1e-9


@dataclass(frozen=True)
class QuotientGrid:
    """Sample grid for functions supported in U_M and constant on U_{-N} cells."""

    p: int
    M: int
    N: int

    def __post_init__(self) -> None:
        check_base(self.p)
        if self.M < 0 or self.N < 0 or self.M + self.N == 0:
            raise ValueError("grid depths must be nonnegative and not both zero")

    @property
    def num_positions(self) -> int:
        return self.M + self.N

    @property
    def size(self) -> int:
        return self.p**self.num_positions

    @property
    def positions(self) -> range:
        return range(-self.M + 1, self.N + 1)

    @property
    def cell_measure(self) -> float:
        return float(self.p) ** (-self.N)

    def dual(self) -> "QuotientGrid":
        return QuotientGrid(self.p, self.N, self.M)

    # -- indexing -------------------------------------------------------------

    def weight(self, position: int) -> int:
        k = position - (-self.M + 1)
        return self.p ** (self.num_positions - 1 - k)

    def digit_rows(self) -> np.ndarray:
        """Array of shape (num_positions, size): digit per position per cell."""
        idx = np.arange(self.size)
        rows = [
            (idx // self.weight(pos)) % self.p for pos in self.positions
        ]
        return np.array(rows)

    def index_of(self, digits: dict[int, int]) -> int:
        total = 0
        for pos, d in digits.items():
            if pos not in self.positions:
                if d:
                    raise AliasingError(f"digit at position {pos} outside the grid")
                continue
            total += d * self.weight(pos)
        return total

    def cell_element(self, index: int) -> GroupElement:
        digits = {}
        for pos in self.positions:
            d = (index // self.weight(pos)) % self.p
            if d:
                digits[pos] = d
        return from_digits(self.p, digits)

    def cell_label(self, index: int) -> str:
        return format_element(self.cell_element(index))

    def index_of_element(self, x: GroupElement) -> int:
        return self.index_of(dict(x.support()))


@dataclass
class GridSignal:
    """Complex samples on a quotient grid."""

    grid: QuotientGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if values.shape[0] != self.grid.size:
            raise ValueError(
                f"expected {self.grid.size} samples, got {values.shape[0]}"
            )
        self.values = values

    @staticmethod
    def zeros(grid: QuotientGrid) -> "GridSignal":
        return GridSignal(grid, np.zeros(grid.size, dtype=np.complex128))

    def norm_sq(self) -> float:
        return float(self.grid.cell_measure * np.sum(np.abs(self.values) ** 2))

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def inner(self, other: "GridSignal") -> complex:
        if self.grid != other.grid:
            raise BaseMismatchError("signals live on different grids")
        return complex(
            self.grid.cell_measure * np.sum(self.values * np.conj(other.values))
        )


# -- transform pair ------------------------------------------------------------


def _kernel(p: int, conjugate: bool) -> np.ndarray:
    # One primitive p-th root drives every stage so the tensor factors agree.
    sign = -1.0 if conjugate else 1.0
    root = np.exp(sign * 2j * np.pi / p)
    a = np.arange(p)
    return root ** np.outer(a, a % p)


def _tensor_apply(values: np.ndarray, p: int, num: int, kernel: np.ndarray) -> np.ndarray:
    t = values.reshape((p,) * num)
    for _ in range(num):
        # Contract the leading axis; the transformed axis lands last, so a
        # full pass leaves the axes in the original order, each now indexed
        # by the paired dual digit.
        t = np.tensordot(t, kernel, axes=([0], [0]))
    # The pairing matches position j with dual position 1 - j, so ascending
    # input positions come out as descending dual positions; reverse them
    # to match the dual grid's ascending layout.
    return t.transpose(tuple(reversed(range(num)))).reshape(-1)


def forward(signal: GridSignal) -> GridSignal:
    """Fourier transform onto the dual grid (character-conjugated kernel)."""
    g = signal.grid
    vals = _tensor_apply(signal.values, g.p, g.num_positions, _kernel(g.p, True))
    return GridSignal(g.dual(), vals * g.cell_measure)


def inverse(spectrum: GridSignal) -> GridSignal:
    """Inverse transform; inverse(forward(f)) == f to machine precision."""
    g = spectrum.grid
    vals = _tensor_apply(spectrum.values, g.p, g.num_positions, _kernel(g.p, False))
    return GridSignal(g.dual(), vals * g.cell_measure)


# -- indicators and synthesis ---------------------------------------------------


def indicator_on_grid(pset: PSet, grid: QuotientGrid) -> np.ndarray:
    """Boolean mask of grid cells lying inside the set.

    Raises if any cylinder has pinned digits outside the grid window,
    because then cells would straddle the set.
    """
    if pset.p != grid.p:
        raise BaseMismatchError("set and grid bases differ")
    lo = grid.positions.start
    mask = np.zeros(grid.size, dtype=bool)
    if pset.is_empty:
        return mask
    rows = grid.digit_rows()
    pos_index = {pos: k for k, pos in enumerate(grid.positions)}
    for c in pset.cylinders:
        if c.resolution > grid.positions.stop - 1:
            raise AliasingError(
                f"cylinder at resolution {c.resolution} exceeds the grid window; "
                f"need fine depth >= {c.resolution}"
            )
        if c.min_fixed_position is not None and c.min_fixed_position < lo:
            raise AliasingError(
                f"cylinder pins digit at position {c.min_fixed_position} below "
                f"the grid window; need coarse depth >= {1 - c.min_fixed_position}"
            )
        cell_mask = np.ones(grid.size, dtype=bool)
        for pos in grid.positions:
            if pos <= c.resolution:
                cell_mask &= rows[pos_index[pos]] == c.digit(pos)
        mask |= cell_mask
    return mask


def synthesize_wavelet(pset: PSet, grid: QuotientGrid) -> GridSignal:
    """Inverse transform of the exact set indicator on the dual grid."""
    dual = grid.dual()
    spectrum = GridSignal(dual, indicator_on_grid(pset, dual).astype(np.complex128))
    return inverse(spectrum)


# -- dilation-translation action ---------------------------------------------------


def _as_lattice(n, p: int) -> GroupElement:
    if isinstance(n, GroupElement):
        return n
    return lambda_decode(int(n), p)


def dilate_translate(signal: GridSignal, j: int, n) -> GridSignal:
    """Samples of p**(j/2) f(rho^j(x) - n), exactly re-indexed on the grid.

    Positive j compresses: the input must be constant across the trailing
    j digit positions or the result is not grid-representable.  Negative
    j stretches: support may escape the coarse end of the window.  Both
    failure modes raise AliasingError; a final norm comparison guards any
    silent mass loss.
    """
    g = signal.grid
    p, M, N, num = g.p, g.M, g.N, g.num_positions
    n_elt = _as_lattice(n, p)
    if n_elt.max_pos is not None and n_elt.max_pos > 0:
        raise AliasingError("translation index must lie in the integer lattice")
    if n_elt.min_pos is not None and n_elt.min_pos <= -M - max(j, 0):
        raise AliasingError(
            f"translation with digits at position {n_elt.min_pos} exceeds the "
            f"coarse capacity of the grid at level {j}"
        )
    if abs(j) > num:
        raise AliasingError(f"dilation by {j} exceeds the grid extent")

    scale = float(p) ** (j / 2.0)
    ref = float(np.max(np.abs(signal.values))) if signal.values.size else 0.0

    if j >= 0:
        core_positions = list(g.positions)[: num - j]
        blocks = signal.values.reshape(-1, p**j)
        if j > 0:
            spread = float(np.max(np.abs(blocks - blocks[:, :1])))
            if spread > _NORM_RTOL * max(ref, 1.0):
                raise AliasingError(
                    f"signal varies across the {j} finest digit positions; "
                    "the compressed copy is not representable on this grid"
                )
        core = blocks[:, 0]
        csize = core.shape[0]
        if csize:
            idx = np.arange(csize)
            y_index = np.zeros(csize, dtype=np.int64)
            for k, pos in enumerate(core_positions):
                w = p ** (len(core_positions) - 1 - k)
                d = (idx // w) % p
                y_index += ((d - n_elt.digit(pos)) % p) * w
            gathered = core[y_index] * scale
        else:
            gathered = core
        # The support sits where the j leading window digits cancel the
        # coarse digits of the translation; elsewhere the argument leaves
        # the support subgroup and the samples vanish.
        offset = 0
        for pos in list(g.positions)[: j]:
            offset += n_elt.digit(pos - j) * g.weight(pos)
        out = np.zeros(g.size, dtype=np.complex128)
        out[offset : offset + csize] = gathered
    else:
        m = -j
        idx = np.arange(g.size)
        y_index = np.zeros(g.size, dtype=np.int64)
        for pos in g.positions:
            src = pos - m
            if src in g.positions:
                d = (idx // g.weight(src)) % p
            else:
                d = np.zeros(g.size, dtype=np.int64)
            y_index += ((d - n_elt.digit(pos)) % p) * g.weight(pos)
        out = signal.values[y_index] * scale

    result = GridSignal(g, out)
    in_norm = signal.norm_sq()
    if abs(result.norm_sq() - in_norm) > _NORM_RTOL * max(in_norm, 1.0):
        raise AliasingError("support escapes the grid under this dilation")
    return result


# -- orthonormality and completeness ------------------------------------------------


def wavelet_system(
    family: WaveletFamily,
    grid: QuotientGrid,
    j_range: Sequence[int],
    n_count,
) -> tuple[list[tuple[int, int, int]], np.ndarray]:
    """Stack dilated-translated wavelets as rows of a matrix.

    ``n_count`` is either an int (same translate count for every level) or
    a callable j -> count.  Returns (labels, matrix) with labels
    (u, j, lattice index).
    """
    base = [synthesize_wavelet(s, grid) for s in family.sets]
    labels: list[tuple[int, int, int]] = []
    rows = []
    for u, psi in enumerate(base, start=1):
        for j in j_range:
            count = n_count(j) if callable(n_count) else n_count
            for lam in range(count):
                rows.append(dilate_translate(psi, j, lam).values)
                labels.append((u, j, lam))
    matrix = np.vstack(rows) if rows else np.zeros((0, grid.size), dtype=np.complex128)
    return labels, matrix


def gram_matrix(
    family: WaveletFamily,
    grid: QuotientGrid,
    j_range: Sequence[int],
    n_count,
) -> tuple[np.ndarray, float]:
    """Gram matrix of the wavelet system and its max deviation from identity."""
    _, matrix = wavelet_system(family, grid, j_range, n_count)
    gram = (matrix @ matrix.conj().T) * grid.cell_measure
    dev = float(np.max(np.abs(gram - np.eye(gram.shape[0])))) if gram.size else 0.0
    return gram, dev


@dataclass
class WaveletAnalysis:
    grid: QuotientGrid
    labels: list[tuple[int, int, int]]
    matrix: np.ndarray
    coefficients: np.ndarray
    energy_ratio: float
    uncovered_fraction: float


def band_mask(family: WaveletFamily, grid: QuotientGrid, j_range: Sequence[int]) -> np.ndarray:
    """Dual-grid mask of the spectrum band covered by the requested levels."""
    dual = grid.dual()
    mask = np.zeros(dual.size, dtype=bool)
    for s in family.sets:
        for j in j_range:
            mask |= indicator_on_grid(s.dilate(-j), dual)
    return mask


def analyze(
    f: GridSignal,
    family: WaveletFamily,
    j_range: Sequence[int],
    n_count=None,
) -> WaveletAnalysis:
    """Expand a signal over the wavelet system on the requested levels.

    The default translate count per level is the full grid span p**(M+j),
    which is exactly the number of independent translates the grid holds.
    The uncovered fraction reports spectral energy outside the band,
    which bounds the energy the expansion can capture.
    """
    grid = f.grid
    p, M = grid.p, grid.M
    if n_count is None:
        def n_count(j, _p=p, _M=M):
            if _M + j < 0:
                raise AliasingError(f"level {j} has no translates on this grid")
            return _p ** (_M + j)

    labels, matrix = wavelet_system(family, grid, j_range, n_count)
    coeffs = (matrix.conj() @ f.values) * grid.cell_measure
    norm_sq = f.norm_sq()
    energy_ratio = float(np.sum(np.abs(coeffs) ** 2) / norm_sq) if norm_sq else 0.0

    spectrum = forward(f)
    mask = band_mask(family, grid, j_range)
    total = float(np.sum(np.abs(spectrum.values) ** 2))
    outside = float(np.sum(np.abs(spectrum.values[~mask]) ** 2))
    uncovered = outside / total if total else 0.0

    return WaveletAnalysis(
        grid=grid,
        labels=labels,
        matrix=matrix,
        coefficients=coeffs,
        energy_ratio=energy_ratio,
        uncovered_fraction=uncovered,
    )


def reconstruct(analysis: WaveletAnalysis) -> GridSignal:
    values = analysis.matrix.T @ analysis.coefficients
    return GridSignal(analysis.grid, values)


# -- unit-translate orthonormality --------------------------------------------------


@dataclass
class TranslateOrthonormalityReport:
    passed: bool
    exact: bool
    failing_cells: list[dict]
    excluded_cells: int
    max_deviation: float


def translate_orthonormality_exact(
    pset: PSet, tail_ball: PSet | None = None
) -> TranslateOrthonormalityReport:
    """Exact unit-energy check: lattice translates of the set must cover
    the unit cell exactly once.  Cells inside tail_ball are excluded."""
    from .setalg import unit_cell

    p = pset.p
    parts = congruence_partition(pset)
    translated = [t for _, _, t in parts]
    res = max([0] + [t.max_resolution for t in translated])
    counts: dict = {}
    for piece in translated:
        for cell in piece.cells_at(res):
            counts[cell] = counts.get(cell, 0) + 1
    failing = []
    excluded = 0
    for cell in sorted(unit_cell(p).cells_at(res)):
        cyl = Cylinder(p, res, cell)
        if tail_ball is not None and not tail_ball.intersect(
            PSet(p, (cyl,), validate=False)
        ).is_empty:
            excluded += 1
            continue
        got = counts.get(cell, 0)
        if got != 1:
            failing.append({"cell": cyl.to_json(), "count": got})
    return TranslateOrthonormalityReport(
        passed=not failing,
        exact=True,
        failing_cells=failing,
        excluded_cells=excluded,
        max_deviation=0.0 if not failing else 1.0,
    )


def translate_orthonormality_grid(
    spectrum: GridSignal, tolerance: float = 1e-10
) -> TranslateOrthonormalityReport:
    """Numeric check of unit translate energy on a dual-grid spectrum.

    Sums |f^(w + n)|^2 over all lattice digit combinations in the window
    and compares against one on every unit-cell pattern.
    """
    grid = spectrum.grid
    lattice_axes = sum(1 for pos in grid.positions if pos <= 0)
    rest = grid.num_positions - lattice_axes
    power = np.abs(spectrum.values.reshape(grid.p**lattice_axes, -1)) ** 2
    sums = power.sum(axis=0)
    dev = float(np.max(np.abs(sums - 1.0)))
    failing = []
    if dev > tolerance:
        bad = np.nonzero(np.abs(sums - 1.0) > tolerance)[0]
        for flat in bad[:16]:
            failing.append({"unit_cell_index": int(flat), "sum": float(sums[flat])})
    return TranslateOrthonormalityReport(
        passed=dev <= tolerance,
        exact=False,
        failing_cells=failing,
        excluded_cells=0,
        max_deviation=dev,
    )


def check_translate_orthonormality(f_hat, **kwargs) -> TranslateOrthonormalityReport:
    """Dispatch on the spectrum representation: exact set or grid samples."""
    if isinstance(f_hat, PSet):
        return translate_orthonormality_exact(f_hat, **kwargs)
    if isinstance(f_hat, GridSignal):
        return translate_orthonormality_grid(f_hat, **kwargs)
    raise TypeError(f"cannot check translates of {type(f_hat).__name__}")


# -- coarse-subspace residual ----------------------------------------------------------


def v0_residual(
    phi: GridSignal,
    family: WaveletFamily,
    depth: int,
    n_count=None,
) -> float:
    """Norm of the scaling function minus its projection on the negative levels.

    Projects onto the wavelet system at levels -depth, ..., -1.  The
    levels are orthonormal on the grid, so the residual is computed from
    coefficient energy.  Depth zero returns the full norm.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth == 0:
        return phi.norm()
    grid = phi.grid
    if n_count is None and grid.M - depth < 0:
        raise AliasingError(
            f"coarse depth {grid.M} cannot host level {-depth} translates"
        )
    analysis = analyze(phi, family, range(-depth, 0), n_count)
    residual_sq = phi.norm_sq() - float(np.sum(np.abs(analysis.coefficients) ** 2))
    return math.sqrt(max(residual_sq, 0.0))


# -- CSV interchange ---------------------------------------------------------------


def write_csv(signal: GridSignal, stream: TextIO) -> None:
    stream.write("cell,re,im\n")
    for idx in range(signal.grid.size):
        v = complex(signal.values[idx])
        stream.write(f"{signal.grid.cell_label(idx)},{v.real!r},{v.imag!r}\n")


def read_csv(grid: QuotientGrid, stream: TextIO) -> GridSignal:
    header = stream.readline().strip()
    if header != "cell,re,im":
        raise SchemaError(f"expected header 'cell,re,im', got {header!r}")
    values = np.zeros(grid.size, dtype=np.complex128)
    seen = np.zeros(grid.size, dtype=bool)
    for lineno, line in enumerate(stream, start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise SchemaError(f"line {lineno}: expected 'cell,re,im'")
        try:
            element = parse_element(parts[0], grid.p)
            idx = grid.index_of_element(element)
            value = complex(float(parts[1]), float(parts[2]))
        except (ValueError, AliasingError) as exc:
            raise SchemaError(f"line {lineno}: {exc}") from exc
        if seen[idx]:
            raise SchemaError(f"line {lineno}: duplicate cell {parts[0]!r}")
        seen[idx] = True
        values[idx] = value
    return GridSignal(grid, values)

"""Periodic-grid spectral representation: grids, fields, transforms, norms.

Conventions (fixed once, used everywhere):

* Modes ``m`` run over the standard FFT layout per axis,
  ``{0, 1, ..., N/2-1, -N/2, ..., -1}``; frequencies are ``xi = 2*pi*m/L``.
* The forward transform carries ``1/N^n`` and the inverse carries ``1``, so
  the DC coefficient equals the field mean.
* Discrete norms are Parseval-weighted so that for band-limited fields they
  converge to the continuum integrals: ``l2^2 = L^n * sum |c_m|^2``
  (= ``sum |f(x_j)|^2 * (L/N)^n`` exactly, by the discrete Parseval identity),
  and the order-s norms weight ``|c_m|^2`` by ``(1+|xi|^2)^s`` or ``|xi|^(2s)``.
* ``hat_values`` returns ``(L/(2*pi))^n * c``, the normalization of the
  Fourier-side function for which a pointwise product in physical space
  becomes a plain lattice convolution with weight ``dxi^n`` and no stray
  ``2*pi`` factors. The dyadic-bump certificate machinery lives entirely on
  that side.
"""

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import DomainError, GridResolutionError

TWO_PI = 2.0 * np.pi

#: largest retained |m| after a quadratic product, per axis (2/3 rule)
def _dealias_limit(N):
    return N // 3


@dataclass(frozen=True)
class GridSpec:
    """Periodic box geometry and its frequency lattice.

    n: spatial dimension (1, 2 or 3); L: box side length; N: modes per axis
    (even, >= 8). Frequency spacing is 2*pi/L and must be <= 1/4 so the
    radius-1/2 ball around the bump center holds at least two lattice points
    per axis.
    """

    n: int
    L: float
    N: int

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError("spatial dimension must satisfy 1 <= n <= 3")
        if self.L <= 0:
            raise DomainError("box size must satisfy L > 0")
        if self.N < 8 or self.N % 2 != 0:
            raise DomainError("modes per axis must satisfy N even, N >= 8")
        if self.dxi > 0.25 + 1e-12:
            raise DomainError(
                f"frequency resolution 2*pi/L = {self.dxi:.4g} must be <= 1/4")

    @property
    def dxi(self):
        """Frequency lattice spacing 2*pi/L."""
        return TWO_PI / self.L

    @property
    def dx(self):
        return self.L / self.N

    @property
    def xi_max(self):
        """Largest resolved |xi| per axis, pi*N/L."""
        return np.pi * self.N / self.L

    @property
    def shape(self):
        return (self.N,) * self.n

    @cached_property
    def modes(self):
        """Integer mode numbers along one axis, FFT layout."""
        m = np.fft.fftfreq(self.N, d=1.0 / self.N)
        return m.astype(np.int64)

    @cached_property
    def xi_axes(self):
        return tuple(TWO_PI * self.modes / self.L for _ in range(self.n))

    @cached_property
    def xi_norm_sq(self):
        """|xi|^2 over the full lattice."""
        grids = np.meshgrid(*self.xi_axes, indexing="ij")
        return sum(g * g for g in grids)

    @cached_property
    def dealias_mask(self):
        """True on modes kept by the 2/3 rule (|m| <= N//3 per axis)."""
        lim = _dealias_limit(self.N)
        keep = np.abs(self.modes) <= lim
        grids = np.meshgrid(*((keep,) * self.n), indexing="ij")
        mask = grids[0]
        for g in grids[1:]:
            mask = mask & g
        return mask

    def refined(self, factor=2):
        """Halve the frequency spacing (L and N both scaled) keeping xi_max."""
        return replace(self, L=self.L * factor, N=self.N * factor)

    def extended(self, factor=2):
        """Double xi_max at fixed frequency spacing (N scaled, L kept)."""
        return replace(self, N=self.N * factor)

    def require_corona_resolution(self, k_max):
        """Check this grid can host the dyadic bump sequence up to level k_max."""
        need = np.sqrt(self.n) * 2.0 ** (k_max + 1)
        if not self.xi_max > need:
            raise GridResolutionError(
                f"max resolved |xi| per axis = {self.xi_max:.4g} must exceed "
                f"sqrt(n)*2^(k_max+1) = {need:.4g} for level k_max = {k_max}")


@dataclass
class SpectralField:
    """Complex Fourier coefficients of a field on a periodic grid.

    ``is_real`` flags Hermitian symmetry (the field represents a real-valued
    function); ``overflowed`` marks fields past the solver blow-up threshold,
    for which norm queries return +inf sentinels instead of erroring.
    """

    grid: GridSpec
    coeffs: np.ndarray
    is_real: bool = False
    overflowed: bool = False

    @classmethod
    def from_coeffs(cls, grid, coeffs, is_real=False):
        """Validating constructor: shape, finiteness and (if claimed) Hermitian
        symmetry are checked here; internal code paths construct directly."""
        c = np.asarray(coeffs, dtype=np.complex128)
        if c.shape != grid.shape:
            raise DomainError(f"coefficient shape {c.shape} does not match grid {grid.shape}")
        if not np.all(np.isfinite(c)):
            raise DomainError("non-finite coefficients")
        f = cls(grid, c, is_real=is_real)
        if is_real and not f.check_hermitian():
            raise DomainError("field flagged real but coefficients are not Hermitian-symmetric")
        return f

    @classmethod
    def zero(cls, grid, is_real=True):
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128), is_real=is_real)

    def check_hermitian(self, tol=1e-12):
        flipped = self.coeffs
        for ax in range(self.grid.n):
            flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
        scale = np.abs(self.coeffs).max() or 1.0
        return np.abs(np.conj(flipped) - self.coeffs).max() <= tol * scale

    def hat_values(self):
        """Fourier-side samples in the product-free convolution convention."""
        return (self.grid.L / TWO_PI) ** self.grid.n * self.coeffs

    @classmethod
    def from_hat_values(cls, grid, hat, is_real=False):
        c = np.asarray(hat, dtype=np.complex128) * (TWO_PI / grid.L) ** grid.n
        return cls(grid, c, is_real=is_real)

    def copy(self):
        return SpectralField(self.grid, self.coeffs.copy(), self.is_real, self.overflowed)


@dataclass
class NormReport:
    """Discrete Sobolev norms of one field; hs/hs_dot keyed by order."""

    l2: float
    hs: dict
    hs_dot: dict
    l1_fourier: float

    def hs_at(self, s):
        return self.hs[s]

    def hs_dot_at(self, s):
        return self.hs_dot[s]


def forward_transform(physical_field, grid, is_real=True):
    """Coefficients of a sampled field; DC coefficient equals the mean."""
    arr = np.asarray(physical_field)
    if arr.shape != grid.shape:
        raise DomainError(f"field shape {arr.shape} does not match grid {grid.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("non-finite physical field")
    c = np.fft.fftn(arr) / grid.N ** grid.n
    return SpectralField(grid, c, is_real=is_real and np.isrealobj(arr))


def inverse_transform(fld):
    """Physical samples; returns a real array for real-flagged fields."""
    values = np.fft.ifftn(fld.coeffs) * fld.grid.N ** fld.grid.n
    if fld.is_real:
        return values.real
    return values


def sobolev_norms(fld, orders=(1.0,)):
    """Parseval-weighted discrete norms; +inf sentinels for overflowed fields."""
    grid = fld.grid
    if not np.all(np.isfinite(fld.coeffs)):
        if not fld.overflowed:
            raise DomainError("non-finite field without overflow flag")
        inf = float("inf")
        return NormReport(inf, {float(s): inf for s in orders},
                          {float(s): inf for s in orders}, inf)
    w = grid.L ** grid.n
    mag2 = np.abs(fld.coeffs) ** 2
    xi2 = grid.xi_norm_sq
    l2 = float(np.sqrt(w * mag2.sum()))
    hs = {}
    hs_dot = {}
    for s in orders:
        s = float(s)
        hs[s] = float(np.sqrt(w * ((1.0 + xi2) ** s * mag2).sum()))
        with np.errstate(divide="ignore"):
            riesz_w = np.where(xi2 > 0, xi2 ** s, 1.0 if s == 0 else 0.0)
        hs_dot[s] = float(np.sqrt(w * (riesz_w * mag2).sum()))
    # L1(dxi) of the hat-side function: (L/2pi)^n * sum|c| * dxi^n collapses
    # to the plain coefficient sum
    l1f = float(np.abs(fld.coeffs).sum())
    return NormReport(l2, hs, hs_dot, l1f)


def h1_norm(fld):
    """Fast path for the solver's working norm."""
    if not np.all(np.isfinite(fld.coeffs)):
        return float("inf")
    grid = fld.grid
    return float(np.sqrt(grid.L ** grid.n *
                         ((1.0 + grid.xi_norm_sq) * np.abs(fld.coeffs) ** 2).sum()))


def h1_dot_norm(fld):
    if not np.all(np.isfinite(fld.coeffs)):
        return float("inf")
    grid = fld.grid
    return float(np.sqrt(grid.L ** grid.n *
                         (grid.xi_norm_sq * np.abs(fld.coeffs) ** 2).sum()))


def dealias(fld):
    """2/3-rule truncation; idempotent projection, applied after every square."""
    c = np.where(fld.grid.dealias_mask, fld.coeffs, 0.0)
    return SpectralField(fld.grid, c, fld.is_real, fld.overflowed)


def pointwise_square(fld):
    """Coefficients of the pointwise square of a real-flagged field, dealiased.

    Computed as inverse transform -> square -> forward transform, which equals
    the lattice autoconvolution of the coefficients on the retained modes
    (the 2/3 rule removes exactly the aliased band).
    """
    if not fld.is_real:
        raise DomainError("pointwise_square requires a real-flagged field")
    phys = inverse_transform(fld)
    sq = np.fft.fftn(phys * phys) / fld.grid.N ** fld.grid.n
    return dealias(SpectralField(fld.grid, sq, is_real=True))


def field_to_csv(fld, path):
    """Write the full coefficient lattice as rows (m1, m2, m3, re, im)."""
    grid = fld.grid
    with open(path, "w") as fh:
        fh.write("# spectral field: mode indices per axis (dimensionless), "
                 "coefficient real/imag parts (field units)\n")
        fh.write(f"# n={grid.n} L={grid.L!r} N={grid.N} is_real={int(fld.is_real)}\n")
        fh.write("m1,m2,m3,re,im\n")
        modes = grid.modes
        idx = np.meshgrid(*((modes,) * grid.n), indexing="ij")
        flat = [g.ravel() for g in idx] + [np.zeros(fld.coeffs.size, dtype=np.int64)] * (3 - grid.n)
        re = fld.coeffs.ravel().real
        im = fld.coeffs.ravel().imag
        for i in range(fld.coeffs.size):
            fh.write(f"{flat[0][i]},{flat[1][i]},{flat[2][i]},"
                     f"{float(re[i])!r},{float(im[i])!r}\n")


def field_from_csv(path, grid):
    data = np.loadtxt(path, delimiter=",", skiprows=3)
    c = np.zeros(grid.shape, dtype=np.complex128)
    modes = grid.modes
    pos = {m: i for i, m in enumerate(modes)}
    for row in np.atleast_2d(data):
        key = tuple(pos[int(row[ax])] for ax in range(grid.n))
        c[key] = row[3] + 1j * row[4]
    return SpectralField(grid, c)

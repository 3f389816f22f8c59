"""Fourier pseudo-spectral tools on a doubly periodic rectangle.

Fields are stored with the two grid axes first, ``(nx, ny, ...)``; the
trailing axes carry tensor components.  Transforms use ``numpy.fft.rfft2``
over the grid axes, so spectral arrays have shape ``(nx, ny // 2 + 1, ...)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    nx: int
    ny: int
    lx: float = 2.0 * np.pi
    ly: float = 2.0 * np.pi

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid dimensions must be positive")
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError("box lengths must be positive")
        kx = 2.0 * np.pi * np.fft.fftfreq(self.nx, d=self.lx / self.nx)
        ky = 2.0 * np.pi * np.fft.rfftfreq(self.ny, d=self.ly / self.ny)
        kx2, ky2 = np.meshgrid(kx, ky, indexing="ij")
        # Nyquist modes carry no derivative information
        kdx, kdy = kx2.copy(), ky2.copy()
        if self.nx % 2 == 0:
            kdx[self.nx // 2, :] = 0.0
        if self.ny % 2 == 0 and self.ny > 1:
            kdy[:, -1] = 0.0
        ix = np.abs(np.fft.fftfreq(self.nx, d=1.0 / self.nx))
        iy = np.abs(np.fft.rfftfreq(self.ny, d=1.0 / self.ny))
        mask = (ix[:, None] < self.nx / 3.0) & (iy[None, :] < self.ny / 3.0)
        k2 = kx2**2 + ky2**2
        # projection uses the derivative wavenumbers so it is exact at Nyquist
        kd2 = kdx**2 + kdy**2
        inv_k2 = np.zeros_like(kd2)
        inv_k2[kd2 > 0] = 1.0 / kd2[kd2 > 0]
        for name, val in (
            ("kx", kdx), ("ky", kdy), ("k2", k2), ("inv_k2", inv_k2),
            ("dealias", mask.astype(float)),
        ):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def dx(self):
        return self.lx / self.nx

    @property
    def dy(self):
        return self.ly / self.ny

    @property
    def area(self):
        return self.lx * self.ly

    def coordinates(self):
        x = np.arange(self.nx) * self.dx
        y = np.arange(self.ny) * self.dy
        return np.meshgrid(x, y, indexing="ij")

    # transforms ----------------------------------------------------------
    def fft(self, f):
        return np.fft.rfft2(f, axes=(0, 1))

    def ifft(self, fh):
        return np.fft.irfft2(fh, s=(self.nx, self.ny), axes=(0, 1))

    def _bcast(self, a, fh):
        return a.reshape(a.shape + (1,) * (fh.ndim - 2))

    def dx_hat(self, fh):
        return 1j * self._bcast(self.kx, fh) * fh

    def dy_hat(self, fh):
        return 1j * self._bcast(self.ky, fh) * fh

    def lap_hat(self, fh):
        return -self._bcast(self.k2, fh) * fh

    def dealias_hat(self, fh):
        return self._bcast(self.dealias, fh) * fh

    # physical-space helpers ---------------------------------------------
    def gradient(self, f):
        """``(..., 2)`` array of ``d/dx`` and ``d/dy`` of a periodic field."""
        fh = self.fft(f)
        return np.stack([self.ifft(self.dx_hat(fh)), self.ifft(self.dy_hat(fh))], axis=-1)

    def laplacian(self, f):
        return self.ifft(self.lap_hat(self.fft(f)))

    def divergence(self, flux):
        """``d_x flux[..., 0] + d_y flux[..., 1]``."""
        fx = self.fft(flux[..., 0])
        fy = self.fft(flux[..., 1])
        return self.ifft(self.dx_hat(fx) + self.dy_hat(fy))

    def leray_hat(self, vh):
        """Project a spectral 2-vector field onto its divergence-free part."""
        kx, ky = self.kx, self.ky
        kv = kx * vh[..., 0] + ky * vh[..., 1]
        out = vh.copy()
        out[..., 0] -= kx * kv * self.inv_k2
        out[..., 1] -= ky * kv * self.inv_k2
        return out

    def velocity_divergence(self, v):
        vh = self.fft(v)
        return self.ifft(self.dx_hat(vh[..., 0]) + self.dy_hat(vh[..., 1]))

    def integrate(self, f):
        """Integral over the box (trapezoid = exact for trigonometric data)."""
        return np.sum(f, axis=(0, 1)) * (self.dx * self.dy)

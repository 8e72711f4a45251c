"""Artifact writers: CSV, the summary report, and the binary kernel dump.

Every float is rendered with %.17g (full round-trip precision) and rows are
emitted in a fixed order, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .errors import ConfigError

_REPORT_DEFECTS = (
    "plancherel",
    "roundtrip_ffstar",
    "roundtrip_fstarf",
    "intertwining",
    "kernel_vs_oracle",
)
_REPORT_COUNTS = ("bound_states", "masked_xi")


def fmt(v) -> str:
    return "%.17g" % float(v)


def write_eigenbasis_csv(path, basis) -> None:
    xs = basis.x_grid.xs
    xi = basis.xi_grid
    with open(path, "w", newline="") as fh:
        fh.write("x,xi,re_e,im_e,re_T,im_T,re_R,im_R,masked\n")
        for i in range(xs.size):
            sx = fmt(xs[i])
            for j in range(xi.size):
                sd = basis.scattering[j]
                e = basis.values[i, j]
                fh.write(
                    f"{sx},{fmt(xi[j])},{fmt(e.real)},{fmt(e.imag)},"
                    f"{fmt(sd.t_coeff.real)},{fmt(sd.t_coeff.imag)},"
                    f"{fmt(sd.r_coeff.real)},{fmt(sd.r_coeff.imag)},"
                    f"{int(basis.exceptional_mask[j])}\n"
                )


def write_scattering_csv(path, basis) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("xi,re_T,im_T,re_R,im_R,re_W,im_W,masked\n")
        for j, sd in enumerate(basis.scattering):
            fh.write(
                f"{fmt(sd.xi)},{fmt(sd.t_coeff.real)},{fmt(sd.t_coeff.imag)},"
                f"{fmt(sd.r_coeff.real)},{fmt(sd.r_coeff.imag)},"
                f"{fmt(sd.wronskian.real)},{fmt(sd.wronskian.imag)},"
                f"{int(basis.exceptional_mask[j])}\n"
            )


def write_boundstates_csv(path, states, grid) -> None:
    xs = grid.xs
    with open(path, "w", newline="") as fh:
        fh.write("k,lambda,x,e_k(x)\n")
        for k, st in enumerate(states):
            sl = fmt(st.lam)
            for i in range(xs.size):
                fh.write(f"{k},{sl},{fmt(xs[i])},{fmt(st.eigenfunction[i])}\n")


def write_transform_csv(path, result) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("xi,re_f,im_f,masked\n")
        for j in range(result.xi_grid.size):
            v = result.values[j]
            fh.write(
                f"{fmt(result.xi_grid[j])},{fmt(v.real)},{fmt(v.imag)},"
                f"{int(result.mask[j])}\n"
            )


def write_applied_csv(path, xs, values) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("x,re_f,im_f\n")
        for i in range(xs.size):
            v = complex(values[i])
            fh.write(f"{fmt(xs[i])},{fmt(v.real)},{fmt(v.imag)}\n")


def write_kernel_csv(path, kernel) -> None:
    xs = kernel.x_grid.xs
    ys = kernel.y_grid.xs
    with open(path, "w", newline="") as fh:
        fh.write("x,y,re_K,im_K\n")
        for i in range(xs.size):
            sx = fmt(xs[i])
            for j in range(ys.size):
                v = kernel.values[i, j]
                fh.write(f"{sx},{fmt(ys[j])},{fmt(v.real)},{fmt(v.imag)}\n")


def write_spectrum_csv(path, hd) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("m,lambda\n")
        for m, lam in enumerate(hd.eigenvalues):
            fh.write(f"{m},{fmt(lam)}\n")


def write_report(path, defects=None, counts=None) -> None:
    """Summary report with the fixed key set; uncomputed entries are null."""
    defects = defects or {}
    counts = counts or {}
    payload = {
        "defects": {k: defects.get(k) for k in _REPORT_DEFECTS},
        "counts": {k: counts.get(k) for k in _REPORT_COUNTS},
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_kernel_binary(path, kernel) -> None:
    """Binary dump: magic DSKL, u32 n_x, u32 n_y, 4 pad bytes, then rows."""
    vals = np.ascontiguousarray(kernel.values).astype("<c16", copy=False)
    with open(path, "wb") as fh:
        fh.write(b"DSKL")
        fh.write(struct.pack("<II", vals.shape[0], vals.shape[1]))
        fh.write(b"\x00\x00\x00\x00")
        fh.write(vals.tobytes())


def read_kernel_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if len(head) != 16 or head[:4] != b"DSKL":
            raise ConfigError(f"{path}: not a kernel dump (bad header)")
        n_x, n_y = struct.unpack("<II", head[4:12])
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != n_x * n_y:
        raise ConfigError(f"{path}: expected {n_x * n_y} entries, found {data.size}")
    return data.reshape(n_x, n_y).astype(np.complex128)

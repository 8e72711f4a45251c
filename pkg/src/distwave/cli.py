"""Batch driver: parse a key=value config, run one pipeline, write artifacts.

Exit codes: 0 success, 1 tolerance failure in validate, 2 config error,
3 precondition or numerical failure. Artifacts are byte-deterministic for
a fixed config (see csvio).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import csvio
from ._backend import set_threads
from .boundstates import find_bound_states
from .errors import ConfigError, DistwaveError, PreconditionError
from .grids import GridSpec
from .jost import UNITARITY_TOL, EigenBasis, build_eigenbasis
from .oracle import discretize, functional_calculus
from .potentials import Potential, make_preset
from .spectral import (
    Multiplier,
    apply_spectral,
    apply_via_transform,
    kernel_total,
    multiplier_preset,
)
from .transform import forward, intertwining_defect, plancherel_defect, roundtrip_defect

SUBCOMMANDS = (
    "eigenfunctions",
    "scattering",
    "boundstates",
    "transform",
    "kernel",
    "apply",
    "validate",
)

_KNOWN_KEYS = {
    "potential.kind",
    "potential.params",
    "grid.x_min",
    "grid.x_max",
    "grid.n",
    "xi.max",
    "xi.n",
    "multiplier.kind",
    "multiplier.center",
    "multiplier.radius",
    "input.kind",
    "input.center",
    "input.width",
    "input.file",
    "kernel.binary",
}

# Tolerances checked by the validate subcommand. The oracle comparison is
# limited by the O(h^2) eigenvalue bias of the reference matrix, not by the
# transform pipeline, so its threshold does not tighten in the free case.
_VALIDATE_TOL_FREE = {
    "plancherel": 1e-6,
    "roundtrip_ffstar": 1e-6,
    "roundtrip_fstarf": 1e-6,
    "intertwining": 1e-6,
    "kernel_vs_oracle": 1e-2,
}
_VALIDATE_TOL = {
    "plancherel": 1e-3,
    "roundtrip_ffstar": 1e-3,
    "roundtrip_fstarf": 1e-3,
    "intertwining": 1e-3,
    "kernel_vs_oracle": 1e-2,
}


@dataclass(frozen=True)
class RunConfig:
    potential: Potential
    grid: GridSpec
    xi_max: float
    n_xi: int
    multiplier: Multiplier | None
    input_kind: str
    input_center: float
    input_width: float
    input_file: str | None
    kernel_binary: bool
    out_dir: Path


def _parse_pairs(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in pairs:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        pairs[key] = val
    return pairs


def _get_float(pairs, key, default=None):
    if key not in pairs:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        v = float(pairs[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: not a number: {pairs[key]!r}") from exc
    if not np.isfinite(v):
        raise ConfigError(f"{key}: must be finite")
    return v


def _get_int(pairs, key):
    if key not in pairs:
        raise ConfigError(f"missing required key {key!r}")
    try:
        return int(pairs[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: not an integer: {pairs[key]!r}") from exc


def load_config(path: str, out_dir: str = ".") -> RunConfig:
    """Parse and validate a config file into a RunConfig.

    Raises:
        ConfigError: unreadable file, unknown or duplicate keys, missing
            required keys, out-of-range numerics, unknown presets.
    """
    pairs = _parse_pairs(path)
    if "potential.kind" not in pairs:
        raise ConfigError("missing required key 'potential.kind'")
    params = ()
    if "potential.params" in pairs and pairs["potential.params"]:
        try:
            params = tuple(float(p) for p in pairs["potential.params"].split(","))
        except ValueError as exc:
            raise ConfigError(f"potential.params: {exc}") from exc
    try:
        pot = make_preset(pairs["potential.kind"], params)
    except PreconditionError as exc:
        raise ConfigError(f"potential: {exc}") from exc

    x_min = _get_float(pairs, "grid.x_min")
    x_max = _get_float(pairs, "grid.x_max")
    n = _get_int(pairs, "grid.n")
    if not (x_max > x_min and n >= 3):
        raise ConfigError("grid needs x_max > x_min and n >= 3")
    grid = GridSpec(x_min, x_max, n)

    xi_max = _get_float(pairs, "xi.max")
    n_xi = _get_int(pairs, "xi.n")
    if not (xi_max > 0 and n_xi >= 2 and n_xi % 2 == 0):
        raise ConfigError("frequency grid needs xi.max > 0 and even xi.n >= 2")

    mult = None
    mult_keys = [k for k in pairs if k.startswith("multiplier.")]
    if mult_keys:
        if "multiplier.kind" not in pairs:
            raise ConfigError("multiplier.kind required when multiplier.* given")
        kind = pairs["multiplier.kind"]
        if kind not in ("tent", "smooth_bump"):
            raise ConfigError(f"multiplier.kind: unknown kind {kind!r}")
        center = _get_float(pairs, "multiplier.center")
        radius = _get_float(pairs, "multiplier.radius")
        try:
            mult = multiplier_preset(kind, center, radius)
        except PreconditionError as exc:
            raise ConfigError(f"multiplier: {exc}") from exc

    input_kind = pairs.get("input.kind", "gaussian")
    if input_kind not in ("gaussian", "bump", "file"):
        raise ConfigError(f"input.kind: unknown kind {input_kind!r}")
    input_file = pairs.get("input.file")
    if input_kind == "file" and not input_file:
        raise ConfigError("input.file required when input.kind = file")
    width = _get_float(pairs, "input.width", 1.0)
    if width <= 0:
        raise ConfigError("input.width must be positive")

    binary = pairs.get("kernel.binary", "false").lower()
    if binary not in ("true", "false", "1", "0", "yes", "no"):
        raise ConfigError(f"kernel.binary: not a boolean: {binary!r}")

    return RunConfig(
        potential=pot,
        grid=grid,
        xi_max=xi_max,
        n_xi=n_xi,
        multiplier=mult,
        input_kind=input_kind,
        input_center=_get_float(pairs, "input.center", 0.0),
        input_width=width,
        input_file=input_file,
        kernel_binary=binary in ("true", "1", "yes"),
        out_dir=Path(out_dir),
    )


def _input_vector(cfg: RunConfig) -> np.ndarray:
    xs = cfg.grid.xs
    if cfg.input_kind == "gaussian":
        return np.exp(-0.5 * ((xs - cfg.input_center) / cfg.input_width) ** 2)
    if cfg.input_kind == "bump":
        u = (xs - cfg.input_center) / cfg.input_width
        out = np.zeros_like(xs)
        inside = np.abs(u) < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
        return out
    try:
        table = np.loadtxt(cfg.input_file, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"input.file: {exc}") from exc
    if table.shape[1] != 2:
        raise ConfigError("input.file must have two columns: x,value")
    return np.interp(xs, table[:, 0], table[:, 1], left=0.0, right=0.0)


def _need_multiplier(cfg: RunConfig) -> Multiplier:
    if cfg.multiplier is None:
        raise ConfigError("this subcommand needs multiplier.* keys in the config")
    return cfg.multiplier


def _basis(cfg: RunConfig) -> EigenBasis:
    return build_eigenbasis(cfg.potential, cfg.grid, cfg.xi_max, cfg.n_xi)


def _masked_count(basis: EigenBasis) -> int:
    return int(np.count_nonzero(basis.exceptional_mask))


def _unitarity_defect(basis: EigenBasis) -> float:
    worst = 0.0
    for j, sd in enumerate(basis.scattering):
        if basis.exceptional_mask[j]:
            continue
        worst = max(worst, abs(abs(sd.t_coeff) ** 2 + abs(sd.r_coeff) ** 2 - 1.0))
    return worst


def run(subcommand: str, cfg: RunConfig) -> int:
    """Execute one pipeline; writes artifacts into cfg.out_dir."""
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)

    if subcommand == "eigenfunctions":
        basis = _basis(cfg)
        csvio.write_eigenbasis_csv(out / "eigenbasis.csv", basis)
        csvio.write_report(out / "report.json", counts={"masked_xi": _masked_count(basis)})
        return 0

    if subcommand == "scattering":
        basis = _basis(cfg)
        csvio.write_scattering_csv(out / "scattering.csv", basis)
        csvio.write_report(out / "report.json", counts={"masked_xi": _masked_count(basis)})
        return 0

    if subcommand == "boundstates":
        states = find_bound_states(cfg.potential, cfg.grid)
        csvio.write_boundstates_csv(out / "boundstates.csv", states, cfg.grid)
        csvio.write_report(out / "report.json", counts={"bound_states": len(states)})
        return 0

    if subcommand == "transform":
        basis = _basis(cfg)
        states = find_bound_states(cfg.potential, cfg.grid)
        f = _input_vector(cfg)
        tr = forward(f, basis)
        csvio.write_transform_csv(out / "transform.csv", tr)
        ffstar, fstarf = roundtrip_defect(basis, states, f)
        defects = {
            "plancherel": plancherel_defect(f, basis, states),
            "roundtrip_ffstar": ffstar,
            "roundtrip_fstarf": fstarf,
            "intertwining": intertwining_defect(f, basis),
        }
        counts = {"bound_states": len(states), "masked_xi": _masked_count(basis)}
        csvio.write_report(out / "report.json", defects, counts)
        return 0

    if subcommand == "kernel":
        phi = _need_multiplier(cfg)
        basis = _basis(cfg)
        states = find_bound_states(cfg.potential, cfg.grid)
        kern = kernel_total(basis, states, phi)
        csvio.write_kernel_csv(out / "kernel.csv", kern)
        if cfg.kernel_binary:
            csvio.write_kernel_binary(out / "kernel.bin", kern)
        f = _input_vector(cfg)
        hd = discretize(cfg.potential, cfg.grid)
        defects = {"kernel_vs_oracle": _kernel_defect(kern, hd, phi, f, cfg.grid)}
        counts = {"bound_states": len(states), "masked_xi": _masked_count(basis)}
        csvio.write_report(out / "report.json", defects, counts)
        return 0

    if subcommand == "apply":
        phi = _need_multiplier(cfg)
        basis = _basis(cfg)
        states = find_bound_states(cfg.potential, cfg.grid)
        f = _input_vector(cfg)
        g = apply_via_transform(basis, states, phi, f)
        csvio.write_applied_csv(out / "applied.csv", cfg.grid.xs, g)
        counts = {"bound_states": len(states), "masked_xi": _masked_count(basis)}
        csvio.write_report(out / "report.json", counts=counts)
        return 0

    if subcommand == "validate":
        return _run_validate(cfg, out)

    raise ConfigError(f"unknown subcommand {subcommand!r}")


def _kernel_defect(kern, hd, phi, f, grid) -> float:
    w = grid.weights
    got = apply_spectral(kern, f)
    ref = functional_calculus(hd, phi, f)
    den = float(np.sqrt(np.sum(w * np.abs(f) ** 2)))
    return float(np.sqrt(np.sum(w * np.abs(got - ref) ** 2))) / den


def _run_validate(cfg: RunConfig, out: Path) -> int:
    phi = _need_multiplier(cfg)
    basis = _basis(cfg)
    states = find_bound_states(cfg.potential, cfg.grid)
    f = _input_vector(cfg)
    hd = discretize(cfg.potential, cfg.grid)
    csvio.write_spectrum_csv(out / "spectrum.csv", hd)

    ffstar, fstarf = roundtrip_defect(basis, states, f)
    kern = kernel_total(basis, states, phi)
    defects = {
        "plancherel": plancherel_defect(f, basis, states),
        "roundtrip_ffstar": ffstar,
        "roundtrip_fstarf": fstarf,
        "intertwining": intertwining_defect(f, basis),
        "kernel_vs_oracle": _kernel_defect(kern, hd, phi, f, cfg.grid),
    }
    counts = {"bound_states": len(states), "masked_xi": _masked_count(basis)}
    csvio.write_report(out / "report.json", defects, counts)

    if cfg.potential.kind == "zero":
        tol = _VALIDATE_TOL_FREE
    else:
        tol = dict(_VALIDATE_TOL)
        if cfg.potential.jump_points:
            # Jumps in V cost an order in two places: Hf has a value jump, so
            # the x-quadrature behind the intertwining defect degrades, and
            # the transform tail only decays like 1/xi^2, which floors the
            # roundtrip defects near 1e-3 at any reachable xi.max.
            tol["intertwining"] = 1e-2
            tol["roundtrip_ffstar"] = 2e-3
            tol["roundtrip_fstarf"] = 2e-3
    failed = []
    for name in sorted(defects):
        ok = defects[name] < tol[name]
        print(f"{name}: {defects[name]:.3e} (tol {tol[name]:.0e}) {'ok' if ok else 'FAIL'}")
        if not ok:
            failed.append(name)
    uni = _unitarity_defect(basis)
    ok = uni < UNITARITY_TOL
    print(f"unitarity: {uni:.3e} (tol {UNITARITY_TOL:.0e}) {'ok' if ok else 'FAIL'}")
    if not ok:
        failed.append("unitarity")
    if failed:
        print(f"validate failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="distwave",
        description="Distorted plane-wave transforms and spectral kernels "
        "for 1-d Schrodinger operators.",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="key=value config file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--threads", type=int, default=0, help="0 = auto")
    args = parser.parse_args(argv)
    try:
        set_threads(args.threads)
        cfg = load_config(args.config, args.out)
        return run(args.subcommand, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DistwaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

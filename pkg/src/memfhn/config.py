"""JSON run configuration: flat, fully spelled-out keys, validated in one
pass that collects every problem instead of stopping at the first.

Schema (blocks "theory" and "output" are optional):

    {
      "params": {"eta", "sigma", "J", "k", "a", "b", "c", "q", "r", "P", "m"},
      "bounds": {"kappa", optional "lambda", "beta", "phi_bar"},
      "grid":   {"nx", "ny", "dx"},
      "run":    {"dt", "n_steps", optional "seed", "amplitude",
                 "record_every", "snapshot_every"},
      "theory": {optional "C_star", "k", "phi_norm_sq",
                 "omega_measure_K", "omega_measure_Q"},
      "output": {optional "metrics_csv", "snapshots_dir"}
    }

Physical parameters have no defaults; only output cadence, seeds, and
theory conventions default (conventions to the integral convention).
"theory.k" lets the threshold constants be evaluated at a different
memristor coupling than the simulated one, which the bundled paper.json
uses to reconcile published constants with published trajectories.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .grid import Grid2D, cfl_max_dt
from .model import NetworkParams, NonlinearityBounds
from .simulate import RunConfig
from .theory import DEFAULT_C_STAR, NormConventions

__all__ = ["ConfigError", "ConfigDocument", "parse_config", "load_config"]


class ConfigError(ValueError):
    """All validation problems of one document, as a list of messages."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class ConfigDocument:
    params: NetworkParams
    bounds: NonlinearityBounds
    grid: Grid2D
    dt: float
    n_steps: int
    seed: int
    amplitude: float
    record_every: int
    snapshot_every: int
    c_star: float
    theory_k: float
    conventions: NormConventions
    metrics_csv: str
    snapshots_dir: str

    def run_config(self, seed: int | None = None) -> RunConfig:
        return RunConfig(
            params=self.params,
            bounds=self.bounds,
            grid=self.grid,
            dt=self.dt,
            n_steps=self.n_steps,
            seed=self.seed if seed is None else seed,
            amplitude=self.amplitude,
            record_every=self.record_every,
            snapshot_every=self.snapshot_every,
        )

    def theory_params(self) -> NetworkParams:
        """Parameters used for the closed-form constants (theory.k override)."""
        return replace(self.params, k=self.theory_k)


class _BlockChecker:
    def __init__(self, errors: list[str], block: str, data: dict, known: set[str]):
        self.errors = errors
        self.block = block
        self.data = data
        for key in data:
            if key not in known:
                errors.append(f"{block}.{key}: unknown key")

    def _get(self, key: str, required: bool, default):
        if key not in self.data:
            if required:
                self.errors.append(f"{self.block}.{key}: missing required key")
            return default
        return self.data[key]

    def number(self, key: str, required=True, default=None, minimum=None,
               exclusive_minimum=None):
        raw = self._get(key, required, default)
        if key not in self.data:
            return default
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            self.errors.append(f"{self.block}.{key}: expected a number, got {raw!r}")
            return default
        value = float(raw)
        if not math.isfinite(value):
            self.errors.append(f"{self.block}.{key}: must be finite, got {value}")
            return default
        if minimum is not None and value < minimum:
            self.errors.append(f"{self.block}.{key}: must be >= {minimum}, got {value}")
            return default
        if exclusive_minimum is not None and value <= exclusive_minimum:
            self.errors.append(
                f"{self.block}.{key}: must be > {exclusive_minimum}, got {value}"
            )
            return default
        return value

    def integer(self, key: str, required=True, default=None, minimum=None):
        raw = self._get(key, required, default)
        if key not in self.data:
            return default
        if isinstance(raw, bool) or not isinstance(raw, int):
            self.errors.append(f"{self.block}.{key}: expected an integer, got {raw!r}")
            return default
        if minimum is not None and raw < minimum:
            self.errors.append(f"{self.block}.{key}: must be >= {minimum}, got {raw}")
            return default
        return raw

    def string(self, key: str, default: str) -> str:
        raw = self._get(key, False, default)
        if not isinstance(raw, str):
            self.errors.append(f"{self.block}.{key}: expected a string, got {raw!r}")
            return default
        return raw


def parse_config(text: str) -> ConfigDocument:
    """Parse and fully validate a JSON config; raises ConfigError listing
    every missing key, type mismatch, and range violation found."""
    errors: list[str] = []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"not valid JSON: {exc}"]) from None
    if not isinstance(doc, dict):
        raise ConfigError(["top level must be a JSON object"])

    known_blocks = {"params", "bounds", "grid", "run", "theory", "output"}
    for key in doc:
        if key not in known_blocks:
            errors.append(f"{key}: unknown key")
    for block in ("params", "bounds", "grid", "run"):
        if block not in doc:
            errors.append(f"{block}: missing required block")
        elif not isinstance(doc[block], dict):
            errors.append(f"{block}: expected an object")
    for block in ("theory", "output"):
        if block in doc and not isinstance(doc[block], dict):
            errors.append(f"{block}: expected an object")
    if errors:
        raise ConfigError(errors)

    pc = _BlockChecker(errors, "params", doc["params"],
                       {"eta", "sigma", "J", "k", "a", "b", "c", "q", "r", "P", "m"})
    p_eta = pc.number("eta", exclusive_minimum=0.0)
    p_sigma = pc.number("sigma", exclusive_minimum=0.0)
    p_J = pc.number("J")
    p_k = pc.number("k", exclusive_minimum=0.0)
    p_a = pc.number("a", exclusive_minimum=0.0)
    p_b = pc.number("b", exclusive_minimum=0.0)
    p_c = pc.number("c", exclusive_minimum=0.0)
    p_q = pc.number("q", exclusive_minimum=0.0)
    p_r = pc.number("r", exclusive_minimum=0.0)
    p_P = pc.number("P", minimum=0.0)
    p_m = pc.integer("m", minimum=2)

    bc = _BlockChecker(errors, "bounds", doc["bounds"],
                       {"kappa", "lambda", "beta", "phi_bar"})
    kappa = bc.number("kappa", exclusive_minimum=0.0)
    b_lam = bc.number("lambda", required=False, exclusive_minimum=0.0)
    b_beta = bc.number("beta", required=False)
    b_phi = bc.number("phi_bar", required=False)

    gc = _BlockChecker(errors, "grid", doc["grid"], {"nx", "ny", "dx"})
    g_nx = gc.integer("nx", minimum=3)
    g_ny = gc.integer("ny", minimum=3)
    g_dx = gc.number("dx", exclusive_minimum=0.0)

    rc = _BlockChecker(errors, "run", doc["run"],
                       {"dt", "n_steps", "seed", "amplitude", "record_every",
                        "snapshot_every"})
    r_dt = rc.number("dt", exclusive_minimum=0.0)
    r_steps = rc.integer("n_steps", minimum=1)
    r_seed = rc.integer("seed", required=False, default=0, minimum=0)
    r_amp = rc.number("amplitude", required=False, default=0.05, minimum=0.0)
    r_rec = rc.integer("record_every", required=False, default=1, minimum=1)
    r_snap = rc.integer("snapshot_every", required=False, default=0, minimum=0)

    tc = _BlockChecker(errors, "theory", doc.get("theory", {}),
                       {"C_star", "k", "phi_norm_sq", "omega_measure_K",
                        "omega_measure_Q"})
    t_cstar = tc.number("C_star", required=False, default=DEFAULT_C_STAR,
                        exclusive_minimum=0.0)
    t_k = tc.number("k", required=False, exclusive_minimum=0.0)
    t_phi = tc.number("phi_norm_sq", required=False, minimum=0.0)
    t_omK = tc.number("omega_measure_K", required=False, minimum=0.0)
    t_omQ = tc.number("omega_measure_Q", required=False, minimum=0.0)

    oc = _BlockChecker(errors, "output", doc.get("output", {}),
                       {"metrics_csv", "snapshots_dir"})
    o_csv = oc.string("metrics_csv", "metrics.csv")
    o_snap = oc.string("snapshots_dir", "snapshots")

    if errors:
        raise ConfigError(errors)

    params = NetworkParams(eta=p_eta, sigma=p_sigma, J=p_J, k=p_k, a=p_a, b=p_b,
                           c=p_c, q=p_q, r=p_r, P=p_P, m=p_m)
    proto = NonlinearityBounds.prototype(kappa)
    bounds = NonlinearityBounds(
        kappa=kappa,
        lam=proto.lam if b_lam is None else b_lam,
        beta=proto.beta if b_beta is None else b_beta,
        phi_bar=proto.phi_bar if b_phi is None else b_phi,
    )
    grid = Grid2D(nx=g_nx, ny=g_ny, dx=g_dx)

    dt_limit = cfl_max_dt(params, grid, safety=1.0)
    if r_dt > dt_limit:
        raise ConfigError([
            f"run.dt: {r_dt} exceeds the stability bound "
            f"cfl_max_dt(eta={params.eta}, dx={grid.dx}) = {dt_limit}"
        ])

    integral = NormConventions.integral(bounds, grid)
    conventions = NormConventions(
        phi_norm_sq=integral.phi_norm_sq if t_phi is None else t_phi,
        omega_measure_K=integral.omega_measure_K if t_omK is None else t_omK,
        omega_measure_Q=integral.omega_measure_Q if t_omQ is None else t_omQ,
    )

    return ConfigDocument(
        params=params,
        bounds=bounds,
        grid=grid,
        dt=r_dt,
        n_steps=r_steps,
        seed=r_seed,
        amplitude=r_amp,
        record_every=r_rec,
        snapshot_every=r_snap,
        c_star=t_cstar,
        theory_k=params.k if t_k is None else t_k,
        conventions=conventions,
        metrics_csv=o_csv,
        snapshots_dir=o_snap,
    )


def load_config(path: str | Path) -> ConfigDocument:
    return parse_config(Path(path).read_text(encoding="utf-8"))

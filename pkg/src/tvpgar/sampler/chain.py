"""MCMC driver for the TVP-SV regression.

Each iteration runs, in order: the joint state draw, the joint
``(beta0, sqrt_v)`` draw (followed by a random joint sign flip of
``sqrt_v`` and the normalized states), the ASIS step, the shrinkage
hierarchy, and the stochastic-volatility block.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import ConfigError, DependencyError, InputError, NumericalError
from ..model import ModelParameters, TvpSvModelSpec, initial_parameters
from . import shrinkage, states, volatility

log = logging.getLogger(__name__)

SCALAR_FIELDS = ("log_vol0", "mu_sigma", "rho_sigma", "theta2", "a_v", "c_v", "kappa_v", "a_beta", "c_beta", "kappa_beta")
VECTOR_FIELDS = ("beta0", "sqrt_v", "tau2_v", "lambda_v", "tau2_beta", "lambda_beta")


@dataclass(frozen=True)
class SamplerConfig:
    n_draws: int = 30000
    burn_in: int = 30000
    thin: int = 10
    seed: int = 0
    mh_target_acceptance: float = 0.35
    asis: bool = True
    sv_interweave: bool = True
    # likelihood switched off: the chain then targets the prior
    prior_only: bool = False

    def __post_init__(self):
        if self.n_draws < 0 or self.burn_in < 0:
            raise ConfigError("n_draws and burn_in must be >= 0")
        if self.thin < 1:
            raise ConfigError("thin must be >= 1")
        if not 0 < self.mh_target_acceptance < 1:
            raise ConfigError("mh_target_acceptance must lie in (0, 1)")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def n_keep(self) -> int:
        return self.n_draws // self.thin


def stream(seed: int, *index: int) -> np.random.Generator:
    """Independent generator for a sub-task.

    The stream for indices ``(i, j, ...)`` is seeded by
    ``SeedSequence(entropy=seed, spawn_key=(i, j, ...))``, which hashes the
    master seed together with the indices.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(int(i) for i in index))))


@dataclass
class PosteriorDraws:
    """Retained draws, stacked along the first axis."""

    beta0: np.ndarray
    sqrt_v: np.ndarray
    states_tilde: np.ndarray
    log_vol: np.ndarray
    scalars: dict[str, np.ndarray]
    vectors: dict[str, np.ndarray]
    acceptance: dict[str, float] = field(default_factory=dict)
    seed: int = 0
    config: dict = field(default_factory=dict)
    columns: tuple[str, ...] = ()
    origins: np.ndarray | None = None
    # last state of the chain; in memory only, used to warm-start later runs
    final: ModelParameters | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return self.beta0.shape[0]

    @property
    def K(self) -> int:
        return self.beta0.shape[1]

    @property
    def T(self) -> int:
        return self.log_vol.shape[1]

    @classmethod
    def from_params(cls, draws: list[ModelParameters], columns: tuple[str, ...] = (), seed: int = 0) -> "PosteriorDraws":
        """Stack explicit parameter sets, e.g. for fixtures or ground truth."""
        if not draws:
            raise InputError("at least one parameter set is required")
        return cls(
            beta0=np.array([d.beta0 for d in draws], dtype=float),
            sqrt_v=np.array([d.sqrt_v for d in draws], dtype=float),
            states_tilde=np.array([d.states_tilde for d in draws], dtype=float),
            log_vol=np.array([d.log_vol for d in draws], dtype=float),
            scalars={k: np.array([getattr(d, k) for d in draws], dtype=float) for k in SCALAR_FIELDS},
            vectors={k: np.array([getattr(d, k) for d in draws], dtype=float)
                     for k in ("tau2_v", "lambda_v", "tau2_beta", "lambda_beta")},
            seed=seed, columns=tuple(columns),
        )

    def centered(self) -> np.ndarray:
        """``beta_t`` for every draw, shape (N, T, K)."""
        return self.beta0[:, None, :] + self.states_tilde * self.sqrt_v[:, None, :]

    def params(self, i: int) -> ModelParameters:
        kw = {k: float(v[i]) for k, v in self.scalars.items()}
        kw.update({k: self.vectors[k][i].copy() for k in ("tau2_v", "lambda_v", "tau2_beta", "lambda_beta")})
        return ModelParameters(
            beta0=self.beta0[i].copy(), sqrt_v=self.sqrt_v[i].copy(),
            states_tilde=self.states_tilde[i].copy(), log_vol=self.log_vol[i].copy(), **kw,
        )

    # -- persistence: one CSV per block plus a JSON manifest -----------------

    def save(self, directory: str | Path) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        cols = list(self.columns) or [f"x{j}" for j in range(self.K)]
        files = {}
        for name, arr in (("beta0", self.beta0), ("sqrt_v", self.sqrt_v)):
            pd.DataFrame(arr, columns=cols).to_csv(d / f"{name}.csv", index_label="draw")
            files[name] = f"{name}.csv"
        for name in ("tau2_v", "lambda_v", "tau2_beta", "lambda_beta"):
            pd.DataFrame(self.vectors[name], columns=cols).to_csv(d / f"{name}.csv", index_label="draw")
            files[name] = f"{name}.csv"
        pd.DataFrame(self.scalars).to_csv(d / "scalars.csv", index_label="draw")
        files["scalars"] = "scalars.csv"
        N, T, K = self.states_tilde.shape
        pd.DataFrame(self.log_vol).to_csv(d / "log_vol.csv", index_label="draw")
        files["log_vol"] = "log_vol.csv"
        st = pd.DataFrame(self.states_tilde.reshape(N, T * K),
                          columns=[f"t{t}_{c}" for t in range(T) for c in cols])
        st.to_csv(d / "states_tilde.csv", index_label="draw")
        files["states_tilde"] = "states_tilde.csv"
        manifest = {
            "seed": int(self.seed),
            "config": self.config,
            "columns": cols,
            "draws": N,
            "T": T,
            "K": K,
            "acceptance": self.acceptance,
            "files": files,
            "origins": None if self.origins is None else [int(o) for o in self.origins],
        }
        (d / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))

    @classmethod
    def load(cls, directory: str | Path) -> "PosteriorDraws":
        d = Path(directory)
        mpath = d / "manifest.json"
        if not mpath.is_file():
            raise DependencyError(f"no posterior draws in {d}", producer="fit")
        m = json.loads(mpath.read_text())
        N, T, K = m["draws"], m["T"], m["K"]

        def block(name):
            return pd.read_csv(d / m["files"][name], index_col="draw", float_precision="round_trip").to_numpy(float)

        sc = pd.read_csv(d / m["files"]["scalars"], index_col="draw", float_precision="round_trip")
        return cls(
            beta0=block("beta0"), sqrt_v=block("sqrt_v"),
            states_tilde=block("states_tilde").reshape(N, T, K), log_vol=block("log_vol"),
            scalars={c: sc[c].to_numpy(float) for c in sc.columns},
            vectors={n: block(n) for n in ("tau2_v", "lambda_v", "tau2_beta", "lambda_beta")},
            acceptance=m.get("acceptance", {}), seed=m["seed"], config=m.get("config", {}),
            columns=tuple(m["columns"]),
            origins=None if m.get("origins") is None else np.asarray(m["origins"]),
        )


def sweep(p: ModelParameters, y, X, spec: TvpSvModelSpec, cfg: SamplerConfig, rng, steps, sv_state) -> ModelParameters:
    """One full MCMC iteration."""
    w = np.zeros(y.size) if cfg.prior_only else np.exp(-p.log_vol)
    p = replace(p, states_tilde=states._draw_states(p, y, X, w, rng))
    beta0, sqrt_v = states._draw_beta0_and_scales(p, y, X, w, rng)
    p = replace(p, beta0=beta0, sqrt_v=sqrt_v)
    p = states.flip_signs(p, rng)
    if cfg.asis:
        p = states.asis_interweave(p, None, rng)
    p, _ = shrinkage.draw_shrinkage_hierarchy(p, rng, spec, steps)
    resid = y - np.einsum("tk,tk->t", p.beta0 + p.states_tilde * p.sqrt_v, X)
    h, mu, rho, theta2, h0 = volatility.draw_stochastic_volatility(
        p, resid, rng, spec.sv, interweave=cfg.sv_interweave, prior_only=cfg.prior_only, state=sv_state
    )
    return replace(p, log_vol=h, mu_sigma=mu, rho_sigma=rho, theta2=theta2, log_vol0=h0)


def _check_finite(p: ModelParameters, it: int) -> None:
    bad = [k for k in ("beta0", "sqrt_v", "states_tilde", "log_vol") if not np.all(np.isfinite(getattr(p, k)))]
    bad += [k for k in ("mu_sigma", "rho_sigma", "theta2") if not np.isfinite(getattr(p, k))]
    if bad:
        raise NumericalError(f"chain diverged at iteration {it}: non-finite {', '.join(bad)}")


def run_chain(spec: TvpSvModelSpec, data, cfg: SamplerConfig, init: ModelParameters | None = None,
              rng: np.random.Generator | None = None) -> PosteriorDraws:
    """Run one chain and return thinned post-burn-in draws.

    ``data`` is a RegressionDataset (forecast-only rows are dropped) or a
    ``(y, X)`` pair. Identical inputs and seed give identical draws.
    """
    y, X = states.as_arrays(data)
    if y.size == 0:
        raise InputError("dataset has no observed targets")
    T, K = X.shape
    if K != spec.K:
        raise InputError(f"model expects K={spec.K} regressors, data has {K}")
    rng = rng if rng is not None else stream(cfg.seed)
    p = init.copy() if init is not None else initial_parameters(spec, T, y)
    steps = shrinkage.new_steps(spec, cfg.mh_target_acceptance)
    sv_state = volatility.SvState(p.log_vol, p.log_vol0, p.mu_sigma, p.rho_sigma, p.theta2)

    n_keep = cfg.n_keep
    out_beta0 = np.empty((n_keep, K))
    out_sqrt_v = np.empty((n_keep, K))
    out_states = np.empty((n_keep, T, K))
    out_h = np.empty((n_keep, T))
    out_sc = {k: np.empty(n_keep) for k in SCALAR_FIELDS}
    out_vec = {k: np.empty((n_keep, K)) for k in ("tau2_v", "lambda_v", "tau2_beta", "lambda_beta")}

    kept = 0
    total = cfg.burn_in + cfg.n_draws
    for it in range(total):
        if it == cfg.burn_in:
            for s in steps.values():
                s.adapting = False
                s.accepted = s.proposed = 0
            sv_state.rho_accepted = sv_state.rho_proposed = 0
        p = sweep(p, y, X, spec, cfg, rng, steps, sv_state)
        if it % 200 == 0:
            _check_finite(p, it)
        post = it - cfg.burn_in
        if post >= 0 and (post + 1) % cfg.thin == 0 and kept < n_keep:
            out_beta0[kept] = p.beta0
            out_sqrt_v[kept] = p.sqrt_v
            out_states[kept] = p.states_tilde
            out_h[kept] = p.log_vol
            for k in SCALAR_FIELDS:
                out_sc[k][kept] = getattr(p, k)
            for k in out_vec:
                out_vec[k][kept] = getattr(p, k)
            kept += 1
    _check_finite(p, total)
    final = p

    acc ={k: s.rate for k, s in steps.items() if s.proposed}
    if sv_state.rho_proposed:
        acc["rho_sigma"] = sv_state.rho_accepted / sv_state.rho_proposed
    out = PosteriorDraws(
        beta0=out_beta0, sqrt_v=out_sqrt_v, states_tilde=out_states, log_vol=out_h,
        scalars=out_sc, vectors=out_vec, acceptance=acc, seed=int(cfg.seed),
        config={"sampler": asdict(cfg), "model": _spec_dict(spec)},
        columns=tuple(getattr(data, "columns", ()) or ()),
        origins=None if isinstance(data, tuple) else data.training().origins,
        final=final,
    )
    return out


def _spec_dict(spec: TvpSvModelSpec) -> dict:
    return json.loads(json.dumps(asdict(spec)))

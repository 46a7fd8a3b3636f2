"""Config-driven command-line front end.

Subcommands: reconstruct, mc-gram, mc-crossterm, convergence, leverage,
bounds.  Every run reads an optional JSON config (--config) whose fields the
command-line flags override, prints a JSON report to stdout, and writes CSV
and JSON artifacts next to --out when given.  Exit codes: 0 success, 2 config
or validation error, 3 numerical-accuracy failure.

Trial t of a Monte Carlo run uses seed base_seed + t, so identical configs
reproduce byte-identical outputs and trials can run in any order.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import fourier_legendre as fl
from .bounds import (
    BoundInputs,
    crossterm_sample_size,
    gram_sample_size,
    kfactor_sample_size,
)
from .errors import InputValidationError, NumericalAccuracyError
from .linalg import operator_norm
from .sampling import (
    FrameModel,
    build_frame_model,
    coherence_profile,
    cross_term_matrix,
    draw_samples,
    empirical_cross_term,
    empirical_gram,
    leverage_profile,
    range_stability_check,
    reconstruct,
)
from .serialize import dumps, fmt_real, model_from_dict

__all__ = ["main"]

COMMANDS = ("reconstruct", "mc-gram", "mc-crossterm", "convergence", "leverage", "bounds")

DEFAULTS = {
    "model": "identity:8",
    "target": None,
    "n": None,
    "m": None,
    "delta": 0.1,
    "epsilon": None,
    "trials": 100,
    "seed": 0,
    "p_spec": "leverage",
    "out": None,
}


# -- config handling ----------------------------------------------------------

def _load_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fp:
                loaded = json.load(fp)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputValidationError(f"cannot read config {args.config}: {exc}")
        if not isinstance(loaded, dict):
            raise InputValidationError("config must be a JSON object")
        unknown = set(loaded) - set(DEFAULTS) - {"command"}
        if unknown:
            raise InputValidationError(f"unknown config fields: {sorted(unknown)}")
        cfg.update(loaded)
    for key in ("out", "seed", "trials", "n", "m", "delta", "epsilon", "model", "target"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _parse_counts(value, *, name: str) -> list[int]:
    """A count or a strictly increasing sweep list ('4,8,12' or [4, 8, 12])."""
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
        value = [int(p) for p in parts] if len(parts) > 1 else int(parts[0])
    if isinstance(value, (int, float)):
        vals = [int(value)]
    else:
        vals = [int(v) for v in value]
    if not vals:
        raise InputValidationError(f"{name} sweep list is empty")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise InputValidationError(f"{name} sweep list must be strictly increasing")
    if any(v < 1 for v in vals):
        raise InputValidationError(f"{name} values must be >= 1")
    return vals


def _spec_to_dict(spec, *, name: str) -> dict:
    """Normalize 'kind:k=v,...' strings and dicts to one dict form."""
    if isinstance(spec, dict):
        return dict(spec)
    if not isinstance(spec, str):
        raise InputValidationError(f"{name} spec must be a string or object")
    kind, _, rest = spec.partition(":")
    out = {"kind": kind.strip()}
    if rest:
        parts = [p for p in rest.split(",") if p.strip()]
        if len(parts) == 1 and "=" not in parts[0]:
            out["value"] = parts[0].strip()
        else:
            for part in parts:
                key, eq, val = part.partition("=")
                if not eq:
                    raise InputValidationError(f"malformed {name} spec field {part!r}")
                out[key.strip()] = val.strip()
    return out


def _build_model(cfg: dict) -> tuple[FrameModel, dict]:
    spec = _spec_to_dict(cfg["model"], name="model")
    kind = spec.get("kind")
    if kind == "identity":
        dim = int(spec.get("dim", spec.get("value", 8)))
        if dim < 1:
            raise InputValidationError(f"identity model needs dim >= 1, got {dim}")
        eye = np.eye(dim, dtype=complex)
        return build_frame_model(eye, eye), {"kind": "identity", "dim": dim}
    if kind in ("fourier-legendre", "fl"):
        n = int(spec.get("n", spec.get("value", 10)))
        ambient = int(spec.get("ambient", 2001))
        j_count = int(spec.get("J", ambient))
        max_defect = float(spec.get("max_defect", 1e-2))
        model = fl.build_fl_model(n, j_count, ambient, max_defect=max_defect)
        return model, {
            "kind": "fourier-legendre",
            "n": n,
            "J": j_count,
            "ambient": ambient,
        }
    if kind == "custom":
        path = spec.get("path", spec.get("value"))
        if not path:
            raise InputValidationError("custom model spec needs a file path")
        try:
            with open(path, encoding="utf-8") as fp:
                data = json.load(fp)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputValidationError(f"cannot read model file {path}: {exc}")
        return model_from_dict(data), {"kind": "custom", "path": path}
    raise InputValidationError(f"unknown model kind {kind!r}")


def _build_target(cfg: dict) -> tuple[fl.AnalyticTarget | None, dict | None]:
    if cfg.get("target") is None:
        return None, None
    spec = _spec_to_dict(cfg["target"], name="target")
    kind = spec.get("kind")
    if kind == "exp_c":
        c = float(spec.get("c", spec.get("value", 1.0)))
        return fl.exp_target(c), {"kind": "exp_c", "c": c}
    if kind == "pole_a":
        a = float(spec.get("a", spec.get("value", 1.5)))
        return fl.pole_target(a), {"kind": "pole_a", "a": a}
    raise InputValidationError(f"unknown target kind {kind!r}")


def _target_ambient_coef(
    model: FrameModel, model_info: dict, target, cfg: dict
) -> np.ndarray:
    """Ambient coefficients of the function to reconstruct.

    Fourier-Legendre models require a target; other models default to the
    fixed unit vector with entries proportional to 1/(j+1).
    """
    if model_info["kind"] == "fourier-legendre":
        if target is None:
            raise InputValidationError("fourier-legendre models need a --target")
        return target.fourier_coef(fl.frequencies(model.ambient_dim))
    f = 1.0 / np.arange(1.0, model.ambient_dim + 1.0)
    return (f / np.linalg.norm(f)).astype(complex)


def _pick_n(cfg: dict, model: FrameModel, model_info: dict) -> int:
    if cfg.get("n") is not None:
        n = int(cfg["n"])
    elif model_info["kind"] == "fourier-legendre":
        n = model.num_reconstruction
    else:
        n = min(4, model.num_reconstruction)
    return n


# -- output helpers ------------------------------------------------------------

def _fmt_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt_real(float(value))
    return str(value)


def _csv_text(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fp:
        fp.write(text)


def _emit(report: dict, cfg: dict, csv_payload: tuple[list, list] | None = None) -> None:
    text = dumps(report)
    sys.stdout.write(text)
    out = cfg.get("out")
    if out:
        _write_text(f"{out}.json", text)
        if csv_payload is not None:
            header, rows = csv_payload
            _write_text(f"{out}.csv", _csv_text(header, rows))


def _wilson(successes: int, trials: int) -> tuple[float, float]:
    """Wilson 95% confidence interval for a binomial proportion."""
    z = 1.959963984540054
    if trials < 1:
        raise InputValidationError("Wilson interval needs trials >= 1")
    phat = successes / trials
    denom = 1.0 + z**2 / trials
    center = (phat + z**2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z**2 / (4 * trials**2)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def _prob_entry(successes: int, trials: int) -> dict:
    lo, hi = _wilson(successes, trials)
    return {
        "estimate": fmt_real(successes / trials),
        "trials": trials,
        "wilson95": [fmt_real(lo), fmt_real(hi)],
    }


# -- subcommand runners ----------------------------------------------------------

def run_reconstruct(cfg: dict) -> None:
    model, model_info = _build_model(cfg)
    target, target_info = _build_target(cfg)
    n = _pick_n(cfg, model, model_info)
    prof = leverage_profile(model, n, cfg.get("p_spec", "leverage"))
    m = int(cfg["m"]) if cfg.get("m") is not None else gram_sample_size(
        BoundInputs(n=n, delta=float(cfg["delta"])), "rate_onb"
    )
    f_coef = _target_ambient_coef(model, model_info, target, cfg)
    draw = draw_samples(prof, m, int(cfg["seed"]))
    rep = reconstruct(model, prof, draw, f_coef)
    stability = range_stability_check(prof, draw)

    report = {
        "command": "reconstruct",
        "model": model_info,
        "target": target_info,
        "n": n,
        "m": m,
        "seed": int(cfg["seed"]),
        "err_l2": fmt_real(rep.err_l2),
        "tail_err": fmt_real(rep.tail_err),
        "k_factor": fmt_real(rep.k_factor),
        "residual_weighted": fmt_real(rep.residual_weighted),
        "bound_ok": rep.bound_ok,
        "full_rank": not rep.used_pseudo_inverse,
        "range_stable": stability.equal,
        "gram_condition": (
            rep.gram_condition
            if isinstance(rep.gram_condition, str)
            else fmt_real(rep.gram_condition)
        ),
    }
    header = ["coef_index", "x_tilde_re", "x_tilde_im"]
    rows = [
        [k + 1, float(z.real), float(z.imag)] for k, z in enumerate(rep.x_tilde)
    ]
    _emit(report, cfg, (header, rows))


def run_montecarlo(cfg: dict, command: str) -> None:
    model, model_info = _build_model(cfg)
    target, target_info = _build_target(cfg)
    n = _pick_n(cfg, model, model_info)
    delta = float(cfg["delta"])
    trials = int(cfg["trials"])
    if trials < 1:
        raise InputValidationError("trials must be >= 1")
    prof = leverage_profile(model, n, cfg.get("p_spec", "leverage"))
    coh = coherence_profile(model, prof)
    m = int(cfg["m"]) if cfg.get("m") is not None else gram_sample_size(
        BoundInputs(n=n, delta=delta), "rate_onb"
    )
    eps = float(cfg["epsilon"]) if cfg.get("epsilon") is not None else prof.lambda0
    f_coef = _target_ambient_coef(model, model_info, target, cfg)
    c_limit = cross_term_matrix(model, prof)
    base_seed = int(cfg["seed"])

    rows = []
    gram_exceed = cross_exceed = full_rank_count = stable_count = bound_fail = 0
    for t in range(trials):
        seed = base_seed + t
        draw = draw_samples(prof, m, seed)
        rep = reconstruct(model, prof, draw, f_coef)
        gram_dev = operator_norm(empirical_gram(prof, draw) - prof.sigma)
        cross_dev = operator_norm(empirical_cross_term(model, prof, draw) - c_limit)
        stable = range_stability_check(prof, draw).equal
        full_rank = not rep.used_pseudo_inverse
        gram_exceed += gram_dev >= eps
        cross_exceed += cross_dev >= eps
        full_rank_count += full_rank
        stable_count += stable
        bound_fail += not rep.bound_ok
        rows.append(
            [t, seed, m, n, rep.err_l2, rep.tail_err, rep.k_factor,
             gram_dev, cross_dev, rep.bound_ok, full_rank, stable]
        )

    thresholds = {}
    inputs = BoundInputs(
        n=n, delta=delta, epsilon=min(eps, coh.sigma_norm),
        R=coh.R, R_double=coh.R_double, K_scale=coh.K_scale,
        sigma_norm=coh.sigma_norm, sigma_inv_norm=coh.sigma_inv_norm,
        trace_sigma=prof.trace_sigma,
    )
    thresholds["gram_explicit_eps"] = gram_sample_size(inputs, "explicit_eps")
    thresholds["gram_at_lambda0"] = gram_sample_size(inputs, "at_lambda0")
    thresholds["crossterm"] = crossterm_sample_size(inputs)

    report = {
        "command": command,
        "model": model_info,
        "target": target_info,
        "n": n,
        "m": m,
        "delta": fmt_real(delta),
        "epsilon": fmt_real(eps),
        "trials": trials,
        "base_seed": base_seed,
        "p_gram_dev_ge_eps": _prob_entry(gram_exceed, trials),
        "p_cross_dev_ge_eps": _prob_entry(cross_exceed, trials),
        "full_rank_frequency": _prob_entry(full_rank_count, trials),
        "range_stable_frequency": _prob_entry(stable_count, trials),
        "bound_violations": bound_fail,
        "sample_size_thresholds": thresholds,
    }
    header = [
        "trial_index", "seed", "m", "n", "err_l2", "tail_err", "k_factor",
        "gram_dev", "cross_dev", "bound_ok", "full_rank", "range_stable",
    ]
    _emit(report, cfg, (header, rows))


def run_convergence(cfg: dict) -> None:
    n_list = _parse_counts(cfg.get("n") or [4, 8, 12, 16, 20], name="n")
    if len(n_list) < 4:
        raise InputValidationError("convergence sweep needs at least 4 n values")
    delta = float(cfg["delta"])
    trials = int(cfg["trials"]) if cfg.get("trials") else 20
    if cfg.get("target") is None:
        cfg = dict(cfg, target="pole_a:1.5")
    target, target_info = _build_target(cfg)
    if cfg.get("model") == DEFAULTS["model"]:
        cfg = dict(cfg, model=f"fl:n={max(n_list)}")
    model, model_info = _build_model(cfg)
    if model_info["kind"] != "fourier-legendre":
        raise InputValidationError("convergence sweeps require a fourier-legendre model")
    if max(n_list) > model.num_reconstruction:
        raise InputValidationError(
            f"sweep max n={max(n_list)} exceeds model degrees {model.num_reconstruction}"
        )
    f_coef = _target_ambient_coef(model, model_info, target, cfg)
    base_seed = int(cfg["seed"])

    rows = []
    medians = []
    for n in n_list:
        prof = leverage_profile(model, n, cfg.get("p_spec", "leverage"))
        m = int(cfg["m"]) if cfg.get("m") is not None else gram_sample_size(
            BoundInputs(n=n, delta=delta), "rate_onb"
        )
        errs = []
        for t in range(trials):
            draw = draw_samples(prof, m, base_seed + t)
            errs.append(reconstruct(model, prof, draw, f_coef).err_l2)
        med = float(np.median(errs))
        medians.append(med)
        rows.append([n, m, trials, med, float(np.min(errs)), float(np.max(errs))])

    log_med = np.log(np.maximum(medians, 1e-300))
    slope, intercept = np.polyfit(np.asarray(n_list, dtype=float), log_med, 1)
    report = {
        "command": "convergence",
        "model": model_info,
        "target": target_info,
        "n_sweep": n_list,
        "delta": fmt_real(delta),
        "trials": trials,
        "base_seed": base_seed,
        "median_err": [fmt_real(v) for v in medians],
        "fit_slope": fmt_real(float(slope)),
        "fit_intercept": fmt_real(float(intercept)),
    }
    header = ["n", "m", "trials", "median_err", "min_err", "max_err"]
    _emit(report, cfg, (header, rows))


def run_leverage(cfg: dict) -> None:
    model, model_info = _build_model(cfg)
    n = _pick_n(cfg, model, model_info)
    prof = leverage_profile(model, n, cfg.get("p_spec", "leverage"))
    vn2 = np.sum(np.abs(prof.v) ** 2, axis=0).real
    cum = np.cumsum(prof.p)
    is_fl = model_info["kind"] == "fourier-legendre"
    freqs = fl.frequencies(prof.num_indices) if is_fl else None
    rows = []
    for j in range(prof.num_indices):
        sigma_j = int(freqs[j]) if is_fl else j + 1
        rows.append([j + 1, sigma_j, float(vn2[j]), float(prof.p[j]), float(cum[j])])
    report = {
        "command": "leverage",
        "model": model_info,
        "n": n,
        "num_indices": prof.num_indices,
        "trace_sigma": fmt_real(prof.trace_sigma),
        "lambda0": fmt_real(prof.lambda0),
        "tail_mass": fmt_real(prof.tail_mass),
        "distribution_id": prof.distribution_id,
    }
    header = ["index", "frequency", "v_norm_sq", "p", "cumulative_p"]
    _emit(report, cfg, (header, rows))


def run_bounds(cfg: dict) -> None:
    model, model_info = _build_model(cfg)
    n = _pick_n(cfg, model, model_info)
    delta = float(cfg["delta"])
    prof = leverage_profile(model, n, cfg.get("p_spec", "leverage"))
    coh = coherence_profile(model, prof)
    eps = float(cfg["epsilon"]) if cfg.get("epsilon") is not None else prof.lambda0
    d_upper = model.declared_bounds[3] if model.declared_bounds else coh.sigma_norm
    inputs = BoundInputs(
        n=n, delta=delta, epsilon=eps,
        R=coh.R, R_prime=coh.R_prime, R_double=coh.R_double, K_scale=coh.K_scale,
        sigma_norm=coh.sigma_norm, sigma_inv_norm=coh.sigma_inv_norm,
        trace_sigma=prof.trace_sigma, Lambda=coh.Lambda, D_riesz_upper=d_upper,
    )

    thresholds = {}

    def attempt(name, fn):
        try:
            thresholds[name] = fn()
        except InputValidationError as exc:
            thresholds[name] = {"error": str(exc)}

    attempt("gram_explicit_eps", lambda: gram_sample_size(inputs, "explicit_eps"))
    attempt("gram_at_lambda0", lambda: gram_sample_size(inputs, "at_lambda0"))
    attempt("gram_rate_Rlogn", lambda: gram_sample_size(inputs, "rate_Rlogn"))
    attempt("gram_rate_leverage", lambda: gram_sample_size(inputs, "rate_leverage"))
    attempt("gram_rate_onb", lambda: gram_sample_size(inputs, "rate_onb"))
    attempt("crossterm", lambda: crossterm_sample_size(inputs))
    attempt("kfactor_riesz", lambda: kfactor_sample_size(inputs, "riesz"))
    attempt("kfactor_frames", lambda: kfactor_sample_size(inputs, "frames"))

    report = {
        "command": "bounds",
        "model": model_info,
        "n": n,
        "delta": fmt_real(delta),
        "epsilon": fmt_real(eps),
        "inputs": {
            "R": fmt_real(coh.R),
            "R_prime": fmt_real(coh.R_prime),
            "R_double": fmt_real(coh.R_double),
            "K_scale": fmt_real(coh.K_scale),
            "sigma_norm": fmt_real(coh.sigma_norm),
            "sigma_inv_norm": fmt_real(coh.sigma_inv_norm),
            "trace_sigma": fmt_real(prof.trace_sigma),
            "Lambda": fmt_real(coh.Lambda),
            "C_norm": fmt_real(coh.C_norm),
            "D_riesz_upper": fmt_real(d_upper),
            "lambda0": fmt_real(prof.lambda0),
        },
        "thresholds": thresholds,
    }
    _emit(report, cfg)


# -- entry point --------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochsamp",
        description="Stochastic generalized sampling experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", default=None)
        cmd.add_argument("--out", default=None)
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--trials", type=int, default=None)
        cmd.add_argument("--n", default=None)
        cmd.add_argument("--m", type=int, default=None)
        cmd.add_argument("--delta", type=float, default=None)
        cmd.add_argument("--epsilon", type=float, default=None)
        cmd.add_argument("--model", default=None)
        cmd.add_argument("--target", default=None)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        command = args.command
        if command == "reconstruct":
            run_reconstruct(cfg)
        elif command in ("mc-gram", "mc-crossterm"):
            run_montecarlo(cfg, command)
        elif command == "convergence":
            run_convergence(cfg)
        elif command == "leverage":
            run_leverage(cfg)
        else:
            run_bounds(cfg)
    except NumericalAccuracyError as exc:
        print(f"numerical accuracy failure: {exc}", file=sys.stderr)
        return 3
    except (InputValidationError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

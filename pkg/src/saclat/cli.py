"""Command-line pipelines composing the library.

Subcommands: fit-rate, predict, simulate, detect, dual-fit, fairness,
fov-sweep. Every command writes machine-parseable output (JSON or CSV) to
--out or stdout and human-readable progress to stderr (silenced by
--quiet). Exit codes: 0 success, 2 usage or input-schema error, 3
numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import ddm, dual, features, gaze, latency, rbf, stats, wald

__all__ = ["main", "console_main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULT_PRO_MEAN_MS = 282.0  # professional-player mean anchoring ms conversion


class SchemaError(ValueError):
    """Bad input file shape or contents."""


class NumericalError(RuntimeError):
    """Fit or prediction failed numerically."""


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


def _emit_text(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, doc) -> None:
    _emit_text(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(str(c) for c in row) for row in rows)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# model document


def _load_model(path) -> tuple[rbf.RBFNetwork, Optional[latency.TaskDescription]]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read model {path}: {e}") from None
    try:
        net = rbf.from_json_dict(doc)
    except (ValueError, TypeError) as e:
        raise SchemaError(f"bad network in {path}: {e}") from None
    task = None
    if "calibration" in doc:
        cal = doc["calibration"]
        try:
            task = latency.TaskDescription(
                task_id=str(cal["task_id"]),
                alpha=float(cal["alpha"]),
                nu_rescale=float(cal["nu_rescale"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"bad calibration block in {path}: {e}") from None
    return net, task


def _model_doc(net, task=None, training=None) -> dict:
    doc = rbf.to_json_dict(net)
    if task is not None:
        doc["calibration"] = {
            "task_id": task.task_id,
            "alpha": task.alpha,
            "nu_rescale": task.nu_rescale,
        }
    if training is not None:
        doc["training"] = training
    return doc


# ---------------------------------------------------------------------------
# fit-rate


def cmd_fit_rate(args) -> int:
    try:
        data = latency.load_dataset_csv(args.trials)
    except (OSError, ValueError) as e:
        raise SchemaError(str(e)) from None
    if args.pedestal not in data.conditions():
        raise SchemaError(f"pedestal condition {args.pedestal!r} not present in {args.trials}")
    normalized = latency.normalize_dataset(data, args.pedestal)
    if args.normalized_out:
        latency.write_dataset_csv(normalized, args.normalized_out)

    labels = latency.condition_rate_labels(normalized)
    pairs = [labels[c] for c in sorted(labels)]
    cfg = rbf.TrainConfig(
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        n_centers=args.centers,
        seed=args.seed,
    )
    _say(args, f"training on {len(pairs)} conditions ({len(data.records)} trials)")
    try:
        result = rbf.train(pairs, cfg)
    except ArithmeticError as e:
        raise NumericalError(str(e)) from None

    ped_features = normalized.condition_features(args.pedestal)
    ped_latencies = normalized.latencies(condition_id=args.pedestal, normalized=True)
    task, _ = latency.calibrate(
        ped_latencies, result.network, ped_features, task_id=args.task_id
    )

    training = {
        "seed": cfg.seed,
        "epochs": cfg.epochs,
        "learning_rate": cfg.learning_rate,
        "n_centers": cfg.n_centers,
        "initial_mse": result.initial_mse,
        "final_mse": result.final_mse,
        "n_conditions": len(pairs),
        "pedestal_condition": args.pedestal,
    }
    _emit_json(args, _model_doc(result.network, task, training))
    _say(args, f"final mse {result.final_mse:.3e} (from {result.initial_mse:.3e})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# predict


def _calibration_from_csv(path, net):
    try:
        data = latency.load_dataset_csv(path)
    except (OSError, ValueError) as e:
        raise SchemaError(str(e)) from None
    conds = data.conditions()
    if len(conds) != 1:
        raise SchemaError(f"calibration sample must hold one condition, found {len(conds)}")
    lat = data.latencies(condition_id=conds[0])
    return latency.calibrate(lat, net, data.condition_features(conds[0]), task_id=conds[0])[0]


def cmd_predict(args) -> int:
    net, stored_task = _load_model(args.model)
    if args.calibrate:
        task = _calibration_from_csv(args.calibrate, net)
    elif args.alpha is not None:
        rescale = stored_task.nu_rescale if stored_task is not None else 1.0
        task = latency.TaskDescription(task_id="cli", alpha=args.alpha, nu_rescale=rescale)
    elif stored_task is not None:
        task = stored_task
    else:
        _say(args, "model has no calibration block; using alpha=1, rescale=1")
        task = latency.TaskDescription(task_id="uncalibrated", alpha=1.0)

    x = rbf.StimulusFeatures(
        contrast=args.contrast, frequency=args.frequency, eccentricity=args.eccentricity
    )
    try:
        params = latency.predict(task, x, net)
    except latency.OutOfDomainError as e:
        raise NumericalError(f"out-of-domain prediction: {e}") from None

    levels = _parse_levels(args.quantiles)
    doc = {
        "alpha": params.alpha,
        "nu": params.nu,
        "mean": wald.mean(params),
        "variance": wald.variance(params),
        "quantiles": {repr(lv): wald.quantile(lv, params) for lv in levels},
        "task_id": task.task_id,
    }
    _emit_json(args, doc)
    _say(args, f"mean latency {doc['mean']:.6g} (alpha={params.alpha:.4g}, nu={params.nu:.4g})")
    return EXIT_OK


def _parse_levels(spec: str) -> list[float]:
    try:
        levels = [float(s) for s in spec.split(",") if s.strip()]
    except ValueError:
        raise SchemaError(f"bad quantile list {spec!r}") from None
    if not levels or any(not 0.0 < lv < 1.0 for lv in levels):
        raise SchemaError("quantile levels must lie strictly between 0 and 1")
    return sorted(levels)


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    p = wald.IGParams(alpha=args.alpha, nu=args.nu)
    max_time = args.max_time if args.max_time is not None else 20.0 * wald.mean(p)
    cfg = ddm.SimConfig(dt=args.dt, max_time=max_time, seed=args.seed)
    result = ddm.simulate_ensemble(p, cfg, args.n)
    rows = [(i, repr(float(t))) for i, t in enumerate(result.times)]
    _emit_text(args, _csv_text(["sample_id", "t"], rows))
    _say(
        args,
        f"{result.times.size} passages, {result.n_censored} censored "
        f"(fraction {result.censored_fraction:.3g})",
    )
    if args.analytic and result.times.size:
        rng = np.random.default_rng(np.random.SeedSequence(args.seed).spawn(args.n + 1)[-1])
        analytic = wald.sample(p, rng, size=args.n)
        d, pval = stats.ks_two_sample(result.times, analytic)
        print(f"ks_d={d!r} ks_p={pval!r}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# detect


def cmd_detect(args) -> int:
    try:
        traces = gaze.load_gaze_csv(args.gaze)
        trials = gaze.load_trials_csv(args.trials)
    except (OSError, ValueError) as e:
        raise SchemaError(str(e)) from None
    rows = []
    n_ok = n_none = n_anticipatory = 0
    for trial_id in sorted(trials):
        if trial_id not in traces:
            rows.append((trial_id, "", "no_trace"))
            continue
        try:
            event, dropped = gaze.primary_saccade(
                traces[trial_id],
                trials[trial_id],
                tolerance=args.tolerance,
                lambda_mult=args.lambda_mult,
                min_duration=args.min_duration,
            )
        except ValueError:
            rows.append((trial_id, "", "onset_outside_trace"))
            continue
        n_anticipatory += dropped
        if event is None:
            rows.append((trial_id, "", "no_saccade"))
            n_none += 1
        else:
            latency_ms = (event.onset_time - trials[trial_id].stimulus_onset) * 1000.0
            rows.append((trial_id, repr(latency_ms), "ok"))
            n_ok += 1
    _emit_text(args, _csv_text(["trial_id", "latency_ms", "status"], rows))
    _say(args, f"{n_ok} ok, {n_none} without saccade, {n_anticipatory} anticipatory dropped")
    return EXIT_OK


# ---------------------------------------------------------------------------
# dual-fit


def _load_dual_trials(path, net, args) -> np.ndarray:
    rows = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            fields = reader.fieldnames or []
            if "t_norm" not in fields:
                raise SchemaError(f"{path}: missing t_norm column")
            by_rate = "nu_f" in fields and "nu_p" in fields
            by_contrast = "c_f" in fields and "c_p" in fields
            if not by_rate and not by_contrast:
                raise SchemaError(f"{path}: need nu_f/nu_p or c_f/c_p columns")
            if not by_rate and net is None:
                raise SchemaError("contrast columns need --model to resolve rates")
            for i, row in enumerate(reader, start=2):
                try:
                    t = float(row["t_norm"])
                    if by_rate:
                        nu_f, nu_p = float(row["nu_f"]), float(row["nu_p"])
                    else:
                        nu_f = rbf.evaluate(
                            net,
                            rbf.StimulusFeatures(
                                contrast=float(row["c_f"]),
                                frequency=args.frequency,
                                eccentricity=args.fovea_ecc,
                            ),
                        )
                        nu_p = rbf.evaluate(
                            net,
                            rbf.StimulusFeatures(
                                contrast=float(row["c_p"]),
                                frequency=args.frequency,
                                eccentricity=args.periph_ecc,
                            ),
                        )
                    rows.append((t, nu_f, nu_p))
                except (TypeError, ValueError) as e:
                    raise SchemaError(f"{path}: bad trial on line {i}: {e}") from None
    except OSError as e:
        raise SchemaError(str(e)) from None
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def _model_vs_data_ks(t_obs, per_trial_sampler, reps: int, rng) -> tuple[float, float]:
    """Two-sample K-S between observations and draws from the fitted law,
    ``reps`` per trial to steady the model side."""
    predicted = np.concatenate([per_trial_sampler(rng) for _ in range(reps)])
    return stats.ks_two_sample(t_obs, predicted)


def cmd_dual_fit(args) -> int:
    net = None
    if args.model:
        net, _ = _load_model(args.model)
    trials = _load_dual_trials(args.trials, net, args)
    try:
        fit = dual.fit_dual_thresholds(trials)
    except ValueError as e:
        raise SchemaError(str(e)) from None
    _say(
        args,
        f"alpha_f={fit.alpha_f:.4f} alpha_p={fit.alpha_p:.4f} "
        f"loglik={fit.log_likelihood:.2f} converged={fit.converged}",
    )

    t_obs, nu_f, nu_p = trials[:, 0], trials[:, 1], trials[:, 2]
    doc = {
        "alpha_f": fit.alpha_f,
        "alpha_p": fit.alpha_p,
        "log_likelihood": fit.log_likelihood,
        "converged": fit.converged,
        "n_trials": int(trials.shape[0]),
    }
    if args.baseline:
        rng = np.random.default_rng(args.seed)

        def draw_dual(r):
            tf = _draw_heterogeneous(fit.alpha_f, nu_f, r)
            tp = _draw_heterogeneous(fit.alpha_p, nu_p, r)
            return np.maximum(tf, tp)

        alpha_single_f, _, _ = dual.fit_single_threshold(t_obs, nu_f)
        alpha_single_p, _, _ = dual.fit_single_threshold(t_obs, nu_p)
        d_dual, p_dual = _model_vs_data_ks(t_obs, draw_dual, args.pred_reps, rng)
        d_f, p_f = _model_vs_data_ks(
            t_obs, lambda r: _draw_heterogeneous(alpha_single_f, nu_f, r), args.pred_reps, rng
        )
        d_p, p_p = _model_vs_data_ks(
            t_obs, lambda r: _draw_heterogeneous(alpha_single_p, nu_p, r), args.pred_reps, rng
        )
        doc["baseline"] = {
            "dual": {"ks_d": d_dual, "ks_p": p_dual},
            "fovea_only": {"alpha": alpha_single_f, "ks_d": d_f, "ks_p": p_f},
            "periphery_only": {"alpha": alpha_single_p, "ks_d": d_p, "ks_p": p_p},
        }
        _say(
            args,
            f"model-vs-data KS p: dual {p_dual:.3g}, fovea-only {p_f:.3g}, "
            f"periphery-only {p_p:.3g}",
        )
    _emit_json(args, doc)
    return EXIT_OK if fit.converged else EXIT_NUMERICAL


def _draw_heterogeneous(alpha: float, nus: np.ndarray, rng) -> np.ndarray:
    """One draw per trial from IG(alpha, nu_i)."""
    out = np.empty(nus.size, dtype=float)
    for nu_value in np.unique(nus):
        mask = nus == nu_value
        out[mask] = wald.sample(
            wald.IGParams(alpha=alpha, nu=float(nu_value)), rng, size=int(mask.sum())
        )
    return out


# ---------------------------------------------------------------------------
# fairness / fov-sweep shared target handling


@dataclass(frozen=True)
class _Target:
    frame_id: str
    team: str
    contrast: float
    f_display_cpcm: float  # on-screen cycles/cm; retinal value is geometry-dependent
    offset_cm: float  # radial distance of bbox center from screen center


def _display_from_args(args) -> features.DisplayConfig:
    if (args.fov_deg is None) == (args.distance_cm is None):
        raise SchemaError("give exactly one of --fov-deg / --distance-cm")
    return features.DisplayConfig(
        width_cm=args.width_cm,
        width_px=args.width_px,
        height_px=args.height_px,
        fov_deg=args.fov_deg,
        distance_cm=args.distance_cm,
    )


def _load_targets(path, cfg: features.DisplayConfig) -> list[_Target]:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read targets {path}: {e}") from None
    if not isinstance(raw, list) or not raw:
        raise SchemaError(f"{path}: expected a non-empty JSON array of targets")
    pitch = cfg.pixel_pitch_cm
    out = []
    for i, item in enumerate(raw):
        try:
            x, y, w, h = (float(v) for v in item["bbox"])
            if w <= 0 or h <= 0 or x < 0 or y < 0:
                raise ValueError(f"bad bbox {item['bbox']}")
            if x + w > cfg.width_px or y + h > cfg.height_px:
                raise ValueError(f"bbox {item['bbox']} exceeds {cfg.width_px}x{cfg.height_px}")
            lum_t = float(item["target_mean_luminance"])
            lum_b = float(item["background_luminance"])
            if not (0 <= lum_t <= 1 and 0 <= lum_b <= 1):
                raise ValueError("luminances must lie in [0, 1]")
            contrast = features.weber_contrast(lum_t, lum_b)

            cx_cm = (x + w / 2.0 - cfg.width_px / 2.0) * pitch
            cy_cm = (y + h / 2.0 - cfg.height_px / 2.0) * pitch
            offset = math.hypot(cx_cm, cy_cm)

            if "frequency_display_cpcm" in item:
                f_disp = float(item["frequency_display_cpcm"])
            elif "patch" in item:
                patch = features.LuminancePatch(
                    pixels=features.read_pgm(item["patch"]), pixel_pitch_cm=pitch
                )
                f_disp = features.dominant_band_frequency(patch)
            elif "frequency_cpd" in item:
                # Retinal value given at the reference geometry; back-project
                # so it can re-enter the geometry at other fields of view.
                ecc = features.screen_pos_to_eccentricity(offset, cfg)
                f_disp = features.retinal_to_display_frequency(
                    float(item["frequency_cpd"]), ecc, cfg
                )
            else:
                raise ValueError(
                    "target needs frequency_display_cpcm, frequency_cpd, or patch"
                )
            if f_disp <= 0:
                raise ValueError("frequency must be > 0")
            out.append(
                _Target(
                    frame_id=str(item["frame_id"]),
                    team=str(item["team"]),
                    contrast=contrast,
                    f_display_cpcm=f_disp,
                    offset_cm=offset,
                )
            )
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"{path}: bad target at index {i}: {e}") from None
    return out


def _predict_target_mean(tg: _Target, cfg, net, task) -> float:
    ecc = features.screen_pos_to_eccentricity(tg.offset_cm, cfg)
    f_ret = features.display_to_retinal_frequency(tg.f_display_cpcm, ecc, cfg)
    x = rbf.StimulusFeatures(contrast=tg.contrast, frequency=f_ret, eccentricity=ecc)
    try:
        params = latency.predict(task, x, net)
    except latency.OutOfDomainError as e:
        raise NumericalError(
            f"frame {tg.frame_id} team {tg.team}: out-of-domain prediction: {e}"
        ) from None
    return wald.mean(params)


def _task_for_targets(args, stored_task) -> latency.TaskDescription:
    if args.alpha is not None:
        rescale = stored_task.nu_rescale if stored_task is not None else 1.0
        return latency.TaskDescription(task_id="cli", alpha=args.alpha, nu_rescale=rescale)
    if stored_task is not None:
        return stored_task
    return latency.TaskDescription(task_id="uncalibrated", alpha=1.0)


def _team_frame_means(targets, cfg, net, task):
    """Per-(team, frame) mean predicted latency, plus flat per-team values."""
    per_team_frame: dict[str, dict[str, list[float]]] = {}
    for tg in targets:
        mean_norm = _predict_target_mean(tg, cfg, net, task)
        per_team_frame.setdefault(tg.team, {}).setdefault(tg.frame_id, []).append(mean_norm)
    return {
        team: {frame: float(np.mean(vals)) for frame, vals in frames.items()}
        for team, frames in per_team_frame.items()
    }


def cmd_fairness(args) -> int:
    net, stored_task = _load_model(args.model)
    task = _task_for_targets(args, stored_task)
    cfg = _display_from_args(args)
    targets = _load_targets(args.targets, cfg)
    teams = sorted({t.team for t in targets})
    if len(teams) < 2:
        raise SchemaError(f"fairness needs >= 2 teams, found {teams}")

    frame_means = _team_frame_means(targets, cfg, net, task)
    all_means = [m for frames in frame_means.values() for m in frames.values()]
    pooled = float(np.mean(all_means))
    ms_scale = args.mean_latency_ms / pooled

    team_stats = {}
    groups = []
    for team in teams:
        vals = np.array(sorted(frame_means[team].values()), dtype=float)
        if vals.size < 2:
            raise SchemaError(f"team {team!r} appears in fewer than 2 frames")
        groups.append(vals)
        se = float(vals.std(ddof=1) / np.sqrt(vals.size))
        team_stats[team] = {
            "mean_norm": float(vals.mean()),
            "se_norm": se,
            "mean_ms": float(vals.mean()) * ms_scale,
            "se_ms": se * ms_scale,
            "n_frames": int(vals.size),
            "n_targets": sum(1 for t in targets if t.team == team),
        }
    f_stat, p_val = stats.one_way_anova(groups)
    means = {team: team_stats[team]["mean_norm"] for team in teams}
    fastest = min(means, key=means.get)
    slowest = max(means, key=means.get)
    gap = (means[slowest] - means[fastest]) / means[fastest] * 100.0

    per_frame = sorted(
        (frame, team, mean)
        for team, frames in frame_means.items()
        for frame, mean in frames.items()
    )
    doc = {
        "teams": team_stats,
        "anova": {"f": f_stat, "p": p_val},
        "gap_percent": gap,
        "fastest_team": fastest,
        "slowest_team": slowest,
        "ms_anchor": args.mean_latency_ms,
        "per_frame": [
            {"frame_id": fr, "team": tm, "mean_norm": mn, "mean_ms": mn * ms_scale}
            for fr, tm, mn in per_frame
        ],
    }
    _emit_json(args, doc)
    _say(
        args,
        f"gap {gap:.2f}% ({slowest} slower than {fastest}); ANOVA F={f_stat:.3g} p={p_val:.3g}",
    )
    return EXIT_OK


def cmd_fov_sweep(args) -> int:
    net, stored_task = _load_model(args.model)
    task = _task_for_targets(args, stored_task)
    base_cfg = _display_from_args(args)
    targets = _load_targets(args.targets, base_cfg)
    teams = sorted({t.team for t in targets})
    if not (0.0 < args.fov_min < args.fov_max < 180.0):
        raise SchemaError("need 0 < --fov-min < --fov-max < 180")
    if args.steps < 2:
        raise SchemaError("--steps must be >= 2")

    # ms anchor is pinned at the reference geometry so curves share a scale.
    base_means = _team_frame_means(targets, base_cfg, net, task)
    pooled = float(np.mean([m for fr in base_means.values() for m in fr.values()]))
    ms_scale = args.mean_latency_ms / pooled

    def cfg_at(fov: float) -> features.DisplayConfig:
        return features.DisplayConfig(
            width_cm=base_cfg.width_cm,
            width_px=base_cfg.width_px,
            height_px=base_cfg.height_px,
            fov_deg=fov,
        )

    def team_means_at(fov: float) -> dict[str, float]:
        fm = _team_frame_means(targets, cfg_at(fov), net, task)
        return {team: float(np.mean(list(fm[team].values()))) for team in teams}

    grid = np.linspace(args.fov_min, args.fov_max, args.steps)
    curves = {team: [] for team in teams}
    rows = []
    for fov in grid:
        tm = team_means_at(float(fov))
        for team in teams:
            curves[team].append(tm[team])
            rows.append(
                {
                    "fov_deg": float(fov),
                    "team": team,
                    "mean_norm": tm[team],
                    "mean_ms": tm[team] * ms_scale,
                }
            )

    argmin = {}
    for team in teams:
        arr = np.asarray(curves[team])
        k = int(np.argmin(arr))
        argmin[team] = {
            "fov_deg": float(grid[k]),
            "mean_norm": float(arr[k]),
            "mean_ms": float(arr[k]) * ms_scale,
            "distance_diopters": features.cm_to_diopters(
                features.fov_to_distance(base_cfg.width_cm, float(grid[k]))
            ),
        }

    crossings = None
    if len(teams) == 2:
        crossings = _find_crossings(grid, curves[teams[0]], curves[teams[1]], team_means_at, teams)
        for c in crossings if isinstance(crossings, list) else []:
            c["mean_ms"] = c["mean_norm"] * ms_scale

    doc = {"rows": rows, "argmin": argmin, "crossings": crossings, "teams": teams}
    _emit_json(args, doc)
    best = ", ".join(f"{t}: {argmin[t]['fov_deg']:.2f} deg" for t in teams)
    _say(args, f"best FoV per team: {best}")
    return EXIT_OK


def _find_crossings(grid, c0, c1, team_means_at, teams):
    """Sign-change bisection on the mean-latency difference between two teams."""
    diff = np.asarray(c0) - np.asarray(c1)
    if np.all(np.abs(diff) < 1e-12):
        return "degenerate"

    def diff_at(fov: float) -> float:
        tm = team_means_at(fov)
        return tm[teams[0]] - tm[teams[1]]

    out = []
    for i in range(diff.size - 1):
        a, b = float(grid[i]), float(grid[i + 1])
        fa, fb = float(diff[i]), float(diff[i + 1])
        if fa == 0.0:
            out.append({"fov_deg": a, "mean_norm": float(np.asarray(c0)[i])})
            continue
        if fa * fb < 0.0:
            for _ in range(60):
                mid = 0.5 * (a + b)
                fm = diff_at(mid)
                if fa * fm <= 0.0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
            fov_cross = 0.5 * (a + b)
            tm = team_means_at(fov_cross)
            out.append({"fov_deg": fov_cross, "mean_norm": tm[teams[0]]})
    return out


# ---------------------------------------------------------------------------
# parser


def _add_common(sp) -> None:
    sp.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    sp.add_argument("--quiet", action="store_true", help="suppress stderr summary")
    sp.add_argument("--out", default=None, help="output path (default stdout)")


def _add_display_args(sp) -> None:
    sp.add_argument("--width-cm", type=float, required=True, help="physical display width")
    sp.add_argument("--width-px", type=int, required=True)
    sp.add_argument("--height-px", type=int, required=True)
    sp.add_argument("--fov-deg", type=float, default=None, help="horizontal field of view")
    sp.add_argument("--distance-cm", type=float, default=None, help="eye-display distance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saclat", description="Saccade latency modeling pipelines"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fit-rate", help="normalize trials and fit the rate surface")
    sp.add_argument("trials", help="trial CSV")
    sp.add_argument("--pedestal", required=True, help="condition_id of the pedestal")
    sp.add_argument("--epochs", type=int, default=2000)
    sp.add_argument("--learning-rate", type=float, default=0.1)
    sp.add_argument("--centers", type=int, default=20)
    sp.add_argument("--task-id", default="fitted")
    sp.add_argument("--normalized-out", default=None, help="also write the normalized CSV here")
    _add_common(sp)
    sp.set_defaults(func=cmd_fit_rate)

    sp = sub.add_parser("predict", help="latency distribution for one stimulus")
    sp.add_argument("--model", required=True)
    sp.add_argument("--contrast", type=float, required=True)
    sp.add_argument("--frequency", type=float, required=True, help="cycles/degree")
    sp.add_argument("--eccentricity", type=float, required=True, help="degrees")
    sp.add_argument("--alpha", type=float, default=None, help="override threshold")
    sp.add_argument("--calibrate", default=None, help="single-condition latency CSV")
    sp.add_argument("--quantiles", default="0.05,0.25,0.5,0.75,0.95")
    _add_common(sp)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("simulate", help="first-passage walks vs the closed form")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--nu", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--dt", type=float, default=1e-4)
    sp.add_argument("--max-time", type=float, default=None, help="default 20 * mean")
    sp.add_argument("--analytic", action="store_true", help="also report two-sample K-S")
    _add_common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("detect", help="extract per-trial saccade latencies")
    sp.add_argument("gaze", help="gaze CSV (trial_id, t_ms, x_deg, y_deg)")
    sp.add_argument("trials", help="trial CSV (onset and geometry)")
    sp.add_argument("--tolerance", type=float, default=3.0, help="origin/target match, degrees")
    sp.add_argument("--lambda-mult", type=float, default=6.0)
    sp.add_argument("--min-duration", type=int, default=3)
    _add_common(sp)
    sp.set_defaults(func=cmd_detect)

    sp = sub.add_parser("dual-fit", help="fit foveal/peripheral thresholds by MLE")
    sp.add_argument("trials", help="CSV with t_norm and nu_f/nu_p or c_f/c_p")
    sp.add_argument("--model", default=None, help="rate model for contrast columns")
    sp.add_argument("--frequency", type=float, default=2.0, help="cycles/degree of the patches")
    sp.add_argument("--fovea-ecc", type=float, default=0.0)
    sp.add_argument("--periph-ecc", type=float, default=10.0)
    sp.add_argument("--baseline", action=argparse.BooleanOptionalAction, default=True,
                    help="include single-accumulator K-S comparison")
    sp.add_argument("--pred-reps", type=int, default=5,
                    help="model draws per trial for the K-S comparison")
    _add_common(sp)
    sp.set_defaults(func=cmd_dual_fit)

    sp = sub.add_parser("fairness", help="per-team predicted latency report")
    sp.add_argument("targets", help="targets JSON")
    sp.add_argument("--model", required=True)
    sp.add_argument("--alpha", type=float, default=None, help="override threshold")
    sp.add_argument("--mean-latency-ms", type=float, default=DEFAULT_PRO_MEAN_MS)
    _add_display_args(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_fairness)

    sp = sub.add_parser("fov-sweep", help="latency curves across fields of view")
    sp.add_argument("targets", help="targets JSON")
    sp.add_argument("--model", required=True)
    sp.add_argument("--alpha", type=float, default=None, help="override threshold")
    sp.add_argument("--mean-latency-ms", type=float, default=DEFAULT_PRO_MEAN_MS)
    sp.add_argument("--fov-min", type=float, required=True)
    sp.add_argument("--fov-max", type=float, required=True)
    sp.add_argument("--steps", type=int, default=50)
    _add_display_args(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_fov_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else EXIT_OK
    try:
        return args.func(args)
    except (NumericalError, ArithmeticError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()

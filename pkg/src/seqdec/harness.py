"""Experiment driver: bound curves, Monte Carlo complexity curves,
prefactor tables, CSV emission, and a cross-module validation suite.

Reproducibility contract: trial t of a run draws everything (information
bits, then noise) from its own stream seeded with seed XOR t, and
results are reduced in trial order.  Outputs are therefore byte-identical
for a fixed config regardless of the worker count.
"""

import csv
import io
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from seqdec import bounds
from seqdec.bounds import BERRY_ESSEEN, CHERNOFF, db_to_linear
from seqdec.channel import ChannelConfig, llr, transmit
from seqdec.codes import (
    BlockCode,
    ConvCode,
    build_extended_golay,
    build_extended_qr48,
    encode_block,
    encode_conv,
    parse_octal_generators,
)
from seqdec.decoders import (
    ExtensionLimitExceeded,
    gda_decode,
    mlsda_decode,
    brute_force_ml_block,
    viterbi_ml,
)
from seqdec.numerics import RngStream
from seqdec.trellis import build_trellis, compute_dstar

CSV_HEADER = ["gamma_b_db", "bound_be", "bound_chernoff",
              "sim_mean", "sim_ci95_half", "trials"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    code: dict
    snr_db: tuple
    trials: int = 10_000
    seed: int = 1
    variant: str = "both"        # "be" | "chernoff" | "both"
    mode: str = "both"           # "bound" | "simulate" | "both"
    workers: int = 1
    all_zero: bool = False
    L: int | None = None         # convolutional info length
    extension_limit: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.variant not in ("be", "chernoff", "both"):
            raise ConfigError(f"bad variant {self.variant!r}")
        if self.mode not in ("bound", "simulate", "both"):
            raise ConfigError(f"bad mode {self.mode!r}")
        if len(self.snr_db) == 0:
            raise ConfigError("empty SNR grid")
        if any(b <= a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ConfigError("SNR grid must be strictly increasing")


@dataclass
class CurvePoint:
    gamma_b_db: float
    bound_be: float | None = None
    bound_chernoff: float | None = None
    sim_mean: float | None = None
    sim_ci95_half: float | None = None
    trials: int | None = None
    overflow_trials: int = 0


# ---------------------------------------------------------------------------
# code construction from config dicts

_NAMED_CODES = {
    "golay24": build_extended_golay,
    "qr48": build_extended_qr48,
}


def code_from_config(spec: dict):
    """Build a BlockCode or ConvCode from its JSON description.

    Block: {"name": "golay24" | "qr48"} or {"type": "block", "n", "k",
    "generator_rows": [hex row, ...], "name"?}.  Conv: {"type": "conv",
    "m", and "octal": [str, ...] or "taps": [bit string, ...], "name"?}.
    """
    if not isinstance(spec, dict):
        raise ConfigError("code spec must be an object")
    name = spec.get("name", "")
    if set(spec) <= {"name"}:
        try:
            return _NAMED_CODES[name]()
        except KeyError:
            raise ConfigError(f"unknown named code {name!r}") from None
    kind = spec.get("type")
    if kind == "block":
        if name in _NAMED_CODES and "generator_rows" not in spec:
            return _NAMED_CODES[name]()
        try:
            rows = tuple(int(r, 16) for r in spec["generator_rows"])
            return BlockCode(n=int(spec["n"]), k=int(spec["k"]), rows=rows, name=name)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad block code spec: {exc}") from exc
    if kind == "conv":
        try:
            m = int(spec["m"])
            if "taps" in spec:
                taps = tuple(tuple(int(c) for c in t) for t in spec["taps"])
                return ConvCode(n_out=len(taps), m=m, taps=taps, name=name)
            return parse_octal_generators(spec["octal"], m, name=name)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad conv code spec: {exc}") from exc
    raise ConfigError(f"bad code spec {spec!r}")


@lru_cache(maxsize=32)
def _built_code(code_json: str):
    spec = json.loads(code_json)
    code = code_from_config(spec["code"])
    if isinstance(code, ConvCode):
        L = spec.get("L")
        if not L:
            raise ConfigError("convolutional experiments need L")
        return build_trellis(code, int(L))
    return code


def _experiment_target(cfg: ExperimentConfig):
    """The decode target: a BlockCode, or a Trellis for conv codes."""
    return _built_code(json.dumps({"code": cfg.code, "L": cfg.L}, sort_keys=True))


# ---------------------------------------------------------------------------
# bound curves

def run_bound_curve(cfg: ExperimentConfig) -> list:
    target = _experiment_target(cfg)
    if isinstance(target, BlockCode):
        evaluate = lambda db, v: bounds.gda_complexity_bound(target, db, v)
    else:
        evaluate = lambda db, v: bounds.mlsda_complexity_bound(target, db, v)
    points = []
    for db in cfg.snr_db:
        pt = CurvePoint(gamma_b_db=db)
        if cfg.variant in ("be", "both"):
            pt.bound_be = evaluate(db, BERRY_ESSEEN)
        if cfg.variant in ("chernoff", "both"):
            pt.bound_chernoff = evaluate(db, CHERNOFF)
        points.append(pt)
    return points


# ---------------------------------------------------------------------------
# simulation curves

def _run_trial(target, gamma_b_db: float, seed: int, trial: int,
               all_zero: bool, extension_limit: int | None):
    """One transmit/decode round; returns branch_computations or None on
    budget overflow.  Stream: info bits first, then channel noise."""
    rng = RngStream(seed ^ trial)
    if isinstance(target, BlockCode):
        code = target
        cfg = ChannelConfig.for_block_code(code, gamma_b_db)
        info = np.zeros(code.k, dtype=np.uint8) if all_zero else rng.bits(code.k)
        word = encode_block(code, info)
    else:
        code = target.code
        cfg = ChannelConfig.for_conv_code(code, target.L, gamma_b_db)
        info = np.zeros(target.L, dtype=np.uint8) if all_zero else rng.bits(target.L)
        word = encode_conv(code, info)
    phi = llr(transmit(word, cfg, rng), cfg)
    try:
        if isinstance(target, BlockCode):
            out = gda_decode(code, phi, extension_limit=extension_limit)
        else:
            out = mlsda_decode(target, phi, extension_limit=extension_limit)
    except ExtensionLimitExceeded:
        return None
    return out.branch_computations


def _trial_batch(cfg_json: str, gamma_b_db: float, trial_indices: list):
    cfg = ExperimentConfig(**json.loads(cfg_json))
    target = _experiment_target(cfg)
    return [(t, _run_trial(target, gamma_b_db, cfg.seed, t,
                           cfg.all_zero, cfg.extension_limit))
            for t in trial_indices]


def _config_json(cfg: ExperimentConfig) -> str:
    d = dict(cfg.__dict__)
    d["snr_db"] = list(cfg.snr_db)
    return json.dumps(d, sort_keys=True)


def run_simulation_curve(cfg: ExperimentConfig, progress=None) -> list:
    """Monte Carlo complexity per SNR point.

    Mean and a normal-approximation 95% CI half-width over the included
    trials; trials that blow the extension budget are excluded and
    counted in overflow_trials.
    """
    cfg_json = _config_json(cfg)
    target = _experiment_target(cfg)
    points = []
    for db in cfg.snr_db:
        if cfg.workers == 1:
            results = [(t, _run_trial(target, db, cfg.seed, t,
                                      cfg.all_zero, cfg.extension_limit))
                       for t in range(cfg.trials)]
        else:
            stripes = [list(range(w, cfg.trials, cfg.workers))
                       for w in range(cfg.workers)]
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                futures = [pool.submit(_trial_batch, cfg_json, db, s)
                           for s in stripes if s]
                results = [item for f in futures for item in f.result()]
            results.sort()  # deterministic reduction in trial order
        counts = [c for _, c in results if c is not None]
        overflow = sum(1 for _, c in results if c is None)
        if counts:
            mean = statistics.fmean(counts)
            half = (1.96 * statistics.stdev(counts) / math.sqrt(len(counts))
                    if len(counts) > 1 else 0.0)
        else:
            mean = None
            half = None
        points.append(CurvePoint(gamma_b_db=db, sim_mean=mean, sim_ci95_half=half,
                                 trials=len(counts), overflow_trials=overflow))
        if progress is not None:
            progress(points[-1])
    return points


def merge_curves(bound_pts, sim_pts) -> list:
    by_db = {p.gamma_b_db: p for p in bound_pts}
    for sp in sim_pts:
        bp = by_db.get(sp.gamma_b_db)
        if bp is None:
            by_db[sp.gamma_b_db] = sp
        else:
            bp.sim_mean = sp.sim_mean
            bp.sim_ci95_half = sp.sim_ci95_half
            bp.trials = sp.trials
            bp.overflow_trials = sp.overflow_trials
    return [by_db[db] for db in sorted(by_db)]


def run_experiment(cfg: ExperimentConfig, progress=None) -> list:
    bound_pts = run_bound_curve(cfg) if cfg.mode in ("bound", "both") else []
    sim_pts = (run_simulation_curve(cfg, progress=progress)
               if cfg.mode in ("simulate", "both") else [])
    if not bound_pts:
        return sim_pts
    if not sim_pts:
        return bound_pts
    return merge_curves(bound_pts, sim_pts)


def _fmt(x) -> str:
    return "" if x is None else format(x, ".17g")


def write_curve_csv(points, stream) -> None:
    """Fixed schema; absent fields stay empty, columns never disappear."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in points:
        w.writerow([_fmt(p.gamma_b_db), _fmt(p.bound_be), _fmt(p.bound_chernoff),
                    _fmt(p.sim_mean), _fmt(p.sim_ci95_half),
                    "" if p.trials is None else p.trials])


def curve_csv_text(points) -> str:
    buf = io.StringIO()
    write_curve_csv(points, buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# prefactor tables

def run_atilde_table(d_over_n: float, gamma_db: float, n_grid) -> list:
    """(n, prefactor) rows at fixed d/n across sample counts n.

    gamma is taken in dB to match the usual plotting axes.
    """
    if not 0.0 < d_over_n < 1.0:
        raise ConfigError("d/n must lie in (0, 1)")
    gamma = db_to_linear(gamma_db)
    rows = []
    for n in n_grid:
        d = round(d_over_n * n)
        clipped = n - d
        if d < 1 or clipped < 1:
            raise ConfigError(f"degenerate split at n={n}")
        try:
            lam = bounds.solve_tilt(d, n, gamma)
            value = bounds.subexponential_factor(d, clipped, gamma, lam, BERRY_ESSEEN)
        except bounds.NoRoot:
            value = 1.0
        rows.append((n, value))
    return rows


def write_atilde_csv(rows, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["n", "atilde"])
    for n, value in rows:
        w.writerow([n, format(value, ".17g")])


def write_dstar_csv(trellis, stream) -> None:
    table = compute_dstar(trellis)
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["level", "state", "dstar"])
    for level in range(trellis.levels + 1):
        for state in trellis.reachable[level]:
            w.writerow([level, state, int(table[level, state])])


# ---------------------------------------------------------------------------
# validation suite

@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check(name, passed, detail) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), detail=detail)


def check_encoder_fixture() -> CheckResult:
    code = parse_octal_generators(["6", "5", "7"], m=2)
    got = "".join(map(str, encode_conv(code, [1, 1, 1, 0, 1])))
    want = "111010001110100101011"
    return _check("encoder-fixture", got == want, f"{got} vs {want}")


def check_dstar_oracle(trellis=None) -> CheckResult:
    """DP table against exhaustive input enumeration on a small trellis."""
    if trellis is None:
        trellis = build_trellis(parse_octal_generators(["6", "5", "7"], m=2), L=6)
    table = compute_dstar(trellis)
    L, m, nst = trellis.L, trellis.code.m, trellis.num_states
    best = {}
    for val in range(1 << L):
        info = [(val >> t) & 1 for t in range(L)]
        word = encode_conv(trellis.code, info)
        state = 0
        weight = 0
        for level in range(L + m):
            key = (level, state)
            if key not in best or weight < best[key]:
                best[key] = weight
            if level < L + m:
                bit = info[level] if level < L else 0
                _, state = trellis.code.step(state, bit)
                weight += int(word[level * trellis.code.n_out:
                                   (level + 1) * trellis.code.n_out].sum())
        key = (L + m, 0)
        if key not in best or weight < best[key]:
            best[key] = weight
    mismatches = 0
    for level in range(L + m + 1):
        for s in range(nst):
            want = best.get((level, s), -1)
            if int(table[level, s]) != want:
                mismatches += 1
    return _check("dstar-oracle", mismatches == 0, f"{mismatches} mismatching entries")


def check_ml_equivalence(trials: int = 100, seed: int = 7) -> CheckResult:
    code = build_extended_golay()
    cfg = ChannelConfig.for_block_code(code, 2.0)
    worst = 0.0
    for t in range(trials):
        rng = RngStream(seed ^ t)
        info = rng.bits(code.k)
        phi = llr(transmit(encode_block(code, info), cfg, rng), cfg)
        got = gda_decode(code, phi)
        want = brute_force_ml_block(code, phi)
        m_want = float(np.sum((phi - (1.0 - 2.0 * want.astype(float))) ** 2))
        worst = max(worst, abs(got.metric - m_want))
    return _check("ml-equivalence", worst <= 1e-6, f"max metric gap {worst:.3g}")


def check_bound_dominance(samples: int = 100_000, seed: int = 11) -> CheckResult:
    gen = np.random.Generator(np.random.PCG64(seed))
    worst = -np.inf
    for gamma in (0.5, 1.0):
        mu = math.sqrt(2.0 * gamma)
        x = gen.normal(mu, 1.0, size=(samples, 6))
        w = np.minimum(gen.normal(mu, 1.0, size=(samples, 12)), 0.0)
        sx = np.concatenate([np.zeros((samples, 1)), np.cumsum(x, axis=1)], axis=1)
        sw = np.concatenate([np.zeros((samples, 1)), np.cumsum(w, axis=1)], axis=1)
        for d in range(0, 7, 2):
            for clipped in range(0, 13, 4):
                if d + clipped == 0:
                    continue
                p_hat = float(np.mean(sx[:, d] + sw[:, clipped] <= 0.0))
                se = math.sqrt(max(p_hat * (1.0 - p_hat), 1e-12) / samples)
                for variant in (BERRY_ESSEEN, CHERNOFF):
                    b = bounds.extension_probability_bound(d, clipped, gamma, variant)
                    worst = max(worst, (p_hat - 4.0 * se) - b)
    return _check("bound-dominance", worst <= 0.0, f"worst margin {worst:.3g}")


def check_extension_probability_monotone(samples: int = 1_000_000,
                                         seed: int = 13) -> CheckResult:
    """Estimated extension probability decreases in the Gaussian count."""
    gamma = 0.5
    mu = math.sqrt(2.0 * gamma)
    gen = np.random.Generator(np.random.PCG64(seed))
    x = gen.normal(mu, 1.0, size=(samples, 6))
    w = np.minimum(gen.normal(mu, 1.0, size=(samples, 10)), 0.0)
    sw = np.sum(w, axis=1)
    sx = np.cumsum(x, axis=1)
    last = np.inf
    ok = True
    details = []
    for d in range(1, 7):
        p = float(np.mean(sx[:, d - 1] + sw <= 0.0))
        details.append(f"{p:.4f}")
        ok = ok and p < last
        last = p
    return _check("extension-probability-monotone", ok, " > ".join(details))


def check_golay_fixture() -> CheckResult:
    code = build_extended_golay()
    ok = code.minimum_distance() == 8 and code.weight_count(8) == 759
    return _check("golay-fixture",
                  ok, f"dmin={code.minimum_distance()} A8={code.weight_count(8)}")


def run_validation_suite(checks=None) -> list:
    if checks is None:
        checks = [check_encoder_fixture, check_golay_fixture, check_dstar_oracle,
                  check_ml_equivalence, check_bound_dominance,
                  check_extension_probability_monotone]
    return [c() for c in checks]

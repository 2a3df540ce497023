"""Benchmark harness: candidates -> per-index scores -> rankings -> champion
success -> reports.

A candidate partition succeeds for an index when it is ranked first by that
index and its adjusted Rand index against the reference partition exceeds
0.95 (strict).  Report files are byte-deterministic for a fixed RunConfig;
wall-clock timings go to a separate runtime.txt.
"""

import dataclasses
import math
import os
import time
import warnings

from .baselines import (
    DIRECTIONS,
    HIGHER_BETTER,
    SMALLER_BETTER,
    UndefinedScoreError,
    adjusted_rand_index,
    calinski_harabasz,
    davies_bouldin,
    silhouette,
)
from .config import config_snapshot, save_params_config
from .kdi import (
    ambiguous_flags,
    ambiguous_v1,
    ambiguous_v2,
    ambiguous_v3,
    cross_log_density,
    fit_profiles,
    kdi_index,
    similarity_index,
    similarity_v1,
    similarity_v2,
    similarity_v3,
    territory_interval,
)
from .partitions import build_candidates, canonicalize, save_partitions
from .svgplot import emit_svg

SUCCESS_THRESHOLD = 0.95
TOP_N = 5

VARIANT_COLUMNS = ("ia_v1", "ia_v2", "ia_v3", "is_v1", "is_v2", "is_v3")

CALIBRATION_DELTAS = tuple(round(0.1 * i, 1) for i in range(1, 10))
CALIBRATION_ALPHAS = (0.5, 1.0, 2.0, 3.0)


@dataclasses.dataclass
class CandidateResult:
    source: str
    K: int
    scores: dict
    ari: float = None
    bandwidths: tuple = ()


@dataclasses.dataclass
class EvaluationReport:
    dataset_id: str
    n: int
    d: int
    rows: list
    rankings: dict
    champion_ari: dict
    success: dict
    warnings: list
    runtime: dict
    snapshot: list
    candidates: list = None

    def top(self, index, count=TOP_N):
        return self.rankings[index][:count]


def rank_candidates(entries, direction):
    """Order candidate positions by score.

    entries: (value-or-None, K, source) per candidate.  Sorting follows the
    index direction; ties break toward smaller K, then lexicographic source
    tag; undefined (None or non-finite) scores always rank last.
    """
    if not entries:
        raise ValueError("nothing to rank")
    keyed = []
    for pos, (value, k, source) in enumerate(entries):
        defined = value is not None and math.isfinite(value)
        if defined:
            sort_value = -float(value) if direction == HIGHER_BETTER else float(value)
            keyed.append((0, sort_value, int(k), str(source), pos))
        else:
            keyed.append((1, 0.0, int(k), str(source), pos))
    keyed.sort(key=lambda t: t[:4])
    return [t[4] for t in keyed]


def _score_candidate(data, part, config, record):
    """Fill one CandidateResult's score columns, recording failures."""
    scores = {}
    bandwidths = ()
    for name, fn in (("ch", calinski_harabasz), ("sc", silhouette), ("db", davies_bouldin)):
        if name not in config.indices:
            continue
        try:
            scores[name] = fn(data, part).value
        except UndefinedScoreError as exc:
            scores[name] = None
            record(f"{name} undefined for {part.source}: {exc}")
    if "new" in config.indices:
        params = config.kdi_params
        bw = config.bw_spec()
        profiles = fit_profiles(data, part, params, bw_spec=bw)
        log_matrix = cross_log_density(data, profiles)
        score = kdi_index(data, part, params, profiles=profiles, log_matrix=log_matrix)
        scores["new"] = score.I
        scores["new_ia"] = score.I_a
        scores["new_is"] = score.I_s
        scores["new_ib"] = score.I_b
        if config.boundary_mix_weight > 0.0:
            w = config.boundary_mix_weight
            scores["new3"] = (1.0 - w) * score.I + w * score.I_b
        if config.include_variants:
            scores["ia_v1"] = ambiguous_v1(data, profiles, log_matrix, params.pair_local)
            scores["ia_v2"] = ambiguous_v2(data, profiles, log_matrix, params.pair_local)
            scores["ia_v3"] = ambiguous_v3(data, profiles, params.mc_samples, params.seed)
            scores["is_v1"] = similarity_v1(profiles, data.n, params.min_cluster_size)
            scores["is_v2"] = similarity_v2(profiles, data.n, params.min_cluster_size)
            scores["is_v3"] = similarity_v3(
                profiles,
                data.n,
                center=params.s_v3_center,
                metric=params.s_v3_metric,
                normalize=params.s_v3_normalize,
            )
        bandwidths = tuple(p.model.bandwidth for p in profiles)
    return scores, bandwidths


def ranked_indices(config):
    """Index columns that get a ranking (and a success flag)."""
    out = list(config.indices)
    if "new" in out and config.boundary_mix_weight > 0.0:
        out.append("new3")
    return out


def evaluate_dataset(config, dataset, candidates=None):
    """Run the full protocol on one dataset and return an EvaluationReport.

    Candidates default to every configured generator for every k in the
    config range (clamped to n), deduplicated, plus the reference partition
    when the dataset has labels.  Index or generator failures on individual
    candidates become warnings, never run failures.
    """
    captured = []

    def record(message):
        captured.append(str(message))

    t0 = time.monotonic()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if candidates is None:
            k_hi = min(config.k_max, dataset.n)
            candidates = build_candidates(
                dataset, range(config.k_min, k_hi + 1), config.seed, config.generators
            )
    captured.extend(str(w.message) for w in caught)
    t_generate = time.monotonic() - t0

    reference = None
    if dataset.reference_labels is not None:
        reference = canonicalize(dataset.reference_labels, source="reference")

    t0 = time.monotonic()
    rows = []
    for part in candidates:
        scores, bandwidths = _score_candidate(dataset, part, config, record)
        ari = adjusted_rand_index(part, reference) if reference is not None else None
        rows.append(
            CandidateResult(
                source=part.source, K=part.K, scores=scores, ari=ari, bandwidths=bandwidths
            )
        )
    t_score = time.monotonic() - t0

    rankings = {}
    champion_ari = {}
    success = {}
    for index in ranked_indices(config):
        direction = DIRECTIONS.get(index, SMALLER_BETTER)
        entries = [(row.scores.get(index), row.K, row.source) for row in rows]
        rankings[index] = rank_candidates(entries, direction)
        champ = rows[rankings[index][0]]
        champion_ari[index] = champ.ari
        success[index] = (champ.ari > SUCCESS_THRESHOLD) if champ.ari is not None else None

    return EvaluationReport(
        dataset_id=dataset.id,
        n=dataset.n,
        d=dataset.d,
        rows=rows,
        rankings=rankings,
        champion_ari=champion_ari,
        success=success,
        warnings=captured,
        runtime={"generate_s": t_generate, "score_s": t_score},
        snapshot=config_snapshot(config),
        candidates=list(candidates),
    )


def _fmt(value):
    if value is None:
        return ""
    return repr(float(value))


def _score_columns(report):
    cols = []
    for row in report.rows:
        for key in row.scores:
            if key not in cols:
                cols.append(key)
    return cols


def write_report(report, out_dir, dataset=None, emit_svgs=False):
    """Write report.csv, summary.txt, runtime.txt, the candidate partition
    directory, and (optionally) the top-5 SVGs per ranked index.

    report.csv and summary.txt are byte-deterministic; wall-clock timings are
    confined to runtime.txt.
    """
    candidates = report.candidates
    os.makedirs(out_dir, exist_ok=True)
    score_cols = _score_columns(report)
    rank_cols = list(report.rankings)
    header = ["candidate", "source", "k"] + score_cols + ["ari"]
    header += [f"rank_{idx}" for idx in rank_cols] + ["bandwidths"]
    positions = {
        idx: {pos: rank for rank, pos in enumerate(order, start=1)}
        for idx, order in report.rankings.items()
    }
    lines = [",".join(header)]
    for pos, row in enumerate(report.rows):
        fields = [str(pos), row.source, str(row.K)]
        fields += [_fmt(row.scores.get(col)) for col in score_cols]
        fields.append(_fmt(row.ari))
        fields += [str(positions[idx][pos]) for idx in rank_cols]
        fields.append(";".join(repr(float(h)) for h in row.bandwidths))
        lines.append(",".join(fields))
    with open(os.path.join(out_dir, "report.csv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"dataset: {report.dataset_id} (n={report.n}, d={report.d})\n")
        fh.write(f"candidates: {len(report.rows)}\n\n")
        for index in report.rankings:
            fh.write(f"== {index} (top {TOP_N}) ==\n")
            for rank, pos in enumerate(report.top(index), start=1):
                row = report.rows[pos]
                value = row.scores.get(index)
                value_text = "undefined" if value is None else f"{value:.5f}"
                ari_text = "" if row.ari is None else f"  AR={row.ari:.5f}"
                fh.write(f"  {rank}. K={row.K} {index}={value_text}  [{row.source}]{ari_text}\n")
            champ_ari = report.champion_ari[index]
            if champ_ari is None:
                fh.write("  champion ARI: n/a (no reference labels)\n")
            else:
                verdict = "SUCCEEDED" if report.success[index] else "FAILED"
                fh.write(f"  champion ARI: {champ_ari:.5f} -> {verdict}\n")
            fh.write("\n")
        if report.warnings:
            fh.write("warnings:\n")
            for message in report.warnings:
                fh.write(f"  - {message}\n")
            fh.write("\n")
        fh.write("config:\n")
        for key, value in report.snapshot:
            fh.write(f"  {key} = {value}\n")

    with open(os.path.join(out_dir, "runtime.txt"), "w", encoding="utf-8") as fh:
        for phase, seconds in report.runtime.items():
            fh.write(f"{phase}: {seconds:.3f}\n")

    if candidates is not None:
        save_partitions(os.path.join(out_dir, "candidates"), candidates)

    if emit_svgs and dataset is not None and candidates is not None and dataset.d in (2, 3):
        for index in report.rankings:
            for rank, pos in enumerate(report.top(index), start=1):
                row = report.rows[pos]
                emit_svg(
                    dataset,
                    candidates[pos],
                    os.path.join(out_dir, f"top5_{index}_{rank}.svg"),
                    index_name=index,
                    index_value=row.scores.get(index),
                    ari=row.ari,
                )


@dataclasses.dataclass
class AccuracyTable:
    counts: dict  # index -> (succeeded, total)
    grid: dict  # index -> {dataset_id: 'S' | 'F'}
    dataset_ids: list

    def summary(self, index):
        succeeded, total = self.counts[index]
        return f"{succeeded}/{total}"


def aggregate_accuracy(reports):
    """Aggregate success flags across datasets into per-index counts and an
    S/F grid.  Reports without reference labels are excluded with a warning;
    an empty (or fully excluded) input is an error."""
    if not reports:
        raise ValueError("no reports to aggregate")
    usable = []
    for report in reports:
        if any(flag is not None for flag in report.success.values()):
            usable.append(report)
        else:
            warnings.warn(f"report {report.dataset_id} has no reference labels; excluded")
    if not usable:
        raise ValueError("no reports with success flags")
    indices = list(usable[0].success)
    counts = {}
    grid = {index: {} for index in indices}
    for index in indices:
        succeeded = 0
        total = 0
        for report in usable:
            flag = report.success.get(index)
            if flag is None:
                continue
            total += 1
            succeeded += int(flag)
            grid[index][report.dataset_id] = "S" if flag else "F"
        counts[index] = (succeeded, total)
    return AccuracyTable(counts=counts, grid=grid, dataset_ids=[r.dataset_id for r in usable])


def write_accuracy(table, out_dir):
    """Write accuracy.csv (per-index counts) and grid.csv (S/F per dataset)."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "accuracy.csv"), "w", encoding="utf-8") as fh:
        fh.write("index,succeeded,total,accuracy\n")
        for index, (succeeded, total) in table.counts.items():
            fh.write(f"{index},{succeeded},{total},{succeeded}/{total}\n")
    with open(os.path.join(out_dir, "grid.csv"), "w", encoding="utf-8") as fh:
        fh.write("index," + ",".join(table.dataset_ids) + "\n")
        for index, cells in table.grid.items():
            fh.write(index + "," + ",".join(cells.get(d, "") for d in table.dataset_ids) + "\n")


def calibrate(config, training_datasets, out_path=None):
    """Grid-search delta and alpha1=alpha2 on labeled training datasets,
    maximizing the success count of the main index.

    Ties prefer delta closest to 0.5, then the smaller alpha.  The winning
    KdiParams are returned and, when out_path is given, written as a config
    file that reproduces them.
    """
    if not training_datasets:
        raise ValueError("no training datasets")
    for ds in training_datasets:
        if ds.reference_labels is None:
            raise ValueError(f"training dataset {ds.id} has no reference labels")
    base = config.kdi_params
    successes = {(d, a): 0 for d in CALIBRATION_DELTAS for a in CALIBRATION_ALPHAS}
    for ds in training_datasets:
        k_hi = min(config.k_max, ds.n)
        candidates = build_candidates(ds, range(config.k_min, k_hi + 1), config.seed, config.generators)
        reference = canonicalize(ds.reference_labels, source="reference")
        info = []
        for part in candidates:
            profiles = fit_profiles(ds, part, base, bw_spec=config.bw_spec())
            matrix = cross_log_density(ds, profiles)
            i_s, _ = similarity_index(profiles, ds.n, base.min_cluster_size)
            stats = [(float(p.g.min()), float(p.g.max()), p.delta_g) for p in profiles]
            info.append(
                {
                    "K": part.K,
                    "source": part.source,
                    "matrix": matrix,
                    "stats": stats,
                    "i_s": i_s,
                    "ari": adjusted_rand_index(part, reference),
                }
            )
        for alpha in CALIBRATION_ALPHAS:
            ia_values = []
            for cand in info:
                intervals = [
                    territory_interval(g_min, g_max, dg, alpha, alpha, base.beta1, base.beta2)
                    for (g_min, g_max, dg) in cand["stats"]
                ]
                flags = ambiguous_flags(cand["matrix"], intervals)
                ia_values.append(int(flags.sum()) / flags.shape[0])
            for delta in CALIBRATION_DELTAS:
                entries = [
                    (delta * ia + (1.0 - delta) * cand["i_s"], cand["K"], cand["source"])
                    for ia, cand in zip(ia_values, info)
                ]
                order = rank_candidates(entries, SMALLER_BETTER)
                if info[order[0]]["ari"] > SUCCESS_THRESHOLD:
                    successes[(delta, alpha)] += 1
    cells = sorted(
        successes.items(), key=lambda item: (-item[1], abs(item[0][0] - 0.5), item[0][1])
    )
    (best_delta, best_alpha), _count = cells[0]
    best = dataclasses.replace(base, delta=best_delta, alpha1=best_alpha, alpha2=best_alpha)
    if out_path is not None:
        save_params_config(out_path, best, seed=config.seed)
    return best

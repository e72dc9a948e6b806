#!/usr/bin/env python3
"""Regenerate the bundled benchmark dataset (data/bone_marrow.arff + .csv).

The files mirror the public UCI "Bone marrow transplant: children" dataset
(187 pediatric patients, 37 attributes, unrelated-donor HSCT outcomes):
same schema, same row/class counts, and the same published summary
statistics -- per-column max/min/mean/sd for the numeric attributes and
the chi-squared association strength of every encoded predictor with the
survival label.  All cell values are synthetic; no patient record is
copied.  Cross-column relationships are only modeled where they are
structural (age bins, disease group, HLA groupings, GvHD timing
sentinels); other columns are statistically independent given the label.

Usage:  python3 scripts/make_dataset.py [--out data/]
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

N_ROWS = 187
N_ALIVE = 102  # survival_status "0"
N_DIED = 85    # survival_status "1"
SEED = 20240817

# Numeric column targets: (minimum, maximum, mean, sd) with sd using the
# n-1 divisor over present values.
NUMERIC_TARGETS = {
    "donor_age":                 (18.6466, 55.5534, 33.4721, 8.2718),
    "recipient_age":             (0.6000, 20.2000, 9.9316, 5.3056),
    "recipient_body_mass":       (6.0000, 103.4000, 35.8845, 19.7522),
    "CD34_x1e6_per_kg":          (0.7900, 57.7800, 11.8918, 9.9144),
    "CD3_x1e8_per_kg":           (0.0400, 20.0200, 4.7848, 3.8530),
    "CD3_to_CD34_ratio":         (0.2041, 99.5610, 5.3222, 9.4806),
    "ANC_recovery":              (9.0, 1000000.0, 26752.8663, 161747.2005),
    "PLT_recovery":              (9.0, 1000000.0, 90937.9198, 288242.4077),
    "time_to_acute_GvHD_III_IV": (10.0, 1000000.0, 775408.0428, 418425.2527),
    "survival_time":             (6.0, 3364.0, 938.7433, 849.5895),
}

# Chi-squared (frequency-sum variant, on the imputed unscaled matrix)
# targets for the numeric predictors, and the sign of the death-class
# deviation (+1: death-class sum above expectation).
NUMERIC_CHI2 = {
    "donor_age":                 (1.3863, +1),
    "recipient_age":             (21.8122, +1),
    "recipient_body_mass":       (115.2398, +1),
    "CD34_x1e6_per_kg":          (33.0659, -1),
    "CD3_x1e8_per_kg":           (30.4617, -1),
    "CD3_to_CD34_ratio":         (22.9098, +1),
    "ANC_recovery":              (5996503.1490, +1),
    "PLT_recovery":              (20390478.3300, +1),
    "time_to_acute_GvHD_III_IV": (425033.1475, -1),
    "survival_time":             (82924.0104, -1),
}

# Dummy-column targets: encoded name -> chi-squared score. Counts are
# found by integer search; Table windows keep the marginals plausible.
DUMMY_CHI2 = {
    "donor_age_below_35_yes": 1.0782,
    "donor_ABO_A": 0.7892, "donor_ABO_AB": 2.1356, "donor_ABO_B": 0.0762,
    "donor_CMV_present": 0.2630,
    "recipient_age_below_10_yes": 1.9963,
    "recipient_age_int_10_20": 1.9416, "recipient_age_int_5_10": 0.3765,
    "recipient_gender_male": 0.0429,
    "recipient_ABO_A": 0.3197, "recipient_ABO_AB": 0.2564, "recipient_ABO_B": 0.0427,
    "recipient_rh_plus": 0.4602,
    "recipient_CMV_present": 0.1361,
    "disease_AML": 0.0000, "disease_chronic": 0.1896,
    "disease_lymphoma": 10.8000, "disease_nonmalignant": 0.8167,
    "disease_group_nonmalignant": 0.8167,
    "gender_match_other": 0.0054,
    "ABO_match_mismatched": 0.3380,
    "CMV_status_1": 1.4080, "CMV_status_2": 0.0356, "CMV_status_3": 0.1984,
    "HLA_match_10-Jul": 0.4267, "HLA_match_10-Oct": 0.1280, "HLA_match_10-Sep": 0.1313,
    "HLA_mismatch_mismatched": 0.0107,
    "antigen_1": 0.4063, "antigen_2": 0.0611, "antigen_3": 0.3857,
    "allele_1": 0.0733, "allele_2": 0.0375, "allele_3": 0.0500, "allele_4": 1.2000,
    "HLA_group_1_matched": 0.1280, "HLA_group_1_mismatched": 0.4267,
    "HLA_group_1_one_allele": 0.0733, "HLA_group_1_one_antigen": 0.0794,
    "HLA_group_1_three_diffs": 0.6750, "HLA_group_1_two_diffs": 0.0281,
    "risk_group_low": 1.5054,
    "stem_cell_source_peripheral_blood": 0.6703,
    "tx_post_relapse_yes": 2.2043,
    "acute_GvHD_II_III_IV_yes": 0.3440,
    "acute_GvHD_III_IV_yes": 2.3408,
    "extensive_chronic_GvHD_yes": 4.5430,
    "relapse_yes": 15.2012,
}

# Missing cells per column: (alive count, died count).
MISSING = {
    "recipient_body_mass": (1, 1),
    "CD3_x1e8_per_kg": (3, 2),
    "CD3_to_CD34_ratio": (2, 3),
    "CMV_status": (9, 7),
    "recipient_CMV": (8, 6),
    "donor_CMV": (1, 1),
    "extensive_chronic_GvHD": (19, 12),
    "ABO_match": (1, 0),
    "antigen": (0, 1),
    "allele": (1, 1),
    "recipient_rh": (1, 1),
    "HLA_group_1": (1, 1),
}

# Attribute declaration order and kinds ("n" numeric, otherwise the level
# list, lexicographically sorted so the encoding baseline is first).
SCHEMA = [
    ("donor_age", "n"),
    ("donor_age_below_35", ["no", "yes"]),
    ("donor_ABO", ["0", "A", "AB", "B"]),
    ("donor_CMV", ["absent", "present"]),
    ("recipient_age", "n"),
    ("recipient_age_below_10", ["no", "yes"]),
    ("recipient_age_int", ["0_5", "10_20", "5_10"]),
    ("recipient_gender", ["female", "male"]),
    ("recipient_body_mass", "n"),
    ("recipient_ABO", ["0", "A", "AB", "B"]),
    ("recipient_rh", ["minus", "plus"]),
    ("recipient_CMV", ["absent", "present"]),
    ("disease", ["ALL", "AML", "chronic", "lymphoma", "nonmalignant"]),
    ("disease_group", ["malignant", "nonmalignant"]),
    ("gender_match", ["female_to_male", "other"]),
    ("ABO_match", ["matched", "mismatched"]),
    ("CMV_status", ["0", "1", "2", "3"]),
    ("HLA_match", ["10-Aug", "10-Jul", "10-Oct", "10-Sep"]),
    ("HLA_mismatch", ["matched", "mismatched"]),
    ("antigen", ["0", "1", "2", "3"]),
    ("allele", ["0", "1", "2", "3", "4"]),
    ("HLA_group_1", ["DR_2_2", "matched", "mismatched", "one_allele",
                     "one_antigen", "three_diffs", "two_diffs"]),
    ("risk_group", ["high", "low"]),
    ("stem_cell_source", ["bone_marrow", "peripheral_blood"]),
    ("tx_post_relapse", ["no", "yes"]),
    ("CD34_x1e6_per_kg", "n"),
    ("CD3_x1e8_per_kg", "n"),
    ("CD3_to_CD34_ratio", "n"),
    ("ANC_recovery", "n"),
    ("PLT_recovery", "n"),
    ("acute_GvHD_II_III_IV", ["no", "yes"]),
    ("acute_GvHD_III_IV", ["no", "yes"]),
    ("time_to_acute_GvHD_III_IV", "n"),
    ("extensive_chronic_GvHD", ["no", "yes"]),
    ("relapse", ["no", "yes"]),
    ("survival_time", "n"),
    ("survival_status", ["0", "1"]),
]

SENTINEL = 1000000.0

# Shape knobs for the survival-signal overlap (tuned so that held-out
# accuracy of simple classifiers lands in the low-to-mid 0.9 range
# rather than at 1.0).
ALIVE_SURVIVAL_MIN = 160.0
DIED_SURVIVAL_MAX = 1250.0
DIED_SURVIVAL_TAIL = 0.22   # fraction of deaths drawn from the late tail


def chi2_pair(a, b):
    """Frequency-sum chi-squared of a dummy with per-class one-counts (a=alive, b=died)."""
    t = a + b
    if t == 0:
        return 0.0
    ea = t * N_ALIVE / N_ROWS
    ed = t * N_DIED / N_ROWS
    return (a - ea) ** 2 / ea + (b - ed) ** 2 / ed


def search_pair(target, t_lo, t_hi, a_cap=N_ALIVE, b_cap=N_DIED):
    """Best integer (alive, died) one-counts for a dummy chi2 target."""
    best, best_err = None, math.inf
    for t in range(max(1, t_lo), t_hi + 1):
        for b in range(max(0, t - a_cap), min(t, b_cap) + 1):
            a = t - b
            err = abs(chi2_pair(a, b) - target)
            if err < best_err:
                best, best_err = (a, b), err
    return best


def split_counts(total_a, total_b, target1, target2):
    """Split (total_a, total_b) into two sublevels hitting two chi2 targets."""
    best, best_err = None, math.inf
    for a1 in range(total_a + 1):
        for b1 in range(total_b + 1):
            if a1 + b1 == 0 or a1 + b1 == total_a + total_b:
                continue
            err = (abs(chi2_pair(a1, b1) - target1)
                   + abs(chi2_pair(total_a - a1, total_b - b1) - target2))
            if err < best_err:
                best, best_err = (a1, b1), err
    return best


class ColumnBuilder:
    def __init__(self, rng):
        self.rng = rng
        self.cols = {}          # name -> list of str (per row), "?" for missing
        self.alive_rows = None
        self.died_rows = None

    def assign_levels(self, name, counts, rows_by_class, missing=(0, 0)):
        """counts: {level: (alive, died)} for present cells; missing added on top."""
        col = ["?"] * N_ROWS
        for cls, rows in enumerate(rows_by_class):
            pool = list(rows)
            self.rng.shuffle(pool)
            i = 0
            for level in sorted(counts):
                for _ in range(counts[level][cls]):
                    col[pool[i]] = level
                    i += 1
            # remaining pool rows stay missing
            assert len(pool) - i == missing[cls], (name, len(pool) - i, missing)
        self.cols[name] = col
        return col


def solve_class_sums(total_sum, chi2_target, died_sign):
    """Post-imputation per-class sums (alive, died) that yield the chi2 target."""
    ea = total_sum * N_ALIVE / N_ROWS
    ed = total_sum * N_DIED / N_ROWS
    delta = math.sqrt(chi2_target / (1.0 / ea + 1.0 / ed))
    od = ed + died_sign * delta
    return total_sum - od, od


def adjust_to_moments(groups, sum_targets, sumsq_target, lo, hi, bin_bounds=None):
    """Affine-correct per-class value groups to exact sums and total sum of squares.

    groups: [array alive_values, array died_values] (free values only).
    sum_targets: per-class sums for the free values.
    Values are kept strictly inside (lo, hi) and inside optional per-value
    (lo_i, hi_i) bin bounds; the correction iterates with clipping.
    """
    vals = [np.array(g, dtype=float) for g in groups]
    for _ in range(200):
        # per-class shift to hit the sums
        for c in range(2):
            vals[c] = vals[c] + (sum_targets[c] - vals[c].sum()) / len(vals[c])
        # joint spread factor to hit the sum of squares
        centered = [v - v.mean() for v in vals]
        ss_center = sum(float(np.sum(cv * cv)) for cv in centered)
        base = sum(s * s / len(v) for s, v in zip(sum_targets, vals))
        need = sumsq_target - base
        if need <= 0 or ss_center <= 0:
            raise RuntimeError("infeasible moment targets")
        t = math.sqrt(need / ss_center)
        vals = [v.mean() + cv * t for v, cv in zip(vals, centered)]
        # clip into bounds
        clipped = False
        for c in range(2):
            b_lo = np.full(len(vals[c]), lo)
            b_hi = np.full(len(vals[c]), hi)
            if bin_bounds is not None:
                b_lo = np.maximum(b_lo, bin_bounds[c][0])
                b_hi = np.minimum(b_hi, bin_bounds[c][1])
            before = vals[c].copy()
            vals[c] = np.clip(vals[c], b_lo, b_hi)
            if not np.allclose(before, vals[c]):
                clipped = True
        err_sum = max(abs(vals[c].sum() - sum_targets[c]) for c in range(2))
        err_sq = abs(sum(float(np.sum(v * v)) for v in vals) - sumsq_target)
        if not clipped and err_sum < 1e-9 and err_sq < max(1e-6 * sumsq_target, 1e-9):
            return vals
    raise RuntimeError(f"moment adjustment did not converge (err_sum={err_sum}, err_sq={err_sq})")


def quantize_repair(vals, sum_targets, sumsq_target, quantum, lo, hi, bin_bounds=None):
    """Round to a quantum, then repair per-class sums and the total sum of squares.

    Class sums are rounded to the quantum grid in a coupled way so the column
    TOTAL lands on the grid point nearest the exact target (the total drives
    the mean, which has the tightest tolerance).
    """
    q = quantum
    out = [np.round(v / q) * q for v in vals]
    total_g = round((sum_targets[0] + sum_targets[1]) / q)
    s0_g = round(sum_targets[0] / q)
    grid_sums = (s0_g, total_g - s0_g)

    def bounds(c):
        b_lo = np.full(len(out[c]), lo)
        b_hi = np.full(len(out[c]), hi)
        if bin_bounds is not None:
            b_lo = np.maximum(b_lo, bin_bounds[c][0])
            b_hi = np.minimum(b_hi, bin_bounds[c][1])
        return b_lo, b_hi

    # repair per-class sums with single-value quantum steps, spread evenly
    for c in range(2):
        b_lo, b_hi = bounds(c)
        v = out[c]
        for sweep in range(10000):
            gap_units = grid_sums[c] - round(v.sum() / q)
            if gap_units == 0:
                break
            step = q if gap_units > 0 else -q
            if step > 0:
                cand = np.where(v + step <= b_hi + 0.49 * q)[0]
            else:
                cand = np.where(v + step >= b_lo - 0.49 * q)[0]
            if len(cand) == 0:
                raise RuntimeError("sum repair stuck")
            take = cand[:min(len(cand), abs(gap_units))]
            v[take] += step

    # repair the sum of squares with paired same-class moves (sum preserved):
    # giving +q to a value x and -q to a value y changes ssq by 2q(x-y) + 2q^2,
    # so widening a pair (x > y) raises ssq and narrowing it lowers ssq
    tol = max(2e-8 * abs(sumsq_target), 1e-12)
    moves = 0
    best_gap, stall = math.inf, 0
    for _ in range(300000):
        gap = sumsq_target - sum(float(np.sum(v * v)) for v in out)
        if abs(gap) < tol:
            break
        # bail out of oscillations that stop making progress
        if abs(gap) < best_gap - 0.01 * tol:
            best_gap, stall = abs(gap), 0
        else:
            stall += 1
            if stall > 500:
                break
        best = None  # (|delta| closeness, class, i_plus, i_minus)
        for c in (0, 1):
            b_lo, b_hi = bounds(c)
            v = out[c]
            if len(v) < 2:
                continue
            order = np.argsort(v)
            sv = v[order]
            want_diff = max((abs(gap) - 2 * q * q) / (2 * q), 0.0)
            for oi in range(len(order)):
                i = order[-1 - oi]  # candidate high value x
                if gap > 0:
                    if v[i] + q > b_hi[i] + 0.49 * q:   # x takes +q
                        continue
                else:
                    if v[i] - q < b_lo[i] - 0.49 * q:   # x takes -q
                        continue
                # walk y upward from the largest step not overshooting the
                # gap, skipping values pinned at their bound
                pos = max(int(np.searchsorted(sv, v[i] - want_diff)), 0)
                for pj in range(pos, len(sv)):
                    j = order[pj]
                    if j == i or v[j] > v[i]:
                        continue
                    if gap > 0:   # widen: x += q, y -= q
                        if v[j] - q < b_lo[j] - 0.49 * q:
                            continue
                        delta = 2 * q * (v[i] - v[j]) + 2 * q * q
                        if delta > abs(gap) + tol:
                            continue
                    else:         # narrow: x -= q, y += q
                        delta = -2 * q * (v[i] - v[j]) + 2 * q * q
                        if delta >= 0:
                            break   # y too close to x; larger y only worse
                        if v[j] + q > b_hi[j] + 0.49 * q:
                            continue
                        if abs(delta) > abs(gap) + tol:
                            continue
                    score = abs(abs(delta) - abs(gap))
                    if best is None or score < best[0]:
                        ip, im = (i, j) if gap > 0 else (j, i)
                        best = (score, c, ip, im)
                    break  # first feasible y from this x is the best one
                if best is not None and best[0] < abs(gap) * 0.25:
                    break
            if best is not None and best[0] < abs(gap) * 0.25:
                break
        if best is None:
            break
        _, c, ip, im = best
        out[c][ip] += q
        out[c][im] -= q
        moves += 1
    import sys as _sys
    _gap = sumsq_target - sum(float(np.sum(v * v)) for v in out)
    if abs(_gap) > tol * 3:
        print(f"[quantize_repair] residual ssq gap {_gap:.3f} (tol {tol:.3f}, q={q}, moves={moves}, sizes={[len(v) for v in out]})", file=_sys.stderr)
    return out


def build_numeric(name, rng, labels, rows_by_class, shape):
    """Generate one numeric column. Returns values array with NaN for missing."""
    mn, mx, mean, sd = NUMERIC_TARGETS[name]
    chi2_target, died_sign = NUMERIC_CHI2[name]
    miss_a, miss_d = MISSING.get(name, (0, 0))
    n_present = N_ROWS - miss_a - miss_d
    s_present = mean * n_present
    sumsq_present = (n_present - 1) * sd * sd + n_present * mean * mean
    # the published sd carries 4 decimals, so the sum of squares may float
    # inside the rounding band when the exact value is infeasible
    ssq_band = 2.0 * (n_present - 1) * sd * 4.5e-5
    fill = mean  # imputation fills the per-column mean of present values
    s_post = s_present + (miss_a + miss_d) * fill
    sa_post, sd_post = solve_class_sums(s_post, chi2_target, died_sign)
    sum_targets_present = (sa_post - miss_a * fill, sd_post - miss_d * fill)
    return shape(name, rng, rows_by_class, (mn, mx, mean, sd),
                 sum_targets_present, sumsq_present, (miss_a, miss_d), ssq_band)


def float_ssq(free_targets, counts, free_ssq, band, var_floor=10.0):
    """Clamp a free sum-of-squares target into its feasible band."""
    min_free = sum(t * t / k for t, k in zip(free_targets, counts) if k)
    k_total = sum(counts)
    desired = max(free_ssq, min_free + k_total * var_floor)
    use = min(desired, free_ssq + band)
    if use < min_free + k_total * 0.5:
        raise RuntimeError(f"sum-of-squares target infeasible even with band "
                           f"({use} < {min_free})")
    return use


def generic_shape(spread=1.0, quantum=1e-6, min_class=0, max_class=1,
                  skew=0.0):
    """Simple two-class shape: draws around class means, pinned min/max rows."""
    def shape(name, rng, rows_by_class, mnmx, sum_targets, sumsq, missing, band):
        mn, mx, mean, sd = mnmx
        vals = np.full(N_ROWS, np.nan)
        # choose missing rows per class
        free_rows = [[], []]
        for c, rows in enumerate(rows_by_class):
            pool = list(rows)
            rng.shuffle(pool)
            free_rows[c] = pool[missing[c]:]
        # pin min/max to designated classes, remove from free set
        min_row = free_rows[min_class][0]
        max_row = free_rows[max_class][0 if max_class != min_class else 1]
        vals[min_row] = mn
        vals[max_row] = mx
        free = [
            [r for r in free_rows[0] if r not in (min_row, max_row)],
            [r for r in free_rows[1] if r not in (min_row, max_row)],
        ]
        pinned_sum = [0.0, 0.0]
        pinned_sum[min_class] += mn
        pinned_sum[max_class] += mx
        pinned_sq = mn * mn + mx * mx
        targets = [sum_targets[c] - pinned_sum[c] for c in range(2)]
        draws = []
        for c in range(2):
            k = len(free[c])
            center = targets[c] / k
            base = rng.normal(0.0, sd * spread, k)
            if skew:
                base = base + skew * (rng.exponential(sd * spread, k) - sd * spread)
            draws.append(np.clip(center + base, mn + (mx - mn) * 1e-4, mx - (mx - mn) * 1e-4))
        free_ssq = float_ssq(targets, [len(f) for f in free], sumsq - pinned_sq, band)
        adj = adjust_to_moments(draws, targets, free_ssq, mn, mx)
        adj = quantize_repair(adj, targets, free_ssq, quantum, mn, mx)
        for c in range(2):
            for r, v in zip(free[c], adj[c]):
                vals[r] = v
        return vals
    return shape


def sentinel_shape(sentinel_counts, interior_hi, quantum=1.0, sentinel_first=None):
    """Columns where most information sits in rows pinned at the 1e6 sentinel.

    sentinel_first orders the per-class pool so that rows satisfying the
    predicate are pinned before the rest (keeps the timing column aligned
    with its companion event flag).
    """
    def shape(name, rng, rows_by_class, mnmx, sum_targets, sumsq, missing, band):
        mn, mx, mean, sd = mnmx
        assert missing == (0, 0)
        vals = np.full(N_ROWS, np.nan)
        free = [[], []]
        pinned_sum = [0.0, 0.0]
        pinned_sq = 0.0
        for c, rows in enumerate(rows_by_class):
            pool = list(rows)
            rng.shuffle(pool)
            if sentinel_first is not None:
                pool.sort(key=lambda r: not sentinel_first(r))  # stable
            k = sentinel_counts[c]
            for r in pool[:k]:
                vals[r] = SENTINEL
            pinned_sum[c] += k * SENTINEL
            pinned_sq += k * SENTINEL * SENTINEL
            free[c] = pool[k:]
        # pin the global minimum on an alive row
        min_row = free[0][0]
        vals[min_row] = mn
        free[0] = free[0][1:]
        pinned_sum[0] += mn
        pinned_sq += mn * mn
        targets = [sum_targets[c] - pinned_sum[c] for c in range(2)]
        free_ssq = float_ssq(targets, [len(f) for f in free], sumsq - pinned_sq, band)
        # right-skewed interior: recovery times bunch low with a long tail
        draws = []
        for c in range(2):
            k = len(free[c])
            center = targets[c] / max(k, 1)
            draws.append(np.clip(center + rng.exponential(center * 0.6, k) - center * 0.6,
                                 mn + 1, interior_hi))
        adj = adjust_to_moments(draws, targets, free_ssq, mn + 0.5, interior_hi)
        adj = quantize_repair(adj, targets, free_ssq, quantum, mn + 0.5, interior_hi)
        for c in range(2):
            for r, v in zip(free[c], adj[c]):
                vals[r] = v
        return vals
    return shape


def survival_time_shape(name, rng, rows_by_class, mnmx, sum_targets, sumsq, missing, band):
    mn, mx, mean, sd = mnmx
    assert missing == (0, 0)
    vals = np.full(N_ROWS, np.nan)
    alive, died = [list(r) for r in rows_by_class]
    rng.shuffle(alive)
    rng.shuffle(died)
    min_row = died[0]      # earliest death holds the minimum
    max_row = alive[0]     # longest follow-up holds the maximum
    vals[min_row] = mn
    vals[max_row] = mx
    free = [alive[1:], died[1:]]
    targets = [sum_targets[0] - mx, sum_targets[1] - mn]
    k_died = len(free[1])
    n_tail = int(round(k_died * DIED_SURVIVAL_TAIL))
    died_draw = np.concatenate([
        rng.exponential(140.0, k_died - n_tail) + 20.0,
        rng.uniform(250.0, DIED_SURVIVAL_MAX, n_tail),
    ])
    died_draw = np.clip(died_draw, mn + 1, DIED_SURVIVAL_MAX)
    alive_draw = np.clip(rng.normal(1500.0, 620.0, len(free[0])),
                         ALIVE_SURVIVAL_MIN, mx - 1)
    free_ssq = float_ssq(targets, [len(f) for f in free], sumsq - mn * mn - mx * mx, band)
    bb = [(ALIVE_SURVIVAL_MIN, mx - 1.0), (mn + 1.0, DIED_SURVIVAL_MAX)]
    adj = adjust_to_moments([alive_draw, died_draw], targets, free_ssq, mn, mx, bin_bounds=bb)
    adj = quantize_repair(adj, targets, free_ssq, 1.0, mn, mx, bin_bounds=bb)
    for c in range(2):
        for r, v in zip(free[c], adj[c]):
            vals[r] = v
    return vals


def age_bin_shape(bin_col, level_edges):
    """recipient_age / donor_age: each value stays inside the age band that
    the row's already-placed categorical column claims for it."""
    def shape(name, rng, rows_by_class, mnmx, sum_targets, sumsq, missing, band):
        mn, mx, mean, sd = mnmx
        assert missing == (0, 0)
        vals = np.full(N_ROWS, np.nan)
        free, lo_b, hi_b = [[], []], [[], []], [[], []]
        pinned_sum = [0.0, 0.0]
        pinned_sq = 0.0
        for c, rows in enumerate(rows_by_class):
            pool = list(rows)
            rng.shuffle(pool)
            for r in pool:
                lo, hi = level_edges[bin_col[r]]
                free[c].append(r)
                lo_b[c].append(max(lo, mn))
                hi_b[c].append(min(hi, mx))
        # pin min on an alive row whose band covers it, max on a died row likewise
        for c, want in ((0, mn), (1, mx)):
            j = next(j for j in range(len(free[c]))
                     if lo_b[c][j] <= want <= hi_b[c][j])
            r = free[c].pop(j)
            lo_b[c].pop(j)
            hi_b[c].pop(j)
            vals[r] = want
            pinned_sum[c] += want
            pinned_sq += want * want
        targets = [sum_targets[c] - pinned_sum[c] for c in range(2)]
        draws = []
        for c in range(2):
            lo = np.array(lo_b[c])
            hi = np.array(hi_b[c])
            draws.append(lo + (hi - lo) * rng.uniform(0.08, 0.92, len(lo)))
        bb = [(np.array(lo_b[c]) + 1e-3, np.array(hi_b[c]) - 1e-3) for c in range(2)]
        free_ssq = float_ssq(targets, [len(f) for f in free], sumsq - pinned_sq, band)
        adj = adjust_to_moments(draws, targets, free_ssq, mn, mx, bin_bounds=bb)
        adj = quantize_repair(adj, targets, free_ssq, 1e-6, mn, mx, bin_bounds=bb)
        for c in range(2):
            for r, v in zip(free[c], adj[c]):
                vals[r] = v
        return vals
    return shape


COLUMN_DECIMALS = {
    "donor_age": 6, "recipient_age": 6, "recipient_body_mass": 1,
    "CD34_x1e6_per_kg": 2, "CD3_x1e8_per_kg": 2, "CD3_to_CD34_ratio": 4,
    "ANC_recovery": 0, "PLT_recovery": 0, "time_to_acute_GvHD_III_IV": 0,
    "survival_time": 0,
}


def format_value(name, v):
    if np.isnan(v):
        return "?"
    d = COLUMN_DECIMALS[name]
    if d == 0:
        return str(int(round(v)))
    s = f"{v:.{d}f}".rstrip("0").rstrip(".")
    return s if s else "0"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(SEED)

    # ---- labels ------------------------------------------------------------
    labels = np.zeros(N_ROWS, dtype=int)
    died_rows = sorted(rng.choice(N_ROWS, size=N_DIED, replace=False))
    labels[died_rows] = 1
    alive_rows = [r for r in range(N_ROWS) if labels[r] == 0]
    rows_by_class = (alive_rows, list(died_rows))

    class ShuffleRng:
        def __init__(self, g): self.g = g
        def shuffle(self, x): self.g.shuffle(x)
        def normal(self, *a): return self.g.normal(*a)
        def exponential(self, *a): return self.g.exponential(*a)
        def uniform(self, *a): return self.g.uniform(*a)

    srng = ShuffleRng(rng)
    builder = ColumnBuilder(srng)

    # ---- categorical searches ---------------------------------------------
    counts = {}

    # recipient age bins: joint search on (10_20, below_10) then (5_10)
    best, best_err = None, math.inf
    for a10 in range(20, 70):
        for b10 in range(20, 70):
            e = (abs(chi2_pair(a10, b10) - DUMMY_CHI2["recipient_age_int_10_20"])
                 + abs(chi2_pair(N_ALIVE - a10, N_DIED - b10) - DUMMY_CHI2["recipient_age_below_10_yes"]))
            if e < best_err:
                best, best_err = (a10, b10), e
    a10, b10 = best
    best, best_err = None, math.inf
    for a5 in range(5, N_ALIVE - a10 - 5):
        for b5 in range(5, N_DIED - b10 - 5):
            e = abs(chi2_pair(a5, b5) - DUMMY_CHI2["recipient_age_int_5_10"])
            if e < best_err:
                best, best_err = (a5, b5), e
    a5, b5 = best
    age_bins = [(N_ALIVE - a10 - a5, a5, a10), (N_DIED - b10 - b5, b5, b10)]
    counts["recipient_age_int"] = {"0_5": (age_bins[0][0], age_bins[1][0]),
                                   "5_10": (a5, b5), "10_20": (a10, b10)}
    counts["recipient_age_below_10"] = {"yes": (N_ALIVE - a10, N_DIED - b10),
                                        "no": (a10, b10)}

    # donor age below 35
    da, db = search_pair(DUMMY_CHI2["donor_age_below_35_yes"], 85, 125)
    counts["donor_age_below_35"] = {"yes": (da, db), "no": (N_ALIVE - da, N_DIED - db)}

    def simple(name, dummy_names, windows, post_includes_missing=False):
        """Multi-level column: search each non-baseline level, baseline gets the rest.

        Searches use per-class counts net of missing cells (the imputation
        mode is arranged to be the baseline level, so the dummy counts are
        unaffected by filling).  recipient_rh is the exception: its mode is
        the dummy level "plus", so its searched counts are post-imputation
        and the missing cells are taken out of "plus" at placement time.
        """
        got = {}
        ma, md = MISSING.get(name, (0, 0))
        rem_a, rem_d = N_ALIVE, N_DIED
        if not post_includes_missing:
            rem_a -= ma
            rem_d -= md
        for lv, dn in dummy_names:
            lo, hi = windows[lv]
            a, b = search_pair(DUMMY_CHI2[dn], lo, hi, a_cap=rem_a, b_cap=rem_d)
            got[lv] = (a, b)
            rem_a -= a
            rem_d -= b
        # when the searched counts are post-imputation (recipient_rh), the
        # missing cells all come out of the mode level at placement time and
        # the baseline keeps its full remainder
        levels = dict(SCHEMA)[name]
        baseline = sorted(levels)[0]
        got[baseline] = (rem_a, rem_d)
        counts[name] = got

    simple("donor_ABO", [("AB", "donor_ABO_AB"), ("A", "donor_ABO_A"), ("B", "donor_ABO_B")],
           {"AB": (8, 30), "A": (45, 80), "B": (20, 45)})
    simple("donor_CMV", [("present", "donor_CMV_present")], {"present": (55, 92)})
    simple("recipient_gender", [("male", "recipient_gender_male")], {"male": (95, 125)})
    simple("recipient_ABO", [("A", "recipient_ABO_A"), ("AB", "recipient_ABO_AB"),
                             ("B", "recipient_ABO_B")],
           {"A": (50, 80), "AB": (8, 28), "B": (25, 48)})
    simple("recipient_rh", [("plus", "recipient_rh_plus")], {"plus": (140, 165)},
           post_includes_missing=True)
    simple("recipient_CMV", [("present", "recipient_CMV_present")], {"present": (55, 84)})
    simple("disease", [("lymphoma", "disease_lymphoma"), ("AML", "disease_AML"),
                       ("nonmalignant", "disease_nonmalignant"),
                       ("chronic", "disease_chronic")],
           {"lymphoma": (9, 9), "AML": (22, 22), "nonmalignant": (45, 70),
            "chronic": (28, 52)})
    counts["disease_group"] = {
        "nonmalignant": counts["disease"]["nonmalignant"],
        "malignant": (N_ALIVE - counts["disease"]["nonmalignant"][0],
                      N_DIED - counts["disease"]["nonmalignant"][1]),
    }
    simple("gender_match", [("other", "gender_match_other")], {"other": (100, 140)})
    simple("ABO_match", [("mismatched", "ABO_match_mismatched")], {"mismatched": (55, 88)})
    simple("CMV_status", [("1", "CMV_status_1"), ("3", "CMV_status_3"),
                          ("2", "CMV_status_2")],
           {"1": (18, 40), "3": (22, 40), "2": (18, 36)})
    simple("HLA_match", [("10-Jul", "HLA_match_10-Jul"), ("10-Sep", "HLA_match_10-Sep"),
                         ("10-Oct", "HLA_match_10-Oct")],
           {"10-Jul": (6, 18), "10-Sep": (42, 66), "10-Oct": (78, 108)})
    simple("HLA_mismatch", [("mismatched", "HLA_mismatch_mismatched")],
           {"mismatched": (48, 85)})
    simple("antigen", [("1", "antigen_1"), ("3", "antigen_3"), ("2", "antigen_2")],
           {"1": (28, 55), "3": (6, 22), "2": (20, 45)})
    simple("allele", [("4", "allele_4"), ("1", "allele_1"), ("3", "allele_3"),
                      ("2", "allele_2")],
           {"4": (1, 6), "1": (25, 50), "3": (10, 28), "2": (18, 40)})
    simple("risk_group", [("low", "risk_group_low")], {"low": (95, 135)})
    simple("stem_cell_source", [("peripheral_blood", "stem_cell_source_peripheral_blood")],
           {"peripheral_blood": (120, 155)})
    simple("tx_post_relapse", [("yes", "tx_post_relapse_yes")], {"yes": (14, 30)})
    simple("relapse", [("yes", "relapse_yes")], {"yes": (50, 62)})
    simple("extensive_chronic_GvHD", [("yes", "extensive_chronic_GvHD_yes")],
           {"yes": (28, 44)})

    # acute GvHD flags: III_IV subset of II_III_IV
    g3 = search_pair(DUMMY_CHI2["acute_GvHD_III_IV_yes"], 36, 50)
    counts["acute_GvHD_III_IV"] = {"yes": g3, "no": (N_ALIVE - g3[0], N_DIED - g3[1])}
    best, best_err = None, math.inf
    for a in range(g3[0], N_ALIVE + 1):
        for b in range(g3[1], N_DIED + 1):
            e = abs(chi2_pair(a, b) - DUMMY_CHI2["acute_GvHD_II_III_IV_yes"])
            if e < best_err:
                best, best_err = (a, b), e
    counts["acute_GvHD_II_III_IV"] = {"yes": best,
                                      "no": (N_ALIVE - best[0], N_DIED - best[1])}

    # HLA_group_1 derived from HLA_match subdivisions
    hm = counts["HLA_match"]
    sep_split = split_counts(hm["10-Sep"][0], hm["10-Sep"][1],
                             DUMMY_CHI2["HLA_group_1_one_allele"],
                             DUMMY_CHI2["HLA_group_1_one_antigen"])
    aug = hm["10-Aug"]
    best, best_err = None, math.inf
    for a3 in range(aug[0] + 1):
        for b3 in range(aug[1] + 1):
            for a2 in range(aug[0] - a3 + 1):
                for b2 in range(aug[1] - b3 + 1):
                    dr = (aug[0] - a3 - a2, aug[1] - b3 - b2)
                    if dr[0] + dr[1] < 1:
                        continue
                    e = (abs(chi2_pair(a3, b3) - DUMMY_CHI2["HLA_group_1_three_diffs"])
                         + abs(chi2_pair(a2, b2) - DUMMY_CHI2["HLA_group_1_two_diffs"]))
                    if e < best_err:
                        best, best_err = (a3, b3, a2, b2), e
    a3, b3, a2, b2 = best
    hg_counts = {
        "matched": hm["10-Oct"],
        "mismatched": hm["10-Jul"],
        "one_allele": sep_split,
        "one_antigen": (hm["10-Sep"][0] - sep_split[0], hm["10-Sep"][1] - sep_split[1]),
        "three_diffs": (a3, b3),
        "two_diffs": (a2, b2),
        "DR_2_2": (aug[0] - a3 - a2, aug[1] - b3 - b2),
    }
    counts["HLA_group_1"] = hg_counts

    # ---- place categorical values on rows ----------------------------------
    # columns derived row-by-row from another column are filled afterwards
    derived = {"recipient_age_below_10", "disease_group", "acute_GvHD_II_III_IV",
               "HLA_group_1"}
    for name, levels in SCHEMA:
        if levels == "n" or name == "survival_status" or name in derived:
            continue
        miss = MISSING.get(name, (0, 0))
        cnt = dict(counts[name])
        if miss != (0, 0):
            # searches were done net of missing except for columns whose
            # imputation mode is not the baseline; recipient_rh fills "plus"
            if name == "recipient_rh":
                cnt["plus"] = (cnt["plus"][0] - miss[0], cnt["plus"][1] - miss[1])
        builder.assign_levels(name, cnt, rows_by_class, miss)

    # row-consistent derivations
    age_int_col = builder.cols["recipient_age_int"]
    builder.cols["recipient_age_below_10"] = [
        "yes" if age_int_col[r] in ("0_5", "5_10") else "no" for r in range(N_ROWS)]
    disease_col = builder.cols["disease"]
    builder.cols["disease_group"] = [
        "nonmalignant" if disease_col[r] == "nonmalignant" else "malignant"
        for r in range(N_ROWS)]
    # grade II-III-IV is a superset of grade III-IV
    g3_col = builder.cols["acute_GvHD_III_IV"]
    g2_col = list(g3_col)
    for c, rows in enumerate(rows_by_class):
        extra = (counts["acute_GvHD_II_III_IV"]["yes"][c]
                 - counts["acute_GvHD_III_IV"]["yes"][c])
        pool = [r for r in rows if g3_col[r] == "no"]
        srng.shuffle(pool)
        for r in pool[:extra]:
            g2_col[r] = "yes"
    builder.cols["acute_GvHD_II_III_IV"] = g2_col

    # HLA_group_1 follows HLA_match row-by-row
    hm_col = builder.cols["HLA_match"]
    hg_col = ["?"] * N_ROWS
    pools = {}
    for c, rows in enumerate(rows_by_class):
        for src, dsts in (("10-Oct", ["matched"]), ("10-Jul", ["mismatched"]),
                          ("10-Sep", ["one_allele", "one_antigen"]),
                          ("10-Aug", ["three_diffs", "two_diffs", "DR_2_2"])):
            rows_src = [r for r in rows if hm_col[r] == src]
            srng.shuffle(rows_src)
            i = 0
            for d in dsts:
                for _ in range(hg_counts[d][c]):
                    hg_col[rows_src[i]] = d
                    i += 1
            assert i == len(rows_src), (src, c, i, len(rows_src))
    # hide two matched cells (one per class) as missing
    for c, rows in enumerate(rows_by_class):
        ms = MISSING["HLA_group_1"][c]
        hidden = [r for r in rows if hg_col[r] == "matched"][:ms]
        for r in hidden:
            hg_col[r] = "?"
    builder.cols["HLA_group_1"] = hg_col

    builder.cols["survival_status"] = [str(labels[r]) for r in range(N_ROWS)]

    # ---- numeric columns ----------------------------------------------------
    shapes = {
        "donor_age": age_bin_shape(
            builder.cols["donor_age_below_35"],
            {"yes": (18.6466, 34.999), "no": (35.0, 55.5534)}),
        "recipient_age": age_bin_shape(
            builder.cols["recipient_age_int"],
            {"0_5": (0.6, 4.999), "5_10": (5.0, 9.999), "10_20": (10.0, 20.2)}),
        "recipient_body_mass": generic_shape(spread=0.85, quantum=0.1, min_class=0, max_class=1),
        "CD34_x1e6_per_kg": generic_shape(spread=0.7, quantum=0.01, min_class=1, max_class=0, skew=0.5),
        "CD3_x1e8_per_kg": generic_shape(spread=0.6, quantum=0.01, min_class=1, max_class=0, skew=0.5),
        "CD3_to_CD34_ratio": generic_shape(spread=0.35, quantum=0.0001, min_class=0, max_class=1, skew=0.9),
        "ANC_recovery": sentinel_shape((0, 5), 60.0),
        "PLT_recovery": sentinel_shape((0, 17), 160.0),
        "time_to_acute_GvHD_III_IV": None,  # sentinel counts derived below
        "survival_time": survival_time_shape,
    }
    # GvHD timing: sentinel = "never occurred"; solve per-class sentinel counts
    # (interior onsets are a few dozen days, so counts follow from the sums)
    s_total = NUMERIC_TARGETS["time_to_acute_GvHD_III_IV"][2] * N_ROWS
    t_chi2, t_sign = NUMERIC_CHI2["time_to_acute_GvHD_III_IV"]
    sa_post, sd_post = solve_class_sums(s_total, t_chi2, t_sign)
    sent_died = int(round((sd_post - 24 * 30) / SENTINEL))
    sent_alive = int(round((sa_post - 18 * 30) / SENTINEL))
    g3_flags = builder.cols["acute_GvHD_III_IV"]
    shapes["time_to_acute_GvHD_III_IV"] = sentinel_shape(
        (sent_alive, sent_died), 120.0,
        sentinel_first=lambda r: g3_flags[r] == "no")

    numeric_vals = {}
    for name, levels in SCHEMA:
        if levels != "n":
            continue
        fn = shapes[name]
        numeric_vals[name] = build_numeric(name, srng, labels, rows_by_class, fn)
        col = [format_value(name, v) for v in numeric_vals[name]]
        builder.cols[name] = col

    # ---- write files --------------------------------------------------------
    names = [n for n, _ in SCHEMA]
    arff = out_dir / "bone_marrow.arff"
    with arff.open("w") as f:
        f.write("% Synthetic benchmark: pediatric stem-cell-transplant outcomes.\n")
        f.write("% Schema, size, and summary statistics mirror the public UCI\n")
        f.write("% 'Bone marrow transplant: children' dataset; every cell value\n")
        f.write(f"% is synthetic (scripts/make_dataset.py, seed {SEED}).\n")
        f.write("@relation bone_marrow_transplant_children\n\n")
        for name, levels in SCHEMA:
            if levels == "n":
                f.write(f"@attribute {name} numeric\n")
            else:
                f.write(f"@attribute {name} {{{','.join(sorted(levels))}}}\n")
        f.write("\n@data\n")
        for r in range(N_ROWS):
            f.write(",".join(builder.cols[n][r] for n in names) + "\n")

    csv = out_dir / "bone_marrow.csv"
    with csv.open("w") as f:
        f.write(",".join(names) + "\n")
        for r in range(N_ROWS):
            f.write(",".join("" if builder.cols[n][r] == "?" else builder.cols[n][r]
                             for n in names) + "\n")

    verify(builder.cols, labels)
    print(f"wrote {arff} and {csv}")


def verify(cols, labels):
    """Mirror of the toolkit pipeline: summaries, impute, encode, chi2 ranking."""
    print("== numeric summaries (n-1 sd) ==")
    worst = 0.0
    for name, (mn, mx, mean, sd) in NUMERIC_TARGETS.items():
        vals = np.array([float(v) for v in cols[name] if v != "?"])
        got = (vals.min(), vals.max(), vals.mean(), vals.std(ddof=1))
        errs = [abs(got[0] - mn), abs(got[1] - mx), abs(got[2] - mean), abs(got[3] - sd)]
        worst = max(worst, max(errs))
        print(f"  {name:28s} min={got[0]:.4f} max={got[1]:.4f} mean={got[2]:.4f} "
              f"sd={got[3]:.4f}  maxerr={max(errs):.2e}")
    assert worst < 5e-4, f"summary mismatch {worst}"

    # impute + encode + chi2
    y = labels
    feats = []
    for name, levels in SCHEMA:
        if name == "survival_status":
            continue
        col = cols[name]
        if levels == "n":
            vals = np.array([np.nan if v == "?" else float(v) for v in col])
            fill = np.nanmean(vals)
            vals = np.where(np.isnan(vals), fill, vals)
            feats.append((name, vals))
    for name, levels in SCHEMA:
        if levels == "n" or name == "survival_status":
            continue
        col = cols[name]
        present = [v for v in col if v != "?"]
        mode = sorted(set(present), key=lambda l: (-present.count(l), l))[0]
        filled = [mode if v == "?" else v for v in col]
        for lv in sorted(levels)[1:]:
            feats.append((f"{name}_{lv}", np.array([1.0 if v == lv else 0.0 for v in filled])))

    scores = []
    for name, x in feats:
        s = x.sum()
        if s == 0:
            scores.append((name, 0.0))
            continue
        o = [x[y == 0].sum(), x[y == 1].sum()]
        e = [s * N_ALIVE / N_ROWS, s * N_DIED / N_ROWS]
        scores.append((name, sum((oo - ee) ** 2 / ee for oo, ee in zip(o, e))))
    order = sorted(range(len(scores)), key=lambda i: (-scores[i][1], i))
    print("== chi2 ranking (top 14) ==")
    for rank, i in enumerate(order[:14], 1):
        print(f"  {rank:2d}. {scores[i][0]:34s} {scores[i][1]:.4f}")
    top5 = [scores[i][0] for i in order[:5]]
    assert top5 == ["PLT_recovery", "ANC_recovery", "time_to_acute_GvHD_III_IV",
                    "survival_time", "recipient_body_mass"], top5
    top11 = {scores[i][0] for i in order[:11]}
    want11 = {"PLT_recovery", "ANC_recovery", "time_to_acute_GvHD_III_IV",
              "survival_time", "recipient_body_mass", "CD34_x1e6_per_kg",
              "CD3_x1e8_per_kg", "CD3_to_CD34_ratio", "recipient_age",
              "relapse_yes", "disease_lymphoma"}
    assert top11 == want11, top11 ^ want11
    rank1 = scores[order[0]][1]
    assert abs(rank1 - 20390478.33) / 20390478.33 < 0.01, rank1
    print("== all dummy scores vs targets (worst 8) ==")
    errs = []
    for name, s in scores:
        if name in DUMMY_CHI2:
            errs.append((abs(s - DUMMY_CHI2[name]), name, s, DUMMY_CHI2[name]))
    errs.sort(reverse=True)
    for e, name, s, t in errs[:8]:
        print(f"  {name:34s} got={s:9.4f} want={t:9.4f}")
    print("verification OK")


if __name__ == "__main__":
    sys.exit(main())

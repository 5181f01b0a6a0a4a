#!/usr/bin/env python3
"""Writes the shipped input datasets under data/.

data/pueblo     Pueblo-like stand-in: 81 synthetic annual peaks (1895-1975,
                NWIS RDB layout in ft^3/s), three historical floods, one
                paleoflood bound, three hydrograph shapes and rating tables.
data/synthetic  Small demo scenario drawn from a known MixedGEV.

Output is deterministic. Re-run from the repository root:
    python3 tools/generate_data.py
"""

import json
import pathlib

import numpy as np
from scipy import stats

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"
CFS_PER_CMS = 1.0 / 0.028316846592
STEP_S = 1800.0


def gev_sample(rng, n, mu, sigma, xi):
    # scipy uses c = -xi
    return stats.genextreme.rvs(-xi, loc=mu, scale=sigma, size=n, random_state=rng)


def write_rdb(path, site, rows):
    lines = [
        "# U.S. Geological Survey",
        "# National Water Information System",
        "# Synthetic stand-in annual peak record; values are generated, not observed.",
        "#",
        f"# sites in this file include:",
        f"#  USGS {site} synthetic stand-in",
        "#",
        "agency_cd\tsite_no\tpeak_dt\tpeak_tm\tpeak_va\tpeak_cd\tgage_ht\tgage_ht_cd\tyear_last_pk\tag_dt\tag_tm\tag_gage_ht\tag_gage_ht_cd",
        "5s\t15s\t10d\t6s\t8s\t33s\t8s\t27s\t4s\t10d\t6s\t8s\t11s",
    ]
    for date, value in rows:
        lines.append(f"USGS\t{site}\t{date}\t\t{value}\t\t\t\t\t\t\t\t")
    path.write_text("\n".join(lines) + "\n")


def gamma_pulse(peak_hours, exponent, duration_hours=72.0, step=STEP_S):
    t = np.arange(0.0, duration_hours * 3600.0 + 0.5 * step, step)
    u = t / (peak_hours * 3600.0)
    q = np.zeros_like(u)
    pos = u > 0
    q[pos] = np.exp(exponent * (np.log(u[pos]) + 1.0 - u[pos]))
    return t, q


def write_hydrograph(path, t, q):
    body = "".join(f"{ti:.0f},{qi:.6g}\n" for ti, qi in zip(t, q))
    path.write_text("time_s,discharge_m3s\n" + body)


def write_rating(path, column, stages, values):
    body = "".join(f"{s:.6g},{v:.8g}\n" for s, v in zip(stages, values))
    path.write_text(f"stage_m,{column}\n" + body)


def shapes(directory):
    # Common time to peak, so a smaller exponent is pointwise larger and the
    # cumulative volumes are ordered trex-like > pmf-like > 1921-like.
    t, q = gamma_pulse(24.0, 3.0)
    write_hydrograph(directory / "hydrograph_trex_like.csv", t, q)
    t, q = gamma_pulse(24.0, 5.0)
    write_hydrograph(directory / "hydrograph_pmf_like.csv", t, q)
    t, q = gamma_pulse(24.0, 8.0)
    write_hydrograph(directory / "hydrograph_1921_like.csv", t, q)


def reservoir(directory, *, storage_coeff, storage_exp, spill_stage, spill_coeff, outlet_coeff, top):
    stages = np.arange(0.0, top + 0.25, 0.5)
    storage = storage_coeff * stages**storage_exp
    # Outlet works below the spillway crest plus an ogee spillway above it.
    outlet = outlet_coeff * np.sqrt(stages)
    spill = np.where(stages > spill_stage, spill_coeff * np.clip(stages - spill_stage, 0, None) ** 1.5, 0.0)
    write_rating(directory / "stage_storage.csv", "storage_m3", stages, storage)
    write_rating(directory / "stage_discharge.csv", "discharge_m3s", stages, outlet + spill)


# ---------------------------------------------------------------- pueblo-like

def pueblo():
    d = ROOT / "pueblo"
    d.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20180607)

    years = np.arange(1895, 1976)
    n = len(years)
    # Snowmelt peaks most years, capped near 300 m^3/s with a long dry-year lower
    # tail; summer rainstorms occasionally dominate.
    snow = gev_sample(rng, n, 160.0, 50.0, -0.35)
    rain = gev_sample(rng, n, 550.0, 250.0, 0.15)
    is_rain = rng.random(n) < 0.10
    peaks = np.where(is_rain, np.maximum(rain, snow), snow)
    peaks = np.clip(peaks, 25.0, None)
    # The June 1921 storm is the flood of record.
    peaks[years == 1921] = 2830.0

    rows = []
    for y, q, r in zip(years, peaks, is_rain):
        month, day = (8, 2 + y % 25) if r else (6, 1 + y % 28)
        if y == 1921:
            month, day = 6, 4
        rows.append((f"{y}-{month:02d}-{day:02d}", int(round(q * CFS_PER_CMS))))
    write_rdb(d / "peaks_07099500_like.rdb", "07099500", rows)

    (d / "historical_paleo.csv").write_text(
        "kind,year_or_age_lower,age_upper,discharge_or_lower,discharge_upper\n"
        "historical,1864,,1130,\n"
        "historical,1893,,850,\n"
        "historical,1894,,990,\n"
        "paleo,700,870,3400,5700\n")
    shapes(d)
    reservoir(d, storage_coeff=2.0e5, storage_exp=2.2, spill_stage=30.0, spill_coeff=120.0,
              outlet_coeff=20.0, top=70.0)

    config = {
        "schema_version": 1,
        "description": "Pueblo-like stand-in run; see README for what is synthetic",
        "data": {"rdb": "peaks_07099500_like.rdb", "rdb_units": "cfs", "historical_paleo": "historical_paleo.csv"},
        "errors": {"cv_gage": 0.10, "cv_historical": 0.25, "paleo_mode_fraction": 0.5, "age_model": "uniform"},
        "likelihood": {"gage_nodes": 11, "historical_nodes": 11, "age_nodes": 11, "paleo_nodes": 11},
        "fit": {"families": ["LN2", "LP3", "GEV", "TCEV", "MixedLP3", "MixedGEV"], "seeds": [1, 2, 3, 4],
                "max_generations": 2000, "mutation_factor": 0.8, "crossover_rate": 0.9,
                "convergence_tol": 0.01, "stall_generations": 300, "stall_tol": 1e-9},
        "hydrographs": [
            {"label": "trex_like", "path": "hydrograph_trex_like.csv"},
            {"label": "pmf_like", "path": "hydrograph_pmf_like.csv"},
            {"label": "flood1921_like", "path": "hydrograph_1921_like.csv"},
        ],
        "routing_step_s": 1800,
        "reservoir": {"stage_storage": "stage_storage.csv", "stage_discharge": "stage_discharge.csv",
                      "initial_stage_m": 22.0, "flood_pool_top_m": 30.0, "crest_m": 40.5},
        "thresholds": {"lower_years": 131000, "upper_years": 376000},
        "assessment": {"comparison_models": ["LP3", "MixedGEV"], "comparison_return_periods": [100, 500, 1000]},
        "output_dir": "../../out/pueblo",
    }
    (d / "config.json").write_text(json.dumps(config, indent=2) + "\n")


# ---------------------------------------------------------------- synthetic demo

def synthetic():
    d = ROOT / "synthetic"
    d.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(7)
    n = 60
    snow = gev_sample(rng, n, 100.0, 30.0, 0.0)
    rain = gev_sample(rng, n, 400.0, 120.0, 0.1)
    peaks = np.where(rng.random(n) < 0.85, snow, rain)
    rows = [(f"{1950 + i}-06-15", f"{q:.1f}") for i, q in enumerate(peaks)]
    write_rdb(d / "peaks.rdb", "00000000", rows)
    (d / "historical_paleo.csv").write_text(
        "kind,year_or_age_lower,age_upper,discharge_or_lower,discharge_upper\n"
        "historical,1925,,700,\n"
        "paleo,300,500,1800,2600\n")
    shapes(d)
    reservoir(d, storage_coeff=1.2e5, storage_exp=2.2, spill_stage=20.0, spill_coeff=40.0,
              outlet_coeff=5.0, top=60.0)
    config = {
        "schema_version": 1,
        "description": "Small demo drawn from a known MixedGEV; reduced optimizer settings",
        "data": {"rdb": "peaks.rdb", "rdb_units": "cms", "historical_paleo": "historical_paleo.csv"},
        "fit": {"seeds": [1, 2], "max_generations": 600, "stall_generations": 150},
        "hydrographs": [
            {"label": "trex_like", "path": "hydrograph_trex_like.csv"},
            {"label": "pmf_like", "path": "hydrograph_pmf_like.csv"},
            {"label": "flood1921_like", "path": "hydrograph_1921_like.csv"},
        ],
        "reservoir": {"stage_storage": "stage_storage.csv", "stage_discharge": "stage_discharge.csv",
                      "initial_stage_m": 15.0, "flood_pool_top_m": 20.0, "crest_m": 30.0},
        "output_dir": "../../out/synthetic",
    }
    (d / "config.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    pueblo()
    synthetic()

"""Report serialization: JSON scalars/fits, CSV tables, provenance chain.

Every report embeds the checksum of the census it was computed from and
the constants used, so a report/census mismatch is detectable.  JSON is
written with sorted keys; CSV columns are fixed per report type (the
orders below are part of the external interface):

    average:   T, pi, empirical_mean, model_value, ratio, elementary_model
    variance:  T, pi, var
    clt:       x, ecdf, model_cdf
    llt:       x, frequency, model_density, scaled_frequency
    wordstats: n, count, mean_l, var_l
    mgf:       key, z, log_value
    pressure:  s, z, P, stderr
"""

from __future__ import annotations

import json
import os

__all__ = ["provenance", "standard_notes", "write_json", "write_csv",
           "report_payload"]

CSV_COLUMNS = {
    "average": ["T", "pi", "empirical_mean", "model_value", "ratio",
                "elementary_model"],
    "variance": ["T", "pi", "var"],
    "clt": ["x", "ecdf", "model_cdf"],
    "llt": ["x", "frequency", "model_density", "scaled_frequency"],
    "wordstats": ["n", "count", "mean_l", "var_l"],
    "mgf": ["key", "z", "log_value"],
    "pressure": ["s", "z", "P", "stderr"],
    "census_info": ["n", "count", "primes", "min_ell"],
}


def provenance(census=None, constants=None) -> dict:
    out = {}
    if census is not None:
        out["census"] = {
            "checksum": f"{census.checksum():016x}",
            "presentation": census.presentation,
            "representation": census.representation,
            "mode": census.mode_kind,
            "n_max": census.n_max,
            "T_cert": census.T_cert,
            "records": len(census),
        }
    if constants is not None:
        out["constants"] = constants.to_dict()
    return out


def standard_notes(census=None) -> list[str]:
    notes = [
        "counts are over directed prime classes; undirected conventions "
        "differ by a factor of 2",
        "word lengths (and the constants A, sigma2, D) depend on the "
        "presentation recorded in the provenance block",
    ]
    if census is not None and census.mode_kind == "free":
        notes.append("free-group (Schottky) census: testbed only; the limit "
                     "theorems are stated for compact surfaces")
    if census is not None and census.mode_kind == "sft":
        notes.append("synthetic subshift census; trace column holds the "
                     "induced value 2*cosh(ell/2)")
    notes.append("generating-function sums ignore the finitely many "
                 "exceptional orbits of the geometric coding")
    return notes


def report_payload(kind: str, report, census=None, constants=None) -> dict:
    return {
        "kind": kind,
        "report": report if isinstance(report, dict) else report.to_dict(),
        "provenance": provenance(census, constants),
        "notes": standard_notes(census),
    }


def write_json(payload: dict, path) -> str:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return os.fspath(path)


def write_csv(kind: str, rows, path) -> str:
    cols = CSV_COLUMNS[kind]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in cols) + "\n")
    return os.fspath(path)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)

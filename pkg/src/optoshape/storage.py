"""File formats: dataset/trace/demo CSVs and calibration/report JSON.

All writers serialize floats with shortest round-trip repr and replace the
target atomically, so a rerun with the same inputs reproduces byte-identical
files and an interrupted run never leaves a truncated artifact.
"""

import csv
import hashlib
import io
import json
import os

import numpy as np

from .calibration import CalibrationDataset, PolyCalibration
from .errors import DataFormatError
from .kinematics import AxisErrorStats, ErrorReport

DATASET_HEADER = ["index", "unit", "pitch_true_deg", "roll_true_deg",
                  "v1_volts", "v2_volts"]
TRACE_HEADER = DATASET_HEADER + [
    "pitch_est_deg", "roll_est_deg",
    "tip_pitch_true_deg", "tip_roll_true_deg",
    "tip_pitch_est_deg", "tip_roll_est_deg",
]
DEMO_HEADER = ["index", "pitch_actual", "pitch_est", "roll_actual", "roll_est"]
TABLE_HEADER = ["orientation", "percent_error", "rms_tip_error_deg",
                "max_tip_error_deg"]


def _fmt(value):
    """Shortest exact decimal form of a float."""
    return repr(float(value))


def _atomic_write_bytes(path, payload):
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def _atomic_write_text(path, text):
    _atomic_write_bytes(path, text.encode("utf-8"))


def _csv_bytes(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _read_rows(path, expected_header):
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataFormatError(f"{path}: empty file", line=1) from None
            if header != expected_header:
                raise DataFormatError(
                    f"{path}: header {header!r} does not match "
                    f"{expected_header!r}", line=1
                )
            return list(reader)
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc


def _parse_float(text, path, line, column):
    try:
        return float(text)
    except ValueError:
        raise DataFormatError(
            f"{path}: bad value {text!r} in column {column}", line=line
        ) from None


def _parse_int(text, path, line, column):
    try:
        return int(text)
    except ValueError:
        raise DataFormatError(
            f"{path}: bad value {text!r} in column {column}", line=line
        ) from None


def dataset_rows(dataset):
    for i in range(len(dataset)):
        yield [
            i,
            dataset.unit_index,
            _fmt(dataset.truths[i, 0]),
            _fmt(dataset.truths[i, 1]),
            _fmt(dataset.voltages[i, 0]),
            _fmt(dataset.voltages[i, 1]),
        ]


def dataset_csv_bytes(datasets):
    """Canonical CSV payload for one or more per-unit datasets."""
    rows = []
    for dataset in datasets:
        rows.extend(dataset_rows(dataset))
    return _csv_bytes(DATASET_HEADER, rows)


def dataset_digest(datasets):
    """Content digest of datasets, formatting-independent by construction."""
    return hashlib.sha256(dataset_csv_bytes(datasets)).hexdigest()


def write_dataset_csv(path, datasets):
    """Write per-unit datasets as one CSV; returns the content digest."""
    payload = dataset_csv_bytes(datasets)
    _atomic_write_bytes(path, payload)
    return hashlib.sha256(payload).hexdigest()


def read_dataset_csv(path):
    """Parse a dataset CSV into per-unit datasets, ascending unit order.

    Raises
    ------
    DataFormatError
        On header mismatch or any malformed row, with its line number.
    """
    rows = _read_rows(path, DATASET_HEADER)
    per_unit = {}
    for n, row in enumerate(rows, start=2):
        if len(row) != len(DATASET_HEADER):
            raise DataFormatError(
                f"{path}: expected {len(DATASET_HEADER)} fields, "
                f"got {len(row)}", line=n
            )
        unit = _parse_int(row[1], path, n, "unit")
        values = [_parse_float(row[k], path, n, DATASET_HEADER[k])
                  for k in range(2, 6)]
        per_unit.setdefault(unit, []).append(values)
    datasets = []
    for unit in sorted(per_unit):
        block = np.asarray(per_unit[unit])
        datasets.append(CalibrationDataset(
            unit_index=unit,
            truths=block[:, :2],
            voltages=block[:, 2:],
        ))
    return datasets


def trace_csv_bytes(trace):
    """Canonical CSV payload for an estimated validation trace."""
    if trace.unit_est is None or trace.tip_est is None:
        raise ValueError("trace has no estimates yet")
    rows = []
    for t in range(trace.n_samples):
        tip = [
            _fmt(trace.tip_truth[t, 0]), _fmt(trace.tip_truth[t, 1]),
            _fmt(trace.tip_est[t, 0]), _fmt(trace.tip_est[t, 1]),
        ]
        for u in range(trace.n_units):
            rows.append([
                t, u,
                _fmt(trace.unit_truth[t, u, 0]), _fmt(trace.unit_truth[t, u, 1]),
                _fmt(trace.voltages[t, u, 0]), _fmt(trace.voltages[t, u, 1]),
                _fmt(trace.unit_est[t, u, 0]), _fmt(trace.unit_est[t, u, 1]),
            ] + tip)
    return _csv_bytes(TRACE_HEADER, rows)


def write_trace_csv(path, trace):
    _atomic_write_bytes(path, trace_csv_bytes(trace))


def read_trace_csv(path):
    """Parse a trace CSV back into aligned tip/unit arrays.

    Returns
    -------
    dict with keys unit_truth (T, n, 2), voltages (T, n, 2),
    unit_est (T, n, 2), tip_truth (T, 2), tip_est (T, 2).
    """
    rows = _read_rows(path, TRACE_HEADER)
    if not rows:
        raise DataFormatError(f"{path}: no data rows", line=2)
    parsed = []
    for n, row in enumerate(rows, start=2):
        if len(row) != len(TRACE_HEADER):
            raise DataFormatError(
                f"{path}: expected {len(TRACE_HEADER)} fields, "
                f"got {len(row)}", line=n
            )
        index = _parse_int(row[0], path, n, "index")
        unit = _parse_int(row[1], path, n, "unit")
        values = [_parse_float(row[k], path, n, TRACE_HEADER[k])
                  for k in range(2, len(TRACE_HEADER))]
        parsed.append((index, unit, values))

    n_units = max(unit for _, unit, _ in parsed) + 1
    n_samples = max(index for index, _, _ in parsed) + 1
    if len(parsed) != n_units * n_samples:
        raise DataFormatError(
            f"{path}: {len(parsed)} rows do not tile {n_samples} samples x "
            f"{n_units} units"
        )
    unit_truth = np.full((n_samples, n_units, 2), np.nan)
    voltages = np.full((n_samples, n_units, 2), np.nan)
    unit_est = np.full((n_samples, n_units, 2), np.nan)
    tip_truth = np.full((n_samples, 2), np.nan)
    tip_est = np.full((n_samples, 2), np.nan)
    for index, unit, v in parsed:
        unit_truth[index, unit] = v[0:2]
        voltages[index, unit] = v[2:4]
        unit_est[index, unit] = v[4:6]
        tip_truth[index] = v[6:8]
        tip_est[index] = v[8:10]
    for name, arr in (("unit rows", unit_truth), ("tip rows", tip_truth)):
        if np.isnan(arr).any():
            raise DataFormatError(f"{path}: missing {name} leave gaps")
    return {
        "unit_truth": unit_truth,
        "voltages": voltages,
        "unit_est": unit_est,
        "tip_truth": tip_truth,
        "tip_est": tip_est,
    }


def demo_csv_bytes(result):
    rows = []
    for i in range(result.actual.shape[0]):
        rows.append([
            i,
            _fmt(result.actual[i, 0]), _fmt(result.estimated[i, 0]),
            _fmt(result.actual[i, 1]), _fmt(result.estimated[i, 1]),
        ])
    return _csv_bytes(DEMO_HEADER, rows)


def write_demo_csv(path, result):
    _atomic_write_bytes(path, demo_csv_bytes(result))


def calibration_to_dict(cal, created_from):
    return {
        "unit_index": int(cal.unit_index),
        "k": [float(x) for x in cal.k],
        "j": [float(x) for x in cal.j],
        "fit_rms": {
            "pitch": float(cal.fit_rms_pitch_deg),
            "roll": float(cal.fit_rms_roll_deg),
        },
        "created_from": created_from,
    }


def write_calibrations_json(path, cals, created_from):
    """Persist per-unit calibrations as a JSON array of coefficient documents."""
    docs = [calibration_to_dict(c, created_from) for c in cals]
    _atomic_write_text(path, json.dumps(docs, indent=2) + "\n")


def _calibration_from_dict(doc, path):
    try:
        k = [float(x) for x in doc["k"]]
        j = [float(x) for x in doc["j"]]
        if len(k) != 8 or len(j) != 8:
            raise DataFormatError(
                f"{path}: coefficient vectors must have 8 entries"
            )
        return PolyCalibration(
            unit_index=int(doc["unit_index"]),
            k=np.asarray(k),
            j=np.asarray(j),
            fit_rms_pitch_deg=float(doc["fit_rms"]["pitch"]),
            fit_rms_roll_deg=float(doc["fit_rms"]["roll"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"{path}: malformed calibration: {exc}") from exc


def read_calibrations_json(path):
    """Load one or many calibration documents, ascending unit order."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: not valid JSON: {exc}") from exc
    docs = raw if isinstance(raw, list) else [raw]
    cals = [_calibration_from_dict(doc, path) for doc in docs]
    cals.sort(key=lambda c: c.unit_index)
    return cals


def _axis_to_dict(stats):
    return {
        "rms_deg": float(stats.rms_deg),
        "max_deg": float(stats.max_deg),
        "percent_error": None if stats.percent_error is None
        else float(stats.percent_error),
        "repeatability_std_deg": None if stats.repeatability_std_deg is None
        else float(stats.repeatability_std_deg),
    }


def report_to_dict(report):
    return {
        "cycles": int(report.cycles),
        "pitch": _axis_to_dict(report.pitch),
        "roll": _axis_to_dict(report.roll),
    }


def write_report_json(path, report):
    _atomic_write_text(path, json.dumps(report_to_dict(report), indent=2) + "\n")


def read_report_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        axes = {}
        for axis in ("pitch", "roll"):
            a = raw[axis]
            axes[axis] = AxisErrorStats(
                rms_deg=float(a["rms_deg"]),
                max_deg=float(a["max_deg"]),
                percent_error=None if a["percent_error"] is None
                else float(a["percent_error"]),
                repeatability_std_deg=None if a["repeatability_std_deg"] is None
                else float(a["repeatability_std_deg"]),
            )
        return ErrorReport(pitch=axes["pitch"], roll=axes["roll"],
                           cycles=int(raw["cycles"]))
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise DataFormatError(f"{path}: malformed report: {exc}") from exc


def table_csv_bytes(report):
    """Summary table, one row per axis: percent, RMS, and max tip error."""
    rows = []
    for axis in ("pitch", "roll"):
        stats = report.axis(axis)
        pct = "" if stats.percent_error is None else _fmt(stats.percent_error)
        rows.append([axis, pct, _fmt(stats.rms_deg), _fmt(stats.max_deg)])
    return _csv_bytes(TABLE_HEADER, rows)


def write_table_csv(path, report):
    _atomic_write_bytes(path, table_csv_bytes(report))

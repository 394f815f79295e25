"""File formats: dataset CSV, coefficient tables, spectrum tables, reports.

All writers emit floats through repr() so values round-trip exactly and
output bytes are reproducible run to run.
"""

from __future__ import annotations

import csv
import json
from typing import TYPE_CHECKING

import numpy as np

from .coefficients import HarmonicCoefficients, level_offsets
from .regression import Dataset
from .sequence_model import PosteriorModel
from .spectra import PowerSpectrum, table_spectrum

if TYPE_CHECKING:
    from .experiments import ContractionReport

DATASET_HEADER = ["x", "y", "z", "response"]
REPORT_HEADER = ["n", "L_n", "rmse_mean", "rmse_sd"]


class DataFormatError(ValueError):
    """Malformed input file; carries the offending path and line number."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = f"{path}" + (f":{line}" if line is not None else "")
        super().__init__(f"{where}: {message}" if path is not None else message)


def _float_cell(raw: str, path, line: int, column: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise DataFormatError(f"column {column!r} is not a number: {raw!r}", path, line) from None


def read_dataset_csv(path, noise_var: float) -> Dataset:
    """Read `x,y,z,response` rows; the noise variance is supplied by the caller."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("empty file", path, 1) from None
        if [h.strip() for h in header] != DATASET_HEADER:
            raise DataFormatError(
                f"expected header {','.join(DATASET_HEADER)!r}, got {','.join(header)!r}", path, 1
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise DataFormatError(f"expected 4 columns, got {len(row)}", path, line_no)
            rows.append(
                [_float_cell(cell, path, line_no, name) for cell, name in zip(row, DATASET_HEADER)]
            )
    if not rows:
        raise DataFormatError("no data rows", path, 2)
    arr = np.asarray(rows)
    points, responses = arr[:, :3], arr[:, 3]
    norms = np.linalg.norm(points, axis=1)
    bad = np.nonzero(np.abs(norms - 1.0) > 1e-6)[0]
    if bad.size:
        raise DataFormatError(
            f"point is not on the unit sphere (norm {norms[bad[0]]:.6g})", path, int(bad[0]) + 2
        )
    # Re-normalize away the residual decimal roundoff so downstream unit
    # checks at 1e-9 hold for hand-written files.
    points = points / norms[:, None]
    return Dataset(points=points, responses=responses, noise_var=noise_var)


def write_dataset_csv(data: Dataset, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(DATASET_HEADER) + "\n")
        for point, response in zip(data.points, data.responses):
            fh.write(
                f"{float(point[0])!r},{float(point[1])!r},"
                f"{float(point[2])!r},{float(response)!r}\n"
            )


def _mode_index_pairs(d: int, max_degree: int):
    offsets = level_offsets(d, max_degree)
    for ell in range(max_degree + 1):
        for m in range(offsets[ell + 1] - offsets[ell]):
            yield ell, m


def write_posterior_csv(model: PosteriorModel, path) -> None:
    """Fitted coefficient table `ell,m,mean,variance` (variance is per level)."""
    with open(path, "w", newline="") as fh:
        fh.write("ell,m,mean,variance\n")
        for (ell, m), mean in zip(
            _mode_index_pairs(model.d, model.trunc_degree), model.means.values
        ):
            fh.write(f"{ell},{m},{float(mean)!r},{float(model.level_variances[ell])!r}\n")


def write_coefficients_csv(coeffs: HarmonicCoefficients, path) -> None:
    """Plain coefficient table `ell,m,coeff`."""
    with open(path, "w", newline="") as fh:
        fh.write("ell,m,coeff\n")
        for (ell, m), value in zip(
            _mode_index_pairs(coeffs.d, coeffs.max_degree), coeffs.values
        ):
            fh.write(f"{ell},{m},{float(value)!r}\n")


def write_spectrum_csv(spec: PowerSpectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("ell,C\n")
        for ell, value in enumerate(spec.values):
            fh.write(f"{ell},{float(value)!r}\n")


def read_spectrum_csv(path, d: int = 2) -> PowerSpectrum:
    """Read a table spectrum `ell,C` with contiguous degrees from 0."""
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["ell", "C"]:
            raise DataFormatError("expected header 'ell,C'", path, 1)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataFormatError(f"expected 2 columns, got {len(row)}", path, line_no)
            ell = _float_cell(row[0], path, line_no, "ell")
            if ell != len(values):
                raise DataFormatError(
                    f"degrees must be contiguous from 0, got {row[0]}", path, line_no
                )
            values.append(_float_cell(row[1], path, line_no, "C"))
    if not values:
        raise DataFormatError("no spectrum rows", path, 2)
    return table_spectrum(d, values)


def write_report_csv(report: "ContractionReport", path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(REPORT_HEADER) + "\n")
        for row in report.rows:
            fh.write(f"{row.n},{row.trunc_degree},{row.rmse_mean!r},{row.rmse_sd!r}\n")


def write_report_json(report: "ContractionReport", path) -> None:
    from .experiments import report_to_dict

    with open(path, "w") as fh:
        json.dump(report_to_dict(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_report_json(path) -> "ContractionReport":
    from .experiments import report_from_dict

    with open(path) as fh:
        return report_from_dict(json.load(fh))


def read_rmse_table(path) -> list[tuple[float, float]]:
    """(n, rmse) pairs from a report CSV or a bare two-column `n,rmse` file."""
    pairs = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataFormatError("empty file", path, 1)
        header = [h.strip() for h in header]
        if header == REPORT_HEADER:
            n_col, rmse_col = 0, 2
        elif len(header) == 2:
            n_col, rmse_col = 0, 1
        else:
            raise DataFormatError(
                f"expected header {','.join(REPORT_HEADER)!r} or two columns", path, 1
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            pairs.append(
                (
                    _float_cell(row[n_col], path, line_no, "n"),
                    _float_cell(row[rmse_col], path, line_no, "rmse"),
                )
            )
    if not pairs:
        raise DataFormatError("no data rows", path, 2)
    return pairs

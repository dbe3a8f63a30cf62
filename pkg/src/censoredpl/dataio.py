"""Reading measurement files, writing results, and emitting plot data.

File grammar (CSV, text only):

  - metadata/comment lines start with '#'; metadata lines read '# key = value'
    with keys d0, c, frequency_hz (unknown keys are ignored as comments)
  - the first non-comment line is the column header
    'distance_m,pathloss_db' optionally followed by ',censored'
  - data rows are decimal numbers ('.' decimal point, no thousands
    separators); the censored flag is 0 or 1

Without a censored column, rows at or above the level c are censored at
ingest. Floats are serialized via repr, the shortest representation that
round-trips the exact double. All writes go through a temp file and an
atomic rename, so failures never leave a partial output behind.
"""

import hashlib
import json
import math
import os
import tempfile
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .exceptions import (
    InvariantError,
    MissingMetadataError,
    ParseError,
    WriteError,
)
from .model import CensoredSample, Dataset, PathlossParams, mean_pathloss
from .ols import OlsFit
from .tobit import TobitFit

_METADATA_KEYS = ("d0", "c", "frequency_hz")
_HEADER_2 = ("distance_m", "pathloss_db")
_HEADER_3 = ("distance_m", "pathloss_db", "censored")

#: Sampling resolution of emitted mean-pathloss curves.
CURVE_POINTS = 200


def read_dataset(
    path,
    d0: float | None = None,
    c: float | None = None,
    frequency_hz: float | None = None,
) -> Dataset:
    """Parse a measurement file into a Dataset.

    Keyword arguments override the file's metadata. Errors carry 1-based
    line numbers; a missing censoring level or reference distance raises
    MissingMetadataError naming the key.
    """
    metadata: dict[str, float] = {}
    header: tuple[str, ...] | None = None
    rows: list[tuple[int, list[str]]] = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}")

    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            _parse_metadata(line, number, metadata)
            continue
        fields = [f.strip() for f in line.split(",")]
        if header is None:
            if tuple(fields) not in (_HEADER_2, _HEADER_3):
                raise ParseError(
                    "expected header 'distance_m,pathloss_db[,censored]', "
                    f"got {line!r}",
                    line=number,
                )
            header = tuple(fields)
            continue
        if len(fields) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, got {len(fields)}", line=number
            )
        rows.append((number, fields))

    if header is None:
        raise ParseError("no column header line found")
    if not rows:
        raise ParseError("no data rows")

    if d0 is None:
        d0 = metadata.get("d0")
    if d0 is None:
        raise MissingMetadataError("d0")
    if c is None:
        c = metadata.get("c")
    if c is None:
        raise MissingMetadataError("c")
    if frequency_hz is None:
        frequency_hz = metadata.get("frequency_hz")

    has_flag = len(header) == 3
    samples = []
    for number, fields in rows:
        distance = _parse_float(fields[0], "distance_m", number)
        value = _parse_float(fields[1], "pathloss_db", number)
        if has_flag:
            if fields[2] not in ("0", "1"):
                raise ParseError(f"censored flag must be 0 or 1, got {fields[2]!r}", line=number)
            censored = fields[2] == "1"
            if censored and value != c:
                raise InvariantError(
                    f"line {number}: censored row must carry the censoring level "
                    f"{c!r}, got {value!r}"
                )
            if not censored and value >= c:
                raise InvariantError(
                    f"line {number}: uncensored value {value!r} is at or above "
                    f"the censoring level {c!r}"
                )
        else:
            censored = value >= c
            if censored:
                value = c
        if distance < d0:
            raise InvariantError(
                f"line {number}: distance {distance!r} is below the reference "
                f"distance d0={d0!r}"
            )
        samples.append(CensoredSample(distance, value, censored))

    return Dataset(tuple(samples), d0=d0, c=c, frequency_hz=frequency_hz)


def _parse_metadata(line: str, number: int, metadata: dict) -> None:
    body = line.lstrip("#").strip()
    if "=" not in body:
        return
    key, _, value = body.partition("=")
    key = key.strip()
    if key not in _METADATA_KEYS:
        return
    try:
        metadata[key] = float(value.strip())
    except ValueError:
        raise ParseError(f"metadata {key} is not a number: {value.strip()!r}", line=number)


def _parse_float(text: str, column: str, number: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{column} is not a number: {text!r}", line=number)


def write_dataset(dataset: Dataset, path) -> None:
    """Serialize a Dataset so that read_dataset restores it exactly."""
    lines = [f"# d0 = {dataset.d0!r}", f"# c = {dataset.c!r}"]
    if dataset.frequency_hz is not None:
        lines.append(f"# frequency_hz = {dataset.frequency_hz!r}")
    lines.append(",".join(_HEADER_3))
    for s in dataset.samples:
        lines.append(f"{s.distance!r},{s.value!r},{1 if s.censored else 0}")
    _atomic_write(path, "\n".join(lines) + "\n")


def file_digest(path) -> str:
    """SHA-256 hex digest of a file's raw bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def result_document(
    dataset: Dataset,
    ols: OlsFit | None = None,
    tobit: TobitFit | None = None,
    tobit_se: tuple | None = None,
    source: str | None = None,
    digest: str | None = None,
) -> dict:
    """Assemble the JSON result document for a fitting run.

    The censored-ML section carries se_sigma_sq; the least-squares section
    does not (its sampling formulas cover only the intercept and slope).
    Key order is fixed so identical runs serialize identically.
    """
    document = {
        "tool": {"name": "censoredpl", "version": __version__},
        "input": {"path": source, "sha256": digest},
        "dataset": {
            "n_samples": len(dataset.samples),
            "n_censored": dataset.n_censored,
            "censored_fraction": dataset.censored_fraction,
            "d0": dataset.d0,
            "c": dataset.c,
            "frequency_hz": dataset.frequency_hz,
        },
    }
    if ols is not None:
        document["ols"] = {
            "mode": ols.mode.value,
            "pl_d0": ols.pl_d0,
            "n": ols.n,
            "sigma_sq_hat": ols.sigma_sq_hat,
            "se_pl_d0": ols.se_pl_d0,
            "se_n": ols.se_n,
            "n_used": ols.n_used,
        }
    if tobit is not None:
        se_pl_d0, se_n, se_sigma_sq = tobit_se if tobit_se is not None else (None,) * 3
        document["tobit"] = {
            "pl_d0": tobit.params.pl_d0,
            "n": tobit.params.n,
            "sigma": tobit.params.sigma,
            "sigma_sq": tobit.params.sigma**2,
            "se_pl_d0": se_pl_d0,
            "se_n": se_n,
            "se_sigma_sq": se_sigma_sq,
            "nll": tobit.nll,
            "converged": tobit.converged,
            "iterations": tobit.iterations,
            "max_abs_gradient": tobit.max_abs_gradient,
            "fixed_pl_d0": tobit.fixed_pl_d0,
            "n_censored": tobit.n_censored,
            "n_uncensored": tobit.n_uncensored,
        }
    return document


def write_result(document: dict, path) -> None:
    """Write a result document as JSON (atomically)."""
    _atomic_write(path, result_text(document))


def result_text(document: dict) -> str:
    """Strict-JSON serialization of a result or report document."""
    return json.dumps(jsonable(document), indent=2, allow_nan=False) + "\n"


def jsonable(obj):
    """Recursively replace non-JSON floats (inf, nan) with strings."""
    if isinstance(obj, dict):
        return {key: jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(value) for value in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        if math.isnan(obj):
            return "nan"
        return "inf" if obj > 0 else "-inf"
    return obj


def curve_distances(dataset: Dataset) -> np.ndarray:
    """Log-spaced curve support from d0 to the farthest sample."""
    top = max(float(np.max(dataset.distances)), dataset.d0 * (1.0 + 1e-9))
    return np.geomspace(dataset.d0, top, CURVE_POINTS)


def emit_plot_data(
    dataset: Dataset,
    fits: dict[str, PathlossParams],
    path,
    svg_path=None,
) -> None:
    """Write plot-ready text: samples, fitted mean curves, censoring level.

    The samples section lists every measurement; the curves section tabulates
    each fit's mean pathloss on 200 log-spaced distances from d0, next to a
    constant censor_db column. ``svg_path`` additionally renders a static
    scatter-and-lines SVG with a logarithmic distance axis.
    """
    if not fits:
        raise WriteError("at least one fit is required to emit plot data")
    grid = curve_distances(dataset)
    curves = {label: mean_pathloss(p, grid, dataset.d0) for label, p in fits.items()}

    lines = [f"# d0 = {dataset.d0!r}", f"# c = {dataset.c!r}", "# section = samples",
             ",".join(_HEADER_3)]
    for s in dataset.samples:
        lines.append(f"{s.distance!r},{s.value!r},{1 if s.censored else 0}")
    lines.append("# section = curves")
    labels = list(curves)
    lines.append(",".join(["distance_m"] + [f"{label}_db" for label in labels] + ["censor_db"]))
    for i, d in enumerate(grid):
        row = [repr(float(d))]
        row += [repr(float(curves[label][i])) for label in labels]
        row.append(repr(dataset.c))
        lines.append(",".join(row))
    _atomic_write(path, "\n".join(lines) + "\n")

    if svg_path is not None:
        _atomic_write(svg_path, _render_svg(dataset, grid, curves))


_SVG_COLORS = ("#1b6ca8", "#c44536", "#3a7d44", "#7d3a9a", "#b8860b")


def _render_svg(dataset: Dataset, grid: np.ndarray, curves: dict) -> str:
    width, height = 720, 480
    left, right, top, bottom = 70, 20, 20, 50
    plot_w = width - left - right
    plot_h = height - top - bottom

    x_all = np.log10(np.concatenate([dataset.distances, grid]))
    y_all = list(dataset.values) + [v for c in curves.values() for v in c]
    if math.isfinite(dataset.c):
        y_all.append(dataset.c)
    x_lo, x_hi = float(np.min(x_all)), float(np.max(x_all))
    y_lo, y_hi = min(y_all), max(y_all)
    x_span = (x_hi - x_lo) or 1.0
    y_pad = 0.05 * ((y_hi - y_lo) or 1.0)
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def sx(d):
        return left + (math.log10(d) - x_lo) / x_span * plot_w

    def sy(v):
        return top + (y_hi - v) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#444"/>',
    ]
    decade = math.ceil(x_lo)
    while decade <= x_hi:
        x = left + (decade - x_lo) / x_span * plot_w
        parts.append(f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + plot_h}" '
                     'stroke="#ccc" stroke-width="0.5"/>')
        parts.append(f'<text x="{x:.2f}" y="{top + plot_h + 18}" text-anchor="middle" '
                     f'font-size="12">{10.0**decade:g}</text>')
        decade += 1
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        v = y_lo + frac * (y_hi - y_lo)
        y = sy(v)
        parts.append(f'<text x="{left - 8}" y="{y:.2f}" text-anchor="end" '
                     f'font-size="12" dominant-baseline="middle">{v:.0f}</text>')
    parts.append(f'<text x="{left + plot_w / 2}" y="{height - 12}" text-anchor="middle" '
                 'font-size="13">distance (m)</text>')
    parts.append(f'<text x="18" y="{top + plot_h / 2}" text-anchor="middle" font-size="13" '
                 f'transform="rotate(-90 18 {top + plot_h / 2})">pathloss (dB)</text>')

    if math.isfinite(dataset.c):
        y = sy(dataset.c)
        parts.append(f'<line class="censor" x1="{left}" y1="{y:.2f}" x2="{left + plot_w}" '
                     f'y2="{y:.2f}" stroke="#888" stroke-dasharray="6 4"/>')
    for k, (label, values) in enumerate(curves.items()):
        color = _SVG_COLORS[k % len(_SVG_COLORS)]
        points = " ".join(f"{sx(d):.2f},{sy(v):.2f}" for d, v in zip(grid, values))
        parts.append(f'<polyline class="curve" fill="none" stroke="{color}" '
                     f'stroke-width="1.5" points="{points}"/>')
        parts.append(f'<text x="{left + plot_w - 8}" y="{top + 16 + 16 * k}" text-anchor="end" '
                     f'font-size="12" fill="{color}">{escape(label)}</text>')
    for s in dataset.samples:
        cls = "sample censored" if s.censored else "sample"
        fill = "#999" if s.censored else "#1b6ca8"
        parts.append(f'<circle class="{cls}" cx="{sx(s.distance):.2f}" cy="{sy(s.value):.2f}" '
                     f'r="2.5" fill="{fill}" fill-opacity="0.6"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _atomic_write(path, text: str) -> None:
    # Temp file in the target directory plus os.replace: readers never see
    # a partial file, and a failed run leaves nothing behind.
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}")



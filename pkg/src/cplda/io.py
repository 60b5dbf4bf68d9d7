"""File formats: binary tensors, dataset directories, fitted-model files.

Tensors travel in a small self-describing binary container.  The layout is
a 5-byte magic string ``DTEN1``, the tensor order as an unsigned 32-bit
little-endian integer, one unsigned 32-bit little-endian integer per mode
dimension, and the entries as IEEE 754 float64 little-endian in
colexicographic (first index fastest) order.  Datasets and fitted models
are directories of such files plus CSV/JSON sidecars, so every artifact
stays inspectable with standard tools.
"""

import csv
import json
import struct
from pathlib import Path

import numpy as np

from . import discriminant, refine, tensor, warmstart

_MAGIC = b"DTEN1"

_LABELS_FILE = "labels.csv"
_SAMPLE_PATTERN = "sample_%05d.dten"


def write_dten(path, x):
    """Write a tensor to ``path`` in the DTEN1 binary format."""
    x = np.asarray(x, dtype=float)
    header = _MAGIC + struct.pack("<I", x.ndim)
    header += struct.pack("<%dI" % x.ndim, *x.shape)
    payload = tensor.vec(x).astype("<f8").tobytes()
    Path(path).write_bytes(header + payload)


def read_dten(path):
    """Read a DTEN1 file back into an ndarray.

    Raises ValueError for a wrong magic string or a byte count that does
    not match the header.
    """
    buf = Path(path).read_bytes()
    if buf[:5] != _MAGIC:
        raise ValueError("bad magic in %s: expected DTEN1" % path)
    if len(buf) < 9:
        raise ValueError("truncated header in %s" % path)
    order = struct.unpack_from("<I", buf, 5)[0]
    if order < 1:
        raise ValueError("tensor order must be >= 1, got %d" % order)
    if len(buf) < 9 + 4 * order:
        raise ValueError("truncated header in %s" % path)
    dims = struct.unpack_from("<%dI" % order, buf, 9)
    count = int(np.prod(dims))
    want = 9 + 4 * order + 8 * count
    if len(buf) != want:
        raise ValueError(
            "file size mismatch in %s: expected %d bytes, got %d"
            % (path, want, len(buf))
        )
    values = np.frombuffer(buf, dtype="<f8", count=count, offset=9 + 4 * order)
    return tensor.unvec(values.astype(float), dims)


def write_dataset(dirpath, x1, x2):
    """Write labeled samples as one DTEN1 file each plus a labels.csv.

    ``x1`` and ``x2`` hold class-1 and class-2 samples along axis 0.
    Files are numbered in write order, class 1 first.
    """
    dirpath = Path(dirpath)
    dirpath.mkdir(parents=True, exist_ok=True)
    rows = []
    index = 0
    for label, block in ((1, x1), (2, x2)):
        for sample in np.asarray(block, dtype=float):
            name = _SAMPLE_PATTERN % index
            write_dten(dirpath / name, sample)
            rows.append((index, name, label))
            index += 1
    with open(dirpath / _LABELS_FILE, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "file", "label"])
        writer.writerows(rows)


def read_dataset(dirpath):
    """Read a dataset directory; returns (samples, labels).

    Samples are stacked along axis 0 in labels.csv row order.
    """
    dirpath = Path(dirpath)
    labels_path = dirpath / _LABELS_FILE
    if not labels_path.exists():
        raise FileNotFoundError("no %s in %s" % (_LABELS_FILE, dirpath))
    samples = []
    labels = []
    with open(labels_path, newline="") as fh:
        for row in csv.DictReader(fh):
            samples.append(read_dten(dirpath / row["file"]))
            labels.append(int(row["label"]))
    if not samples:
        raise ValueError("dataset %s has no samples" % dirpath)
    return np.stack(samples), np.asarray(labels)


def save_model(path, model):
    """Write a low-rank model (weights and factor matrices) as JSON."""
    doc = {
        "weights": model.weights.tolist(),
        "factors": [a.tolist() for a in model.factors],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_model(path):
    doc = json.loads(Path(path).read_text())
    return refine.CpModel(
        weights=np.asarray(doc["weights"], dtype=float),
        factors=[np.asarray(a, dtype=float) for a in doc["factors"]],
    )


def save_warm_start(path, ws):
    doc = {
        "factors": [a.tolist() for a in ws.factors],
        "singular_values": ws.singular_values.tolist(),
        "split": list(ws.split),
        "groups": [list(g) for g in ws.groups],
        "branches": list(ws.branches),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_warm_start(path):
    doc = json.loads(Path(path).read_text())
    return warmstart.WarmStart(
        factors=[np.asarray(a, dtype=float) for a in doc["factors"]],
        singular_values=np.asarray(doc["singular_values"], dtype=float),
        split=tuple(doc["split"]),
        groups=[list(g) for g in doc["groups"]],
        branches=list(doc["branches"]),
    )


def save_estimate(dirpath, est):
    """Write a discriminant estimate as tensors plus a meta.json."""
    dirpath = Path(dirpath)
    dirpath.mkdir(parents=True, exist_ok=True)
    write_dten(dirpath / "b_hat.dten", est.b_hat)
    write_dten(dirpath / "mean1.dten", est.mean1)
    write_dten(dirpath / "mean2.dten", est.mean2)
    meta = {
        "precisions": [p.tolist() for p in est.precisions],
        "prior1": est.prior1,
        "prior2": est.prior2,
        "c_sigma": est.c_sigma,
        "ridge": list(est.ridge),
    }
    (dirpath / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def load_estimate(dirpath):
    dirpath = Path(dirpath)
    meta = json.loads((dirpath / "meta.json").read_text())
    return discriminant.DiscriminantEstimate(
        b_hat=read_dten(dirpath / "b_hat.dten"),
        mean1=read_dten(dirpath / "mean1.dten"),
        mean2=read_dten(dirpath / "mean2.dten"),
        precisions=tuple(
            np.asarray(p, dtype=float) for p in meta["precisions"]
        ),
        prior1=meta["prior1"],
        prior2=meta["prior2"],
        c_sigma=meta["c_sigma"],
        ridge=tuple(meta["ridge"]),
    )


def write_fit_report_csv(path, report):
    """Write per-iteration refinement diagnostics as CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "basis_change", "min_singular_value"])
        for i, (change, sval) in enumerate(
            zip(report.basis_changes, report.min_singular_values), start=1
        ):
            writer.writerow([i, repr(change), repr(sval)])


def write_predictions_csv(path, statistics, labels):
    """Write per-sample decision statistics and predicted labels as CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "statistic", "label"])
        for i, (stat, label) in enumerate(zip(statistics, labels)):
            writer.writerow([i, repr(float(stat)), int(label)])

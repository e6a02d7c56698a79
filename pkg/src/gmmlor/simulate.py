"""Synthetic line-of-response generation from a known mixture.

Each event draws an emission point from its component's bivariate
normal and a detector angle uniform on [-pi/2, pi/2); the recorded
oriented distance is the one putting the line exactly through the
point, s = -x sin(phi) + y cos(phi).  No detector blur is added: the
only randomness is in the emission point and the angle.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .model import MixtureModel2D
from .rng import SeededStream, cholesky_2x2

CSV_HEADER = ("s", "phi")
CSV_HEADER_LABELED = ("s", "phi", "label")


@dataclass(frozen=True)
class SimulationResult:
    """LoR sample plus per-event ground-truth component labels."""

    s: np.ndarray
    phi: np.ndarray
    labels: np.ndarray
    counts: tuple[int, ...]

    def __post_init__(self):
        for arr in (self.s, self.phi, self.labels):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self.s.size


def component_counts(model: MixtureModel2D, n_total: int, stream: SeededStream):
    """Split n_total into per-component counts by iid label draws.

    Equivalent to one multinomial draw; done label-by-label so the
    randomness stays inside the shared raw stream.
    """
    labels = stream.categorical(model.weights, n_total)
    return np.bincount(labels, minlength=len(model.components))


def simulate_lors(
    model: MixtureModel2D,
    *,
    counts=None,
    n_total: int | None = None,
    seed: int = 0,
    shuffle: bool = False,
) -> SimulationResult:
    """Sample LoRs from ``model``.

    Exactly one of ``counts`` (events per component) and ``n_total``
    (total events, split by the mixture weights) must be given.  Events
    come out blocked by component unless ``shuffle`` is set, in which
    case a seeded permutation interleaves them; labels are permuted
    alongside so the pairing survives.
    """
    stream = SeededStream(seed)
    if (counts is None) == (n_total is None):
        raise InputError("give exactly one of counts and n_total")
    if counts is None:
        if n_total < 0:
            raise InputError("n_total must be nonnegative")
        counts = component_counts(model, n_total, stream)
    counts = [int(c) for c in counts]
    if len(counts) != len(model.components):
        raise InputError(
            f"got {len(counts)} counts for {len(model.components)} components"
        )
    if any(c < 0 for c in counts):
        raise InputError("counts must be nonnegative")

    s_blocks, phi_blocks, label_blocks = [], [], []
    for k, (comp, n_k) in enumerate(zip(model.components, counts)):
        if n_k == 0:
            continue
        chol = cholesky_2x2(comp.covariance)
        z = stream.standard_normal_pairs(n_k)
        points = z @ chol.T + comp.mean
        phi = stream.angles(n_k)
        s = -points[:, 0] * np.sin(phi) + points[:, 1] * np.cos(phi)
        s_blocks.append(s)
        phi_blocks.append(phi)
        label_blocks.append(np.full(n_k, k, dtype=np.int64))

    if s_blocks:
        s = np.concatenate(s_blocks)
        phi = np.concatenate(phi_blocks)
        labels = np.concatenate(label_blocks)
    else:
        s = np.empty(0)
        phi = np.empty(0)
        labels = np.empty(0, dtype=np.int64)

    if shuffle and s.size:
        perm = stream.permutation(s.size)
        s, phi, labels = s[perm], phi[perm], labels[perm]

    return SimulationResult(s=s, phi=phi, labels=labels, counts=tuple(counts))


def write_lors_csv(path, s, phi, labels=None) -> None:
    """Write LoRs as CSV: header s,phi[,label], floats at full precision."""
    s = np.asarray(s, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if s.shape != phi.shape or s.ndim != 1:
        raise InputError("s and phi must be matching 1-D arrays")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if labels is None:
            writer.writerow(CSV_HEADER)
            for i in range(s.size):
                writer.writerow((f"{s[i]:.17g}", f"{phi[i]:.17g}"))
        else:
            labels = np.asarray(labels)
            if labels.shape != s.shape:
                raise InputError("labels must match s and phi in length")
            writer.writerow(CSV_HEADER_LABELED)
            for i in range(s.size):
                writer.writerow((f"{s[i]:.17g}", f"{phi[i]:.17g}", int(labels[i])))


def read_lors_csv(path):
    """Read a LoR CSV back into (s, phi, labels-or-None).

    Rejects missing/against-header columns and non-finite values; the
    label column is optional but must be integral when present.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot open LoR file: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError("LoR file is empty") from None
        header = tuple(h.strip() for h in header)
        if header == CSV_HEADER:
            labeled = False
        elif header == CSV_HEADER_LABELED:
            labeled = True
        else:
            raise InputError(f"unrecognized LoR header {header!r}")
        s_vals, phi_vals, label_vals = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InputError(f"line {lineno}: expected {len(header)} fields")
            try:
                s_i = float(row[0])
                phi_i = float(row[1])
            except ValueError as exc:
                raise InputError(f"line {lineno}: {exc}") from exc
            if not (math.isfinite(s_i) and math.isfinite(phi_i)):
                raise InputError(f"line {lineno}: non-finite value")
            s_vals.append(s_i)
            phi_vals.append(phi_i)
            if labeled:
                try:
                    label_vals.append(int(row[2]))
                except ValueError as exc:
                    raise InputError(f"line {lineno}: {exc}") from exc
    s = np.asarray(s_vals, dtype=float)
    phi = np.asarray(phi_vals, dtype=float)
    labels = np.asarray(label_vals, dtype=np.int64) if labeled else None
    return s, phi, labels


def lors_csv_text(s, phi, labels=None) -> str:
    """CSV text for in-memory round-trip checks; same format as the file."""
    buf = io.StringIO()
    s = np.asarray(s, dtype=float)
    phi = np.asarray(phi, dtype=float)
    writer = csv.writer(buf, lineterminator="\n")
    if labels is None:
        writer.writerow(CSV_HEADER)
        for i in range(s.size):
            writer.writerow((f"{s[i]:.17g}", f"{phi[i]:.17g}"))
    else:
        labels = np.asarray(labels)
        writer.writerow(CSV_HEADER_LABELED)
        for i in range(s.size):
            writer.writerow((f"{s[i]:.17g}", f"{phi[i]:.17g}", int(labels[i])))
    return buf.getvalue()

"""Run manifests and run-to-run comparison."""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field

from ..core import ConfigError

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class FileEntry:
    name: str
    role: str
    sha256: str


@dataclass
class Manifest:
    experiment: str
    config: dict
    files: list = field(default_factory=list)
    root: str = ""

    def add(self, name: str, role: str) -> None:
        self.files.append(FileEntry(name, role, file_digest(os.path.join(self.root, name))))

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "files": [asdict(f) for f in self.files],
        }

    def write(self) -> str:
        path = os.path.join(self.root, MANIFEST_NAME)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path

    @classmethod
    def load(cls, path) -> "Manifest":
        if os.path.isdir(path):
            path = os.path.join(path, MANIFEST_NAME)
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(
            experiment=raw["experiment"],
            config=raw["config"],
            files=[FileEntry(**f) for f in raw["files"]],
            root=os.path.dirname(os.path.abspath(path)),
        )


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _csv_values(path) -> dict:
    """Map each record's leading key columns to its final numeric column."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    out = {}
    for row in rows[1:]:
        out[tuple(row[:-1])] = float(row[-1])
    return out


@dataclass
class CompareReport:
    experiment: str
    tolerance: float
    deviations: dict
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self):
        for name, dev in sorted(self.deviations.items()):
            status = "ok" if dev <= self.tolerance else "FAIL"
            yield f"{name}\tmax_abs_dev={dev:.6g}\t{status}"
        for name, key, a, b in self.failures:
            yield f"  {name} {','.join(key)}: {a!r} vs {b!r}"
        yield f"{'PASS' if self.passed else 'FAIL'} (tolerance {self.tolerance:g})"


def compare_runs(manifest_a, manifest_b, tolerance: float) -> CompareReport:
    """Largest absolute difference per CSV output between two runs.

    Accepts manifests or paths to them (file or run directory). Entries
    whose difference exceeds ``tolerance`` are listed individually.
    """
    a = manifest_a if isinstance(manifest_a, Manifest) else Manifest.load(manifest_a)
    b = manifest_b if isinstance(manifest_b, Manifest) else Manifest.load(manifest_b)
    if a.experiment != b.experiment:
        raise ConfigError(f"cannot compare {a.experiment!r} with {b.experiment!r}")
    b_names = {f.name for f in b.files}
    deviations, failures = {}, []
    for entry in a.files:
        if not entry.name.endswith(".csv"):
            continue
        if entry.name not in b_names:
            raise ConfigError(f"{entry.name} missing from second run")
        va = _csv_values(os.path.join(a.root, entry.name))
        vb = _csv_values(os.path.join(b.root, entry.name))
        if va.keys() != vb.keys():
            raise ConfigError(f"{entry.name}: runs have different record layouts")
        worst = 0.0
        for key, x in va.items():
            dev = abs(x - vb[key])
            worst = max(worst, dev)
            if dev > tolerance:
                failures.append((entry.name, key, x, vb[key]))
        deviations[entry.name] = worst
    return CompareReport(a.experiment, tolerance, deviations, failures)

"""Evaluation sweeps over methods and alignment times, plus the report
data model.

Classical methods and neural variants are scored on identical
non-overlapping window boundaries per recording; absolute heading errors
are averaged per recording, then across recordings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .aligners import AlignMethod, align_heading
from .attitude import angle_diff
from .errors import InsufficientDataError, InvalidArgumentError
from .nn.data import make_windows, window_starts
from .nn.model import HeadingModel, predict_heading
from .recording import Recording

__all__ = ["EvalRow", "EvalReport", "evaluate", "nn_method_name"]

REPORT_VERSION = "1"

CLASSICAL_METHODS = tuple(m.value for m in AlignMethod)


def nn_method_name(t_align: int | float) -> str:
    return f"HeadingNet{int(t_align)}"


@dataclass
class EvalRow:
    method: str
    t_align: float
    recording: str
    mean_ae_deg: float
    windows: int


@dataclass
class EvalReport:
    """Per-recording rows, per-(method, t_align) averages, and
    improvement of the neural variant over the best classical baseline."""

    rows: list[EvalRow] = field(default_factory=list)
    averages: list[dict] = field(default_factory=list)
    improvements: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "rows": [vars(r) for r in self.rows],
            "averages": self.averages,
            "improvements": self.improvements,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        if d.get("version") != REPORT_VERSION:
            raise InvalidArgumentError(
                f"unsupported report version {d.get('version')!r}"
            )
        rep = cls()
        rep.rows = [EvalRow(**r) for r in d["rows"]]
        rep.averages = list(d["averages"])
        rep.improvements = list(d["improvements"])
        return rep

    def rows_csv(self) -> str:
        lines = ["method,t_align,recording,mean_ae_deg,windows"]
        for r in self.rows:
            lines.append(
                f"{r.method},{r.t_align:g},{r.recording},{r.mean_ae_deg:.17g},{r.windows}"
            )
        return "\n".join(lines) + "\n"

    def averages_csv(self) -> str:
        lines = ["method,t_align,mean_ae_deg"]
        for a in self.averages:
            lines.append(f"{a['method']},{a['t_align']:g},{a['mean_ae_deg']:.17g}")
        return "\n".join(lines) + "\n"

    def improvements_csv(self) -> str:
        lines = ["t_align,best_baseline_name,best_ae,nn_ae,improvement_pct"]
        for i in self.improvements:
            lines.append(
                f"{i['t_align']:g},{i['best_baseline_name']},{i['best_ae']:.17g},"
                f"{i['nn_ae']:.17g},{i['improvement_pct']:.17g}"
            )
        return "\n".join(lines) + "\n"


def _rec_name(rec: Recording, i: int) -> str:
    return str(rec.meta.get("scenario", {}).get("name", f"rec{i}"))


def _classical_window_aes(rec: Recording, method: AlignMethod, t_align: float) -> list[float]:
    """One alignment per non-overlapping window, on the exact window
    boundaries the neural evaluation uses."""
    t0 = float(rec.imu.t[0])
    imu_rate = float(rec.meta.get("scenario", {}).get("imu_rate", 100.0))
    duration = len(rec.imu) / imu_rate
    aes = []
    for w in window_starts(duration, t_align, "eval"):
        sub = rec.slice_window(t0 + float(w), t0 + float(w) + t_align)
        aes.append(align_heading(sub, method, t_align).ae_deg)
    return aes


def evaluate(
    recordings: list[Recording],
    methods: list[str],
    t_aligns: list[float],
    models: dict[int, HeadingModel] | None = None,
) -> EvalReport:
    """Score every (method, t_align, recording) cell on shared windows.

    ``models`` maps alignment time to a trained model; a method name
    like ``HeadingNet30`` without a matching model raises.  Neural
    methods are skipped silently for alignment times other than their
    own variation.
    """
    if not methods:
        raise InvalidArgumentError("method list is empty")
    if not t_aligns:
        raise InvalidArgumentError("alignment-time list is empty")
    if not recordings:
        raise InsufficientDataError("no recordings to evaluate")
    models = models or {}

    for m in methods:
        if m in CLASSICAL_METHODS:
            continue
        matched = [T for T in models if nn_method_name(T) == m]
        if not matched:
            raise InvalidArgumentError(
                f"method {m!r} is neither classical ({', '.join(CLASSICAL_METHODS)}) "
                "nor a loaded neural variant"
            )

    report = EvalReport()
    for T in t_aligns:
        for method in methods:
            is_nn = method not in CLASSICAL_METHODS
            if is_nn and nn_method_name(T) != method:
                continue
            for ri, rec in enumerate(recordings):
                name = _rec_name(rec, ri)
                if is_nn:
                    model = models[int(T)]
                    ws = make_windows([rec], float(T), "eval")
                    aes = []
                    for k in range(len(ws)):
                        psi = predict_heading(model, ws.x1[k], ws.x2[k])
                        aes.append(abs(np.degrees(angle_diff(psi, ws.y[k]))))
                else:
                    aes = _classical_window_aes(rec, AlignMethod(method), float(T))
                if not aes:
                    raise InsufficientDataError(
                        f"recording {name} too short for t_align={T}"
                    )
                report.rows.append(
                    EvalRow(method, float(T), name, float(np.mean(aes)), len(aes))
                )

    for T in t_aligns:
        for method in methods:
            cells = [r.mean_ae_deg for r in report.rows if r.method == method and r.t_align == T]
            if cells:
                report.averages.append(
                    {"method": method, "t_align": float(T), "mean_ae_deg": float(np.mean(cells))}
                )

    for T in t_aligns:
        nn_avg = [a for a in report.averages if a["t_align"] == T and a["method"] not in CLASSICAL_METHODS]
        base = [a for a in report.averages if a["t_align"] == T and a["method"] in CLASSICAL_METHODS]
        if not nn_avg or not base:
            continue
        # strict minimum; ties broken by method name
        best = min(base, key=lambda a: (a["mean_ae_deg"], a["method"]))
        nn = nn_avg[0]
        report.improvements.append(
            {
                "t_align": float(T),
                "best_baseline_name": best["method"],
                "best_ae": best["mean_ae_deg"],
                "nn_ae": nn["mean_ae_deg"],
                "improvement_pct": 100.0 * (best["mean_ae_deg"] - nn["mean_ae_deg"]) / best["mean_ae_deg"],
            }
        )
    return report

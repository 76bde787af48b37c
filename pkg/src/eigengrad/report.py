"""Verification report: sandwich rows, Monte-Carlo appendix, JSON/CSV/TSV output."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

CSV_COLUMNS = ("lambda", "ratio", "lb", "ub", "branch", "margin_lb", "margin_ub")


@dataclass
class SandwichRow:
    k: int
    lambda_: float
    ratio: float
    lb: float
    ub: float
    branch: str
    variant: str = ""

    @property
    def margin_lb(self):
        return (self.ratio - self.lb) / self.ratio

    @property
    def margin_ub(self):
        return (self.ub - self.ratio) / self.ratio

    @property
    def passed(self):
        return self.lb <= self.ratio <= self.ub


@dataclass
class VerificationReport:
    domain_id: str
    mode: str
    rows: list = field(default_factory=list)
    fpt: list = field(default_factory=list)
    martingale: list = field(default_factory=list)
    z_threshold: float = 4.0

    @property
    def sandwich_passed(self):
        return all(r.passed for r in self.rows)

    @property
    def mc_passed(self):
        ok = all(abs(f["z_score"]) <= self.z_threshold for f in self.fpt)
        return ok and all(m["passed"] for m in self.martingale)

    @property
    def passed(self):
        return self.sandwich_passed and self.mc_passed

    def to_dict(self):
        return {
            "domain_id": self.domain_id,
            "mode": self.mode,
            "rows": [asdict(r) for r in self.rows],
            "fpt": list(self.fpt),
            "martingale": list(self.martingale),
            "z_threshold": self.z_threshold,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, data):
        rows = [SandwichRow(**r) for r in data["rows"]]
        return cls(data["domain_id"], data["mode"], rows, list(data["fpt"]),
                   list(data["martingale"]), data["z_threshold"])

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([repr(r.lambda_), repr(r.ratio), repr(r.lb), repr(r.ub), r.branch,
                        repr(r.margin_lb), repr(r.margin_ub)])
        return buf.getvalue()

    def to_tsv(self):
        lines = ["k\tlambda\tratio\tlb\tub"]
        lines += [f"{r.k}\t{r.lambda_!r}\t{r.ratio!r}\t{r.lb!r}\t{r.ub!r}" for r in self.rows]
        return "\n".join(lines) + "\n"

    def summary(self):
        out = [f"domain {self.domain_id}  mode {self.mode}"]
        out.append(f"{'k':>3} {'lambda':>12} {'lower':>10} {'ratio':>10} {'upper':>10}  branch")
        for r in self.rows:
            flag = "ok" if r.passed else "FAIL"
            out.append(f"{r.k:>3} {r.lambda_:>12.6f} {r.lb:>10.6f} {r.ratio:>10.6f} "
                       f"{r.ub:>10.6f}  {r.variant}/{r.branch} {flag}")
        for f in self.fpt:
            out.append(f"fpt alpha={f['alpha']:g} eps={f['eps']:g} t={f['t']:g}: "
                       f"exact {f['exact']:.6f} mc {f['estimate']:.6f} "
                       f"+- {f['stderr']:.6f} z {f['z_score']:+.2f}")
        for m in self.martingale:
            zs = " ".join(f"{z:+.2f}" for z in m["z_scores"])
            out.append(f"martingale x={m['x']:g} start {m['start_value']:.6f} z [{zs}]")
        out.append("PASS" if self.passed else "FAIL")
        return "\n".join(out)

    def write(self, out_dir, extra_tsv=None):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(self.to_json())
        (out / "report.csv").write_text(self.to_csv())
        (out / "modes.tsv").write_text(self.to_tsv())
        for name, text in (extra_tsv or {}).items():
            (out / name).write_text(text)
        return out

from typing import Dict, List, Any, Optional
from datetime import datetime
import json
import logging
import uuid
from dataclasses import dataclass, asdict
from enum import Enum

import pandas as pd

logger = logging.getLogger(__name__)

# Endpoint error below which a certified run passes outright
PASS_ERROR = 1e-8
# Endpoint error still tolerated with a warning
WARN_ERROR = 1e-6


class Verdict(Enum):
    PASS = "Pass"
    WARN = "Warn"
    FAIL = "Fail"


@dataclass
class VerificationEntry:
    """One verified pulse sequence"""
    id: str
    target_label: str
    system: str
    endpoint_error: float
    total_time: float
    alpha_star: float
    certificate: bool
    verdict: Verdict
    timestamp: datetime
    note: Optional[str] = None

    @property
    def excess_time(self) -> float:
        return self.total_time - self.alpha_star

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['verdict'] = self.verdict.value
        data['timestamp'] = self.timestamp.isoformat()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'VerificationEntry':
        data = dict(data)
        data['verdict'] = Verdict(data['verdict'])
        data['timestamp'] = datetime.fromisoformat(data['timestamp'])
        return cls(**data)


def classify(endpoint_error: float, certificate: bool) -> Verdict:
    if not certificate or endpoint_error > WARN_ERROR:
        return Verdict.FAIL
    if endpoint_error > PASS_ERROR:
        return Verdict.WARN
    return Verdict.PASS


class VerificationLog:
    """Collects verification reports across targets"""

    def __init__(self, storage_path: str = "verification_log.json"):
        self.storage_path = storage_path
        self.entries: List[VerificationEntry] = []
        self.verdict_labels = {
            Verdict.PASS: "✅ Optimal",
            Verdict.WARN: "⚠️ Loose endpoint",
            Verdict.FAIL: "❌ Failed",
        }

    def record(self, report, target_label: str, system: str, note: Optional[str] = None) -> VerificationEntry:
        """Add a VerificationReport under a target label"""
        entry = VerificationEntry(
            id=str(uuid.uuid4()),
            target_label=target_label,
            system=system,
            endpoint_error=float(report.endpoint_error),
            total_time=float(report.total_time),
            alpha_star=float(report.alpha_star),
            certificate=bool(report.certificate),
            verdict=classify(report.endpoint_error, report.certificate),
            timestamp=datetime.now(),
            note=note,
        )
        self.entries.append(entry)
        logger.info(f"{target_label}: {self.verdict_labels[entry.verdict]}")
        return entry

    def get_entries_by_verdict(self, verdict: Verdict) -> List[VerificationEntry]:
        return [e for e in self.entries if e.verdict == verdict]

    def get_entries_by_system(self, system: str) -> List[VerificationEntry]:
        return [e for e in self.entries if e.system == system]

    def generate_summary(self, system: str = None) -> Dict[str, Any]:
        entries = self.get_entries_by_system(system) if system else self.entries
        return {
            "total_entries": len(entries),
            "by_verdict": {v.value: len([e for e in entries if e.verdict == v]) for v in Verdict},
            "max_endpoint_error": max((e.endpoint_error for e in entries), default=0.0),
            "max_excess_time": max((e.excess_time for e in entries), default=0.0),
        }

    def generate_report(self, system: str = None) -> str:
        """Markdown report grouped by verdict"""
        entries = self.get_entries_by_system(system) if system else self.entries
        if not entries:
            return "No verification entries found."
        summary = self.generate_summary(system)
        report = f"""
# Verification Report
Generated: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}

## Summary
- Total: {summary['total_entries']}
- Pass: {summary['by_verdict']['Pass']}
- Warn: {summary['by_verdict']['Warn']}
- Fail: {summary['by_verdict']['Fail']}
- Max endpoint error: {summary['max_endpoint_error']:.3e}

"""
        for verdict in (Verdict.FAIL, Verdict.WARN, Verdict.PASS):
            group = self.get_entries_by_verdict(verdict)
            group = [e for e in group if e in entries]
            if not group:
                continue
            report += f"## {self.verdict_labels[verdict]}\n\n"
            for e in group:
                report += (
                    f"- **{e.target_label}** ({e.system}): error {e.endpoint_error:.3e}, "
                    f"time {e.total_time:.12g}, alpha* {e.alpha_star:.12g}\n"
                )
            report += "\n"
        return report

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([e.to_dict() for e in self.entries])

    def export_entries(self, format_type: str = "json") -> str:
        if format_type == "csv":
            return self.to_frame().to_csv(index=False, float_format="%.17g")
        return json.dumps([e.to_dict() for e in self.entries], indent=2, sort_keys=True)

    def save_entries(self, filename: str = None) -> str:
        filename = filename or self.storage_path
        with open(filename, 'w') as f:
            json.dump([e.to_dict() for e in self.entries], f, indent=2, sort_keys=True)
        return filename

    def load_entries(self, filename: str = None) -> bool:
        filename = filename or self.storage_path
        try:
            with open(filename, 'r') as f:
                data = json.load(f)
            self.entries = [VerificationEntry.from_dict(d) for d in data]
            return True
        except (OSError, ValueError, KeyError, TypeError) as e:
            logger.warning(f"Could not load verification log {filename}: {e}")
            return False

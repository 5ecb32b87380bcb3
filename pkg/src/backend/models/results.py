"""
Command Result Model - outcome of one workbench command
"""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import List, Optional

UTC = timezone.utc

# exit-code contract
AFFIRMATIVE = 0
NEGATIVE = 1
INPUT_ERROR = 2


@dataclass
class CommandResult:
    """
    Report of a single CLI verb.

    ``lines`` form the body of the report; the summary line is appended last
    so scripts can read the verdict from the final line of stdout.
    """

    verb: str
    verdict: str = ""  # SAT / UNSAT / EQUAL / VALID / ...
    exit_code: int = AFFIRMATIVE
    lines: List[str] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)  # files written

    timestamp: datetime = field(default_factory=lambda: datetime.now(UTC))
    elapsed_seconds: float = 0.0
    error: Optional[str] = None

    def add(self, line: str) -> None:
        self.lines.append(line)

    def wrote(self, path: str) -> None:
        self.outputs.append(path)
        self.lines.append(f"wrote {path}")

    @property
    def summary(self) -> str:
        return f"RESULT {self.verb} {self.verdict} exit={self.exit_code}"

    @property
    def is_affirmative(self) -> bool:
        return self.exit_code == AFFIRMATIVE

    def render(self) -> str:
        return "\n".join(self.lines + [self.summary]) + "\n"

    def to_dict(self) -> dict:
        """Convert to dictionary for serialization"""
        return {
            'verb': self.verb,
            'verdict': self.verdict,
            'exit_code': self.exit_code,
            'lines': list(self.lines),
            'outputs': list(self.outputs),
            'summary': self.summary,
            'timestamp': self.timestamp.isoformat(),
            'elapsed_seconds': self.elapsed_seconds,
            'error': self.error,
        }


def failure(verb: str, message: str) -> CommandResult:
    return CommandResult(verb, "ERROR", INPUT_ERROR, error=message)

"""
Run records written next to every CLI output.
"""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from signal_core.io import atomic_write_text

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
VERSION = "0.1.0"


def config_digest(config: Any) -> str:
    """SHA-256 of the canonical JSON form of a config (dict or dataclass)."""
    if hasattr(config, "__dataclass_fields__"):
        config = asdict(config)
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class RunManifest:
    """What a run did and which files it produced"""
    command: str
    config_digest: str
    seed: Optional[int]
    version: str = VERSION
    started_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    finished_at: Optional[str] = None
    exit_code: Optional[int] = None
    outputs: List[str] = field(default_factory=list)

    def add_output(self, path: Union[str, Path]):
        self.outputs.append(str(path))

    def finish(self, exit_code: int):
        self.exit_code = exit_code
        self.finished_at = datetime.now(timezone.utc).isoformat()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def write(self, out_dir: Union[str, Path]) -> Path:
        path = Path(out_dir) / MANIFEST_NAME
        atomic_write_text(path, json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        logger.info(f"Run manifest saved to {path}")
        return path

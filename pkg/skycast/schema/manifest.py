"""
Skycast Schema - Manifest
Record of one CLI run, enough to repeat it.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List


@dataclass
class RunManifest:
    command: str
    config_hash: str
    seeds: Dict[str, int] = field(default_factory=dict)
    input_digests: Dict[str, str] = field(default_factory=dict)
    code_version: str = ""
    outputs: List[str] = field(default_factory=list)
    started_at: str = ""
    wall_time_s: float = 0.0
    status: str = "ok"
    config: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "seeds": self.seeds,
            "input_digests": self.input_digests,
            "code_version": self.code_version,
            "outputs": self.outputs,
            "started_at": self.started_at,
            "wall_time_s": self.wall_time_s,
            "status": self.status,
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        return cls(
            command=data["command"],
            config_hash=data["config_hash"],
            seeds=data.get("seeds", {}),
            input_digests=data.get("input_digests", {}),
            code_version=data.get("code_version", ""),
            outputs=data.get("outputs", []),
            started_at=data.get("started_at", ""),
            wall_time_s=data.get("wall_time_s", 0.0),
            status=data.get("status", "ok"),
            config=data.get("config", {}),
        )

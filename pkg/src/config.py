"""
Configuration management for uncertainty-lab.
Handles tolerances, physical units, search budgets and paths.
"""

import os
from pathlib import Path
from dataclasses import dataclass, field
from typing import Optional
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


@dataclass
class ToleranceConfig:
    """Numerical tolerances shared by every module."""
    herm: float = 1e-10          # relative to max(||A||_inf, 1)
    norm: float = 1e-12
    rob: float = 1e-9            # relative to max(1, product)
    zero: float = 1e-9
    quad: float = 1e-8
    diff: float = 1e-6
    bc_closed: float = 1e-8
    bc_grid: float = 1e-5
    pt: float = 1e-9             # relative to max(||H||_inf, 1)
    degeneracy_gap: float = 1e-8


@dataclass
class BoxConfig:
    """Particle-in-a-box units and grid resolution."""
    hbar: float = 1.0
    length: float = 1.0
    grid_points: int = 2049      # odd, includes both endpoints
    theta_scan_points: int = 4096


@dataclass
class SearchConfig:
    """Family sampling and state-sphere search budgets."""
    restarts: int = 8
    samples_per_pair: int = 512
    max_samples: int = 100_000
    max_iterations: int = 4000
    brute_force_points: int = 24  # per angle of the sphere grid
    witness_echo_limit: int = 8   # states echoed per list in reports


@dataclass
class PTConfig:
    """PT-symmetric model generation."""
    max_attempts: int = 500
    non_hermiticity: float = 0.3
    min_pt_norm: float = 0.1     # conditioning floor for random unbroken models


@dataclass
class Config:
    """Main configuration class for uncertainty-lab."""

    # Environment
    log_level: str = field(default_factory=lambda: os.getenv("UNCERTAINTY_LOG_LEVEL", "WARNING"))
    workers: int = field(default_factory=lambda: int(os.getenv("UNCERTAINTY_WORKERS", "4")))

    # Paths
    project_root: Path = field(default_factory=lambda: Path(__file__).parent.parent)
    scenarios_dir: Path = field(default_factory=lambda: Path(__file__).parent.parent / "scenarios")
    outputs_dir: Path = field(default_factory=lambda: Path(__file__).parent.parent / "outputs")

    # Sub-configs
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    box: BoxConfig = field(default_factory=BoxConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    pt: PTConfig = field(default_factory=PTConfig)

    def validate(self) -> list[str]:
        """Validate configuration and return list of issues."""
        issues = []

        if self.box.hbar <= 0:
            issues.append(f"hbar must be positive, got {self.box.hbar}")

        if self.box.length <= 0:
            issues.append(f"box length must be positive, got {self.box.length}")

        if self.box.grid_points < 5 or self.box.grid_points % 2 == 0:
            issues.append("grid_points must be odd and at least 5 (Simpson + 4th-order stencils)")

        if not self.scenarios_dir.exists():
            issues.append(f"Scenario directory not found: {self.scenarios_dir}")

        if self.workers < 1:
            issues.append("UNCERTAINTY_WORKERS must be at least 1")

        return issues


# Global default configuration
_config: Optional[Config] = None


def get_config() -> Config:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = Config()
    return _config


def set_config(config: Config) -> None:
    """Set the global configuration instance."""
    global _config
    _config = config

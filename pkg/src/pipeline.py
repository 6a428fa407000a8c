"""
Main Pipeline Orchestrator for uncertainty-lab.
Runs validated scenarios through their handlers and writes the reports.
"""

import asyncio
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from tqdm import tqdm

from .config import Config, get_config
from .errors import ScenarioError, SchemaError, UncertaintyError
from .handlers import run_handler
from .reports import ReportRecord, write_records
from .scenarios import ScenarioConfig

logger = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    """Result of one scenario execution."""
    success: bool
    scenario_id: str
    records: list[ReportRecord] = field(default_factory=list)
    output_path: Optional[Path] = None
    error: Optional[str] = None
    error_kind: Optional[str] = None   # "schema", "module" or "io"
    exception: Optional[BaseException] = field(default=None, repr=False)

    @property
    def checks_passed(self) -> bool:
        return self.success and all(record.passed for record in self.records)

    @property
    def failed_checks(self) -> list[str]:
        return [
            f"{record.operation}:{check.name}"
            for record in self.records
            for check in record.checks
            if not check.passed
        ]


class ScenarioPipeline:
    """
    Executes scenarios and writes their report records.

    One scenario never affects another; each result carries its own error.
    """

    def __init__(self, config: Config = None):
        self.config = config or get_config()

    def default_output_path(self, scenario: ScenarioConfig, fmt: str) -> Path:
        if scenario.output.path:
            return Path(scenario.output.path)
        return self.config.outputs_dir / f"{scenario.scenario_id}.{fmt}"

    def run(
        self,
        scenario: ScenarioConfig,
        output_path: Optional[Union[str, Path]] = None,
        fmt: Optional[str] = None,
        seed: Optional[int] = None,
        include_timing: bool = True,
        write: bool = True,
    ) -> PipelineResult:
        """
        Run one scenario.

        Args:
            scenario: Validated scenario
            output_path: Report path (default from the scenario or outputs_dir)
            fmt: "json" or "csv" (default from the scenario)
            seed: Seed override
            include_timing: Keep wall_time_ms in JSON payloads
            write: Write the report file

        Returns:
            PipelineResult with the records and any error
        """
        records: list[ReportRecord] = []
        try:
            # Step 1: Resolve seed and output
            logger.info(f"Step 1/3: Preparing {scenario.scenario_id}...")
            try:
                scenario = scenario.with_seed(seed)
            except ValueError as e:
                raise SchemaError(str(e)) from e
            fmt = fmt or scenario.output.format

            # Step 2: Execute
            logger.info(f"Step 2/3: Running {scenario.kind.value} handler...")
            try:
                records = run_handler(scenario)
            except UncertaintyError as e:
                raise ScenarioError(scenario.scenario_id, str(e), e) from e
            passed = sum(record.passed for record in records)
            logger.info(f"  {passed}/{len(records)} records passed their checks")

            # Step 3: Write
            path = None
            if write:
                logger.info("Step 3/3: Writing report...")
                path = self.default_output_path(scenario, fmt) if output_path is None else Path(output_path)
                write_records(records, path, fmt, scenario.kind.value, include_timing)

            return PipelineResult(
                success=True,
                scenario_id=scenario.scenario_id,
                records=records,
                output_path=path,
            )

        except SchemaError as e:
            logger.error(f"Scenario {scenario.scenario_id} is invalid: {e}")
            return self._failure(scenario, records, e, "schema")
        except ScenarioError as e:
            logger.error(f"Scenario failed: {e}")
            return self._failure(scenario, records, e, "module")
        except OSError as e:
            logger.error(f"Could not write report for {scenario.scenario_id}: {e}")
            return self._failure(scenario, records, e, "io")
        except Exception as e:
            logger.error(f"Scenario {scenario.scenario_id} crashed: {e}")
            wrapped = ScenarioError(scenario.scenario_id, str(e), e)
            return self._failure(scenario, records, wrapped, "module")

    @staticmethod
    def _failure(scenario, records, error: BaseException, kind: str) -> PipelineResult:
        return PipelineResult(
            success=False,
            scenario_id=scenario.scenario_id,
            records=records,
            error=str(error),
            error_kind=kind,
            exception=error,
        )


async def run_scenarios_async(
    scenarios: list[ScenarioConfig],
    workers: Optional[int] = None,
    progress: bool = True,
    **run_kwargs,
) -> list[PipelineResult]:
    """
    Run scenarios concurrently on worker threads.

    Returns:
        Results in input order
    """
    pipeline = ScenarioPipeline()
    workers = workers or pipeline.config.workers
    semaphore = asyncio.Semaphore(max(1, workers))
    bar = tqdm(total=len(scenarios), desc="Scenarios", unit="scenario", disable=not progress)

    async def run_one(scenario: ScenarioConfig) -> PipelineResult:
        async with semaphore:
            result = await asyncio.to_thread(pipeline.run, scenario, **run_kwargs)
        bar.update(1)
        return result

    try:
        return list(await asyncio.gather(*(run_one(s) for s in scenarios)))
    finally:
        bar.close()


def run_scenarios(
    scenarios: list[ScenarioConfig],
    workers: Optional[int] = None,
    progress: bool = True,
    **run_kwargs,
) -> list[PipelineResult]:
    """Synchronous wrapper for run_scenarios_async."""
    if not scenarios:
        return []
    return asyncio.run(run_scenarios_async(scenarios, workers, progress, **run_kwargs))


def run_scenario(scenario: ScenarioConfig, **kwargs) -> list[ReportRecord]:
    """
    Convenience entry point returning the records of one scenario.

    Raises:
        SchemaError: invalid seed override
        ScenarioError: module failure, with the scenario id attached
        OSError: report could not be written
    """
    result = ScenarioPipeline().run(scenario, **kwargs)
    if result.success:
        return result.records
    raise result.exception

# Levinson/client.py

import asyncio
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from Levinson.config.loader import RunConfig, load_config, with_mode
from Levinson.core.flow import (
    AffinePath,
    BumpFunction,
    birman_krein_desk_check,
    bounded_transform_flow,
    crossing_count,
    discretized_hamiltonian_flow,
    random_affine_path,
    spectral_flow_formula,
    spectral_flow_phillips,
)
from Levinson.core.higher import high_energy, pn_eval
from Levinson.core.potential import moments
from Levinson.core.radial import channels
from Levinson.core.scattering import (
    assemble,
    consistency_check,
    determinant_defect,
    high_energy_law,
    levinson_integral,
)
from Levinson.core.spectrum import resonance_scan, threshold_phases, total_counts
from Levinson.core.synthesizer import ReportSynthesizer
from Levinson.exception import ConfigurationError
from Levinson.logger import get_logger

FORMULA_TOL = 1e-8
BK_TOL = 0.05


@dataclass
class LevinsonReport:
    """-N = (1/2 pi i) int (Tr S*S' - p_n) - beta_n + N_res, term by term"""
    N: int
    N0: int
    N_res: Fraction
    integral: float
    beta_n: float
    lhs: float
    rhs: float
    residual: float
    tail_estimate: float
    error_budget: float
    sf_prediction: float
    passed: bool
    diagnostics: Dict = field(default_factory=dict)


@dataclass
class FlowRecord:
    seed: int
    dim: int
    sf_phillips: int
    sf_oracle: int
    sf_bounded: int
    sf_formula: Dict[str, float]
    discrepancy: float
    passed: bool


@dataclass
class FlowSuiteReport:
    records: List[FlowRecord]
    canned: Dict[str, int]
    hamiltonian: List[Dict]
    passed_count: int
    failed_seeds: List[int]
    passed: bool


@dataclass
class ResonanceScanReport:
    channel: str
    interval: Tuple[float, float]
    thresholds: List[float]
    passed: bool = True


@dataclass
class BirmanKreinReport:
    lhs: float
    rhs: float
    difference: float
    passed: bool


class LevinsonClient:
    def __init__(self, config: Optional[RunConfig] = None, output_dir: Optional[str] = None):
        self.config = config or load_config()
        self.output_dir = Path(output_dir) if output_dir else Path("./output")
        self.output_dir.mkdir(parents=True, exist_ok=True)

        self.logger = get_logger(__name__)
        self.synthesizer = ReportSynthesizer()

    def _write(self, name: str, results, format: str = "json") -> Path:
        content = self.synthesizer.synthesize(results, format=format)
        return self.synthesizer.save(content, self.output_dir / name)

    def _write_manifest(self, files: List[Path], cfg: RunConfig, extra: Optional[Dict] = None) -> Path:
        metadata = {"config": cfg, **(extra or {})}
        return self._write("manifest.json", self.synthesizer.manifest(files, metadata))

    def _levinson(self, cfg: RunConfig) -> LevinsonReport:
        V = cfg.potential()
        n = V.dimension
        lam_max = cfg.resolved_lambda_max(V)
        l_max = cfg.resolved_l_max(V)

        spectral = total_counts(V)
        H = high_energy(n, moments(V, cfg.quad_tol))
        table, curve = assemble(
            V,
            l_max,
            lam_max,
            tol=cfg.phase_tol,
            grid_points=cfg.grid_points,
            max_jump=cfg.max_jump,
            workers=cfg.threads,
        )
        li = levinson_integral(table, curve, H, tail_window=cfg.tail_window, thresholds=threshold_phases(spectral))

        lhs = -float(spectral.N)
        rhs = li.value - H.beta + float(spectral.N_res)
        residual = abs(lhs - rhs)
        budget = cfg.residual_tol + 0.25 * abs(li.tail)
        sf_prediction = 0.5 * (spectral.N + float(spectral.N_res) + li.value - H.beta)
        passed = residual <= budget and abs(sf_prediction) <= budget

        notes = list(li.notes)
        if n == 1:
            notes.append("n=1 threshold term: N_res = -1/2 without a parity resonance, 0 with one")
        diagnostics = {
            "resonance": spectral.resonance,
            "p_count": spectral.p_count,
            "s_resonance": spectral.s_resonance,
            "ambiguous_threshold": spectral.ambiguous,
            "growth_fractions": spectral.growth,
            "per_channel_counts": {ch.label: c for ch, c in spectral.per_channel if c},
            "l_star": table.l_star,
            "dropped_phase": table.dropped_residual,
            "grid_size": int(table.grid.size),
            "lambda_min": float(table.grid[0]),
            "lambda_max": float(table.grid[-1]),
            "low_end": li.low_end,
            "tail_exponent": li.tail_exponent,
            "tail_exponent_expected": li.tail_exponent_expected,
            "tail_warning": li.tail_warning,
            "integral_imag": li.imag,
            "consistency": consistency_check(curve),
            "determinant_defect": determinant_defect(table),
            "notes": notes,
        }
        if H.c and not V.is_zero:
            relative, exponent, expected = high_energy_law(curve, H, 100.0 * V.energy_scale)
            diagnostics["high_energy_gap"] = relative
            diagnostics["high_energy_exponent"] = exponent
            diagnostics["high_energy_exponent_expected"] = expected
        report = LevinsonReport(
            N=spectral.N,
            N0=spectral.N0,
            N_res=spectral.N_res,
            integral=li.value,
            beta_n=H.beta,
            lhs=lhs,
            rhs=rhs,
            residual=residual,
            tail_estimate=li.tail,
            error_budget=budget,
            sf_prediction=sf_prediction,
            passed=passed,
            diagnostics=diagnostics,
        )
        self.logger.info(f"Levinson residual {residual:.3e} (budget {budget:.3e}) -> {'pass' if passed else 'FAIL'}")
        return report

    async def levinson(self, cfg: Optional[RunConfig] = None) -> LevinsonReport:
        """
        Verify the Levinson identity for the configured potential.

        Args:
            cfg: Run configuration; defaults to the client's.

        Returns:
            LevinsonReport, also written to levinson_report.json with a manifest.
        """
        cfg = with_mode(cfg or self.config, "levinson")
        try:
            report = await asyncio.to_thread(self._levinson, cfg)
            path = self._write("levinson_report.json", report)
            self._write_manifest([path], cfg)
            return report
        except Exception as e:
            self.logger.error(f"Error during Levinson run: {str(e)}")
            raise

    async def levinson_multiple(self, configs: List[RunConfig]) -> List[LevinsonReport]:
        """
        Run several configurations concurrently; failed runs are logged and skipped.
        """
        async def one(cfg):
            return await asyncio.to_thread(self._levinson, cfg)

        results = await asyncio.gather(*[one(c) for c in configs], return_exceptions=True)
        reports = []
        for result in results:
            if isinstance(result, Exception):
                self.logger.error(f"Error in parallel Levinson run: {str(result)}")
            else:
                reports.append(result)
        return reports

    def _curves(self, cfg: RunConfig):
        V = cfg.potential()
        lam_max = cfg.resolved_lambda_max(V)
        table, curve = assemble(
            V,
            cfg.resolved_l_max(V),
            lam_max,
            tol=cfg.phase_tol,
            grid_points=cfg.grid_points,
            max_jump=cfg.max_jump,
            workers=cfg.threads,
        )
        H = high_energy(V.dimension, moments(V, cfg.quad_tol))
        columns = {"lambda": curve.grid}
        for ch, row in zip(table.channels, table.delta):
            columns[f"delta_{ch.label}"] = row
        columns["xi"] = curve.xi
        columns["im_tr"] = curve.tr.imag
        columns["pn_over_i"] = np.array([pn_eval(H, x).imag for x in curve.grid]) if H.c else np.zeros(curve.grid.size)
        metadata = {
            "rows": int(curve.grid.size),
            "channels": [ch.label for ch in table.channels],
            "lambda_min": float(curve.grid[0]),
            "lambda_max": float(curve.grid[-1]),
        }
        return columns, metadata

    async def curves(self, cfg: Optional[RunConfig] = None) -> List[Path]:
        """Write curves.csv (lambda, phases, xi, Im Tr S*S', p_n / i) and a manifest."""
        cfg = with_mode(cfg or self.config, "curves")
        columns, metadata = await asyncio.to_thread(self._curves, cfg)
        path = self._write("curves.csv", columns, format="csv")
        return [path, self._write_manifest([path], cfg, {"grid": metadata})]

    def _resonance_scan(self, cfg: RunConfig) -> ResonanceScanReport:
        V = cfg.potential()
        chans = channels(V.dimension, max(cfg.scan_channel, 1))
        if cfg.scan_channel >= len(chans):
            raise ConfigurationError(f"scan_channel={cfg.scan_channel} does not exist for n={V.dimension}")
        ch = chans[cfg.scan_channel]
        roots = resonance_scan(V, ch, cfg.scan_low, cfg.scan_high, cfg.scan_points)
        return ResonanceScanReport(channel=ch.label, interval=(cfg.scan_low, cfg.scan_high), thresholds=roots)

    async def resonance_scan(self, cfg: Optional[RunConfig] = None) -> ResonanceScanReport:
        cfg = with_mode(cfg or self.config, "resonance_scan")
        report = await asyncio.to_thread(self._resonance_scan, cfg)
        path = self._write("resonance_scan.json", report)
        self._write_manifest([path], cfg)
        return report

    def _flow_record(self, seed: int, cfg: RunConfig) -> FlowRecord:
        path = random_affine_path(seed, dim_min=cfg.flow_dim_min, dim_max=cfg.flow_dim_max)
        sf = spectral_flow_phillips(path)
        oracle = crossing_count(path)
        bounded = bounded_transform_flow(path)
        formula = {f"{s:g}": spectral_flow_formula(path, s) for s in cfg.flow_s}
        discrepancy = max(abs(v - sf) for v in formula.values())
        passed = sf == oracle == bounded and discrepancy <= FORMULA_TOL
        return FlowRecord(seed, path.dim, sf, oracle, bounded, formula, discrepancy, passed)

    def _hamiltonian_flows(self, cfg: RunConfig) -> List[Dict]:
        V = cfg.potential()
        spectral = total_counts(V)
        rows = []
        for ch, count in spectral.per_channel:
            if count == 0 and rows:
                continue
            shifted, unshifted = discretized_hamiltonian_flow(
                V, ch, L=cfg.flow_box_length * V.radius, points=cfg.flow_box_points
            )
            rows.append({
                "channel": ch.label,
                "count": count,
                "sf_shifted": shifted,
                "sf_unshifted": unshifted,
                "passed": shifted == 0 and unshifted == -count,
            })
        return rows

    async def flow_suite(self, cfg: Optional[RunConfig] = None) -> FlowSuiteReport:
        """
        Random Hermitian affine paths checked against the crossing oracle, the
        bounded transform and the integral formula, plus Hamiltonian flows.
        """
        cfg = with_mode(cfg or self.config, "flow_suite")
        limit = asyncio.Semaphore(cfg.threads)

        async def one(seed):
            async with limit:
                return await asyncio.to_thread(self._flow_record, seed, cfg)

        seeds = range(cfg.seed, cfg.seed + cfg.flow_seeds)
        records = list(await asyncio.gather(*[one(s) for s in seeds]))
        canned = {
            "t_minus_half": spectral_flow_phillips(AffinePath([[-0.5]], [[1.0]])),
            "half_minus_t": spectral_flow_phillips(AffinePath([[0.5]], [[-1.0]])),
        }
        hamiltonian = await asyncio.to_thread(self._hamiltonian_flows, cfg)

        failed = [r.seed for r in records if not r.passed]
        passed = (
            not failed
            and canned == {"t_minus_half": 1, "half_minus_t": -1}
            and all(row["passed"] for row in hamiltonian)
        )
        if failed:
            self.logger.warning(f"Flow suite mismatches for seeds {failed}")
        report = FlowSuiteReport(
            records=records,
            canned=canned,
            hamiltonian=hamiltonian,
            passed_count=len(records) - len(failed),
            failed_seeds=failed,
            passed=passed,
        )
        path = self._write("flow_suite.json", report)
        self._write_manifest([path], cfg)
        return report

    def _bk_check(self, cfg: RunConfig) -> BirmanKreinReport:
        V = cfg.potential()
        f = BumpFunction(cfg.bk_low, cfg.bk_high)
        lhs, rhs = birman_krein_desk_check(V, f, L=cfg.bk_box_length * V.radius, points=cfg.bk_box_points)
        difference = abs(lhs - rhs)
        return BirmanKreinReport(lhs, rhs, difference, difference <= BK_TOL * max(abs(lhs), 0.1))

    async def bk_check(self, cfg: Optional[RunConfig] = None) -> BirmanKreinReport:
        cfg = with_mode(cfg or self.config, "bk_check")
        report = await asyncio.to_thread(self._bk_check, cfg)
        path = self._write("bk_check.json", report)
        self._write_manifest([path], cfg)
        return report

    def run_levinson(self, cfg: Optional[RunConfig] = None) -> LevinsonReport:
        """
        Synchronous version of levinson() for easier usage.
        """
        return asyncio.run(self.levinson(cfg))

    def run_curves(self, cfg: Optional[RunConfig] = None) -> List[Path]:
        return asyncio.run(self.curves(cfg))

    def run_resonance_scan(self, cfg: Optional[RunConfig] = None) -> ResonanceScanReport:
        return asyncio.run(self.resonance_scan(cfg))

    def run_flow_suite(self, cfg: Optional[RunConfig] = None) -> FlowSuiteReport:
        return asyncio.run(self.flow_suite(cfg))

    def run_bk_check(self, cfg: Optional[RunConfig] = None) -> BirmanKreinReport:
        return asyncio.run(self.bk_check(cfg))

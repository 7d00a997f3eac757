#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Controller module for faberlab.
Mediates between the command line and the numerical core.
"""

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from faberlab.core.asymptotics import (
    InteriorModel,
    a3_check,
    build_interior_model,
    corner_normalizer,
    error_rate_class,
    interior_model,
    interior_normalizer,
    lemniscate_subsequence_model,
    lemniscate_subsequence_normalizer,
)
from faberlab.core.conformal import DEFAULT_TRUNCATION, MapBundle
from faberlab.core.exceptions import (
    ConditionA3Warning,
    DomainError,
    MapSpecError,
    NumericError,
)
from faberlab.core.faber import FaberPolynomial, faber_sequence
from faberlab.core.map_profile import MapProfileManager, bundle_from_spec, resolve_map_argument
from faberlab.core.special_fn import AlphaParams, alpha
from faberlab.core.verify import VerificationSuite
from faberlab.core.zeros import (
    CountingMeasure,
    accumulation_report,
    find_zeros,
    interior_zero_count,
    zero_free_check,
)
from faberlab.utils.config import ConfigError, default_threads, parse_grid
from faberlab.utils.file_utils import (
    COEFF_CSV_HEADER,
    ZERO_CSV_HEADER,
    write_csv_atomic,
    write_json_atomic,
)
from faberlab.utils.logger import LogCapture

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, str], None]

DEFAULT_ROOT_TOL = 1e-12


def _pair(value: complex) -> List[float]:
    return [float(value.real), float(value.imag)]


class FaberLabController:
    """
    Controller class that mediates between the CLI and the numerical core.

    Each public method returns a result dict with "success" and "message";
    failures also carry "error_kind" ("spec", "numeric", "usage", "verify"
    or "internal").
    """

    def __init__(
        self,
        profiles_dir: Optional[str] = None,
        threads: Optional[int] = None,
    ) -> None:
        """
        Initialize the controller.

        Args:
            profiles_dir: Optional directory of extra map profiles
            threads: Worker cap for per-degree fan-out
        """
        self.profile_manager = MapProfileManager(profiles_dir)
        self.threads = threads or default_threads()

    def get_available_maps(self) -> List[Dict[str, Any]]:
        """List the known map profiles."""
        return self.profile_manager.get_all_profiles()

    def load_bundle(self, map_argument: str, n_max: int = 0) -> MapBundle:
        """
        Resolve a --map argument and build its bundle, truncated for degree n_max.

        Raises:
            MapSpecError: On an unknown or malformed map
        """
        spec = resolve_map_argument(map_argument, self.profile_manager)
        return bundle_from_spec(spec, max(DEFAULT_TRUNCATION, n_max))

    def _failure(self, message: str, kind: str) -> Dict[str, Any]:
        logger.error(message)
        return {"success": False, "message": message, "error_kind": kind}

    def _guarded(self, action: str, body: Callable[[], Dict[str, Any]]) -> Dict[str, Any]:
        try:
            return body()
        except (MapSpecError, ConfigError) as e:
            return self._failure(f"Invalid map or configuration: {str(e)}", "spec")
        except DomainError as e:
            return self._failure(f"Invalid input: {str(e)}", "spec")
        except NumericError as e:
            return self._failure(f"Numeric failure: {str(e)}", "numeric")
        except Exception as e:
            logger.exception(f"Error during {action}")
            return {"success": False, "message": f"Error: {str(e)}", "error_kind": "internal"}

    def _fan_out(self, fn: Callable[[int], Any], degrees: Sequence[int]) -> List[Any]:
        workers = max(1, min(self.threads, len(degrees)))
        if workers == 1:
            return [fn(n) for n in degrees]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(fn, degrees))

    def generate(
        self,
        map_argument: str,
        degrees: Sequence[int],
        out_dir: str,
        fmt: str = "json",
        progress_callback: Optional[ProgressCallback] = None,
    ) -> Dict[str, Any]:
        """
        Write the coefficients of F_n for every requested degree.

        Args:
            map_argument: Profile id, spec path or inline JSON
            degrees: Degrees to write
            out_dir: Output directory
            fmt: "json" (faber_nNNNN.json) or "csv" (faber_nNNNN.csv, k,re,im)
            progress_callback: Optional (percent, message) callback

        Returns:
            Result dict with "files"
        """

        def body() -> Dict[str, Any]:
            if not degrees:
                return self._failure("No degrees requested", "usage")
            if progress_callback:
                progress_callback(5, "Building map...")
            n_max = max(degrees)
            bundle = self.load_bundle(map_argument, n_max)
            if progress_callback:
                progress_callback(30, f"Generating Faber polynomials up to degree {n_max}...")
            sequence = faber_sequence(bundle, n_max)

            def write(n: int) -> str:
                return str(self._write_polynomial(sequence[n], Path(out_dir), fmt))

            if progress_callback:
                progress_callback(70, "Writing coefficient files...")
            files = self._fan_out(write, list(degrees))
            if progress_callback:
                progress_callback(100, "Generation complete")
            logger.info(f"Wrote {len(files)} coefficient file(s) for {bundle.name}")
            return {"success": True, "message": f"Wrote {len(files)} file(s) to {out_dir}", "files": files}

        return self._guarded("generation", body)

    @staticmethod
    def _write_polynomial(poly: FaberPolynomial, out_dir: Path, fmt: str) -> Path:
        stem = f"faber_n{poly.n:04d}"
        if fmt == "csv":
            rows = [(k, float(c.real), float(c.imag)) for k, c in enumerate(poly.coeffs)]
            return write_csv_atomic(out_dir / f"{stem}.csv", COEFF_CSV_HEADER, rows)
        return write_json_atomic(out_dir / f"{stem}.json", poly.to_dict())

    def zeros(
        self,
        map_argument: str,
        degrees: Sequence[int],
        out_dir: str,
        tol: float = DEFAULT_ROOT_TOL,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> Dict[str, Any]:
        """
        Find the zeros of F_n for every requested degree.

        Writes zeros_nNNNN.json per degree ({"n", "zeros", "residuals"}, zeros
        sorted by real then imaginary part) and zeros.csv with rows n,re,im.

        Returns:
            Result dict with "files" and a per-degree "summary"
        """

        def body() -> Dict[str, Any]:
            if not degrees:
                return self._failure("No degrees requested", "usage")
            if progress_callback:
                progress_callback(5, "Building map...")
            n_max = max(degrees)
            bundle = self.load_bundle(map_argument, n_max)
            sequence = faber_sequence(bundle, n_max)
            if progress_callback:
                progress_callback(20, f"Finding zeros for {len(degrees)} degree(s)...")

            def solve(n: int) -> Tuple[int, CountingMeasure]:
                if n == 0:
                    return n, CountingMeasure(np.zeros(0, dtype=complex), 0)
                return n, find_zeros(sequence[n], tol=tol)

            results = self._fan_out(solve, list(degrees))
            if progress_callback:
                progress_callback(80, "Writing zero sets...")

            files: List[str] = []
            rows: List[Tuple[int, float, float]] = []
            summary: List[Dict[str, Any]] = []
            for n, measure in results:
                order = sorted(range(n), key=lambda i: (measure.points[i].real, measure.points[i].imag))
                points = measure.points[order]
                residuals = measure.residuals[order] if measure.residuals.size else np.zeros(0)
                payload = {
                    "n": n,
                    "zeros": [_pair(z) for z in points],
                    "residuals": [float(r) for r in residuals],
                }
                files.append(str(write_json_atomic(Path(out_dir) / f"zeros_n{n:04d}.json", payload)))
                rows.extend((n, float(z.real), float(z.imag)) for z in points)
                summary.append(self._zero_summary(measure, bundle))
            files.append(str(write_csv_atomic(Path(out_dir) / "zeros.csv", ZERO_CSV_HEADER, rows)))

            if progress_callback:
                progress_callback(100, "Zero computation complete")
            unconverged = [s["n"] for s in summary if not s["converged"]]
            message = f"Wrote zeros for {len(results)} degree(s) to {out_dir}"
            if unconverged:
                message += f"; unconverged degrees: {unconverged}"
            return {"success": True, "message": message, "files": files, "summary": summary}

        return self._guarded("zero computation", body)

    @staticmethod
    def _zero_summary(measure: CountingMeasure, bundle: MapBundle) -> Dict[str, Any]:
        summary: Dict[str, Any] = {
            "n": measure.n,
            "converged": measure.converged,
            "iterations": measure.iterations,
            "max_residual": float(np.max(measure.residuals)) if measure.residuals.size else 0.0,
        }
        if measure.n > 0:
            summary["interior"] = interior_zero_count(measure, bundle)
            summary["exterior"] = zero_free_check(measure, bundle).to_dict()
        return summary

    def predict(
        self,
        map_argument: str,
        degrees: Sequence[int],
        out_dir: str,
        grid: Optional[str] = None,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> Dict[str, Any]:
        """
        Emit the asymptotic predictions of a map as prediction.json.

        The report holds corner data with error-rate classes, the normalizer
        alpha and C_1 per degree, H_n on the optional grid, the accumulation
        prediction, the A.3 status and, for lemniscates, the subsequence model.
        A.3 violations are reported as warnings, never as failures.
        """

        def body() -> Dict[str, Any]:
            if not degrees:
                return self._failure("No degrees requested", "usage")
            lattice = self._lattice(grid) if grid else np.zeros(0, dtype=complex)
            if progress_callback:
                progress_callback(10, "Building map...")
            bundle = self.load_bundle(map_argument, max(degrees))
            report_warnings: List[str] = []
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", ConditionA3Warning)
                report = self._prediction(bundle, degrees, lattice, report_warnings, progress_callback)
            report_warnings.extend(str(w.message) for w in caught)
            report["warnings"] = report_warnings
            path = write_json_atomic(Path(out_dir) / "prediction.json", report, indent=2)
            if progress_callback:
                progress_callback(100, "Prediction complete")
            return {
                "success": True,
                "message": f"Wrote {path}",
                "files": [str(path)],
                "warnings": report_warnings,
            }

        return self._guarded("prediction", body)

    @staticmethod
    def _lattice(grid: str) -> np.ndarray:
        re0, re1, im0, im1, count = parse_grid(grid)
        re = np.linspace(re0, re1, count)
        im = np.linspace(im0, im1, count)
        return (re[None, :] + 1j * im[:, None]).ravel()

    def _prediction(
        self,
        bundle: MapBundle,
        degrees: Sequence[int],
        lattice: np.ndarray,
        notes: List[str],
        progress_callback: Optional[ProgressCallback],
    ) -> Dict[str, Any]:
        model = build_interior_model(bundle)
        corners = []
        for corner in bundle.corners:
            entry: Dict[str, Any] = {
                "theta": corner.theta,
                "lambda": corner.lam,
                "z": _pair(corner.z),
                "A": _pair(corner.A),
                "relevant": corner.relevant,
            }
            if corner.relevant:
                entry["pair"] = list(corner.pair)
                entry["C"] = corner_normalizer(corner)
                entry["rate"] = error_rate_class(corner).to_dict()
            corners.append(entry)

        if progress_callback:
            progress_callback(30, "Evaluating interior model...")
        per_degree = [self._degree_prediction(model, n, lattice) for n in degrees]

        if progress_callback:
            progress_callback(60, "Solving accumulation equations...")
        try:
            accumulation = accumulation_report(model)
        except DomainError as e:
            accumulation = {"kind": "unsupported", "data": None, "note": str(e)}
            notes.append(str(e))

        a3 = a3_check(model)
        report: Dict[str, Any] = {
            "map": {"name": bundle.name, "kind": bundle.kind, "params": bundle.params, "K": bundle.map.K},
            "corners": corners,
            "u": bundle.u,
            "Lambda1": model.big_lambda,
            "M1": model.big_m,
            "C1": model.c1,
            "Ahat": [_pair(h) for h in model.hats],
            "theta": [float(t) for t in model.thetas],
            "degrees": per_degree,
            "grid": [_pair(z) for z in lattice],
            "accumulation": accumulation,
            "a3": a3.to_dict(),
        }
        if a3.violated:
            notes.append(
                f"H_n vanishes identically for residue classes {a3.vanishing_classes}; "
                "see the subsequence model where available"
            )
        s = bundle.params.get("s")
        if bundle.kind == "lemniscate" and isinstance(s, int):
            report["subsequence_model"] = self._lemniscate_prediction(s, degrees, lattice)
        return report

    @staticmethod
    def _degree_prediction(model: InteriorModel, n: int, lattice: np.ndarray) -> Dict[str, Any]:
        entry: Dict[str, Any] = {"n": n, "C1": model.c1}
        if n < 2:
            entry.update({"alpha": None, "normalizer": None, "H": None})
            return entry
        entry["alpha"] = alpha(AlphaParams(model.big_lambda - 1.0, model.big_m, n))
        try:
            entry["normalizer"] = _pair(interior_normalizer(model, n))
        except NumericError as e:
            entry["normalizer"] = None
            entry["note"] = str(e)
        rational = interior_model(model, n)
        entry["H_vanishes"] = rational.is_zero
        values: List[Optional[List[float]]] = []
        for z in lattice:
            try:
                values.append(_pair(complex(rational(z))))
            except DomainError:
                values.append(None)
        entry["H"] = values
        return entry

    @staticmethod
    def _lemniscate_prediction(s: int, degrees: Sequence[int], lattice: np.ndarray) -> List[Dict[str, Any]]:
        out: List[Dict[str, Any]] = []
        for n in degrees:
            m, l = divmod(n, s)
            if l == 0 or m < 1:
                continue
            leading: List[Optional[List[float]]] = []
            correction: List[Optional[List[float]]] = []
            for z in lattice:
                try:
                    lead, corr = lemniscate_subsequence_model(s, l, m, complex(z))
                except DomainError:
                    leading.append(None)
                    correction.append(None)
                    continue
                leading.append(_pair(lead))
                correction.append(_pair(corr))
            out.append(
                {
                    "n": n,
                    "m": m,
                    "l": l,
                    "normalizer": lemniscate_subsequence_normalizer(s, l, m),
                    "leading": leading,
                    "correction": correction,
                }
            )
        return out

    def verify(
        self,
        tolerances: Optional[Dict[str, float]] = None,
        seed: int = 0,
        degrees: Optional[Sequence[int]] = None,
        out_dir: Optional[str] = None,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> Dict[str, Any]:
        """
        Run the acceptance suite.

        Returns:
            Result dict with the full "report"; success is False with
            error_kind "verify" when any check fails
        """

        def body() -> Dict[str, Any]:
            suite = VerificationSuite(tolerances, seed, degrees, progress_callback)
            with LogCapture(logging.WARNING) as capture:
                report = suite.run()
            report["warnings"] = capture.messages()
            files: List[str] = []
            if out_dir:
                files.append(str(write_json_atomic(Path(out_dir) / "verify_report.json", report, indent=2)))
            failed = [c["name"] for c in report["checks"] if not c["passed"]]
            result: Dict[str, Any] = {"report": report, "files": files}
            if failed:
                result.update(
                    success=False,
                    message=f"{len(failed)} check(s) failed: {', '.join(failed)}",
                    error_kind="verify",
                )
            else:
                result.update(success=True, message=f"All {len(report['checks'])} checks passed")
            return result

        return self._guarded("verification", body)


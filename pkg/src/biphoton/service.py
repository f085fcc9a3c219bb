"""FastAPI service exposing the analyses over HTTP.

Every analysis endpoint accepts the raw CSV text of a count table plus the
analysis knobs, and returns the same report envelope the library produces.
Input problems (schema mismatches, negative rates, missing metadata,
physically impossible requests) map to 422 with a one-line diagnostic.
"""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import analysis, qpm, tables, tomography
from ._version import __version__

__all__ = ["app"]


class Metric(BaseModel):
    value: float
    sigma: float | None = None


class InputsDigest(BaseModel):
    sha256: str
    rows: int


class Report(BaseModel):
    """Common report envelope; kind-specific payloads ride as extra fields."""

    model_config = ConfigDict(extra="allow", populate_by_name=True)

    schema_: str = Field(alias="schema")
    kind: str
    tool_version: str
    inputs: InputsDigest | None = None
    config: dict
    metrics: dict[str, Metric]
    notes: list[str] = []


class BellRequest(BaseModel):
    csv_text: str
    angles: tuple[float, float, float, float] = Field(
        default=(-45.0, -22.5, 0.0, 22.5),
        description="analyzer angles (a, b, a', b') in degrees",
    )
    n_replicas: int = analysis.DEFAULT_REPLICAS
    seed: int = analysis.DEFAULT_SEED


class VisibilityRequest(BaseModel):
    csv_text: str
    n_replicas: int = analysis.DEFAULT_REPLICAS
    seed: int = analysis.DEFAULT_SEED


class FreedmanRequest(BaseModel):
    csv_text: str
    phi1: float = 22.5
    phi2: float = 67.5
    n_replicas: int = analysis.DEFAULT_REPLICAS
    seed: int = analysis.DEFAULT_SEED


class TomoOptions(BaseModel):
    subtract_accidentals: bool = True
    accidental_compat_integration: bool = False
    fit_scale: bool = False
    max_iterations: int = 2000


class TomoRequest(TomoOptions):
    csv_text: str
    n_replicas: int = 0
    seed: int = analysis.DEFAULT_SEED


class RhoPayload(BaseModel):
    model_config = ConfigDict(extra="allow")

    re: list[list[float]]
    im: list[list[float]]
    basis: list[str] | None = None


class MeasuresRequest(TomoOptions):
    csv_text: str | None = None
    rho: RhoPayload | None = None
    target_phi: float = 0.0
    n_replicas: int = 0
    seed: int = analysis.DEFAULT_SEED


class SimulateRequest(BaseModel):
    kind: Literal["tomo", "chsh", "freedman", "visibility"]
    phi: float = 0.0
    pairs: float = 1e6
    eps_a: float = 1.0
    eps_b: float = 1.0
    dark_a: float = 0.0
    dark_b: float = 0.0
    window_s: float = 5e-9
    integration_s: float = 0.4
    seed: int = analysis.DEFAULT_SEED
    noiseless: bool = False


class SimulateResponse(BaseModel):
    kind: str
    csv_text: str
    config: dict
    tool_version: str


class QpmRequest(BaseModel):
    lambda_pump_nm: float
    lambda_signal_nm: float | None = None
    lambda_idler_nm: float | None = None
    degenerate: bool = False
    poling_period_um: float = 10.025
    temperature_c: float = 30.0
    qpm_order: int = 1
    dispersion_model: str = qpm.DEFAULT_DISPERSION
    scan_t_min: float = 20.0
    scan_t_max: float = 40.0


class Health(BaseModel):
    status: str
    version: str


app = FastAPI(
    title="biphoton",
    version=__version__,
    description="Polarization-entanglement analysis service: tomography, "
    "nonlocality tests, entanglement measures, source simulation and QPM.",
)


def _bad_input(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=str(exc))


@app.get("/v1/health", response_model=Health)
def health() -> Health:
    return Health(status="ok", version=__version__)


@app.post("/v1/bell", response_model=Report)
def bell_endpoint(req: BellRequest):
    try:
        grid = tables.parse_counts_text(req.csv_text, "chsh")
        return analysis.analyze_bell(
            grid, angles=req.angles, n_replicas=req.n_replicas, seed=req.seed,
            csv_text=req.csv_text,
        )
    except ValueError as exc:
        raise _bad_input(exc) from exc


@app.post("/v1/visibility", response_model=Report)
def visibility_endpoint(req: VisibilityRequest):
    try:
        table = tables.parse_counts_text(req.csv_text, "visibility")
        return analysis.analyze_visibility(
            table, n_replicas=req.n_replicas, seed=req.seed, csv_text=req.csv_text
        )
    except ValueError as exc:
        raise _bad_input(exc) from exc


@app.post("/v1/freedman", response_model=Report)
def freedman_endpoint(req: FreedmanRequest):
    try:
        data = tables.parse_counts_text(req.csv_text, "freedman")
        return analysis.analyze_freedman(
            data, phi1=req.phi1, phi2=req.phi2, n_replicas=req.n_replicas,
            seed=req.seed, csv_text=req.csv_text,
        )
    except ValueError as exc:
        raise _bad_input(exc) from exc


def _mle_config(opts: TomoOptions) -> tomography.MLEConfig:
    return tomography.MLEConfig(
        subtract_accidentals=opts.subtract_accidentals,
        accidental_compat_integration=opts.accidental_compat_integration,
        fit_scale=opts.fit_scale,
        max_iterations=opts.max_iterations,
    )


@app.post("/v1/tomo", response_model=Report)
def tomo_endpoint(req: TomoRequest):
    try:
        data = tables.parse_counts_text(req.csv_text, "tomo")
        return analysis.analyze_tomo(
            data, config=_mle_config(req), n_replicas=req.n_replicas,
            seed=req.seed, csv_text=req.csv_text,
        )
    except ValueError as exc:
        raise _bad_input(exc) from exc


@app.post("/v1/measures", response_model=Report)
def measures_endpoint(req: MeasuresRequest):
    try:
        if (req.csv_text is None) == (req.rho is None):
            raise ValueError("provide exactly one of csv_text or rho")
        if req.rho is not None:
            rho = analysis.rho_from_payload(req.rho.model_dump())
            return analysis.analyze_measures(
                rho=rho, target_phi=req.target_phi, n_replicas=0, seed=req.seed
            )
        data = tables.parse_counts_text(req.csv_text, "tomo")
        return analysis.analyze_measures(
            data=data, target_phi=req.target_phi, config=_mle_config(req),
            n_replicas=req.n_replicas, seed=req.seed, csv_text=req.csv_text,
        )
    except ValueError as exc:
        raise _bad_input(exc) from exc


@app.post("/v1/simulate", response_model=SimulateResponse)
def simulate_endpoint(req: SimulateRequest):
    try:
        csv_text = analysis.run_simulate(
            kind=req.kind, phi=req.phi, pairs=req.pairs, eps_a=req.eps_a,
            eps_b=req.eps_b, dark_a=req.dark_a, dark_b=req.dark_b,
            window_s=req.window_s, integration_s=req.integration_s,
            seed=req.seed, noiseless=req.noiseless,
        )
    except ValueError as exc:
        raise _bad_input(exc) from exc
    return SimulateResponse(
        kind=req.kind, csv_text=csv_text,
        config=req.model_dump(), tool_version=__version__,
    )


@app.post("/v1/qpm", response_model=Report)
def qpm_endpoint(req: QpmRequest):
    try:
        return analysis.run_qpm(
            lambda_pump_nm=req.lambda_pump_nm,
            lambda_signal_nm=req.lambda_signal_nm,
            lambda_idler_nm=req.lambda_idler_nm,
            degenerate=req.degenerate,
            poling_period_um=req.poling_period_um,
            temperature_c=req.temperature_c,
            qpm_order=req.qpm_order,
            dispersion_model=req.dispersion_model,
            scan_t_min=req.scan_t_min,
            scan_t_max=req.scan_t_max,
        )
    except ValueError as exc:
        raise _bad_input(exc) from exc

"""Command-line client of the biphoton service.

Every subcommand is a thin HTTP client: it reads its input file, POSTs the
request to the FastAPI app and prints the JSON report.  By default the app
runs in-process (no server needed, `simulate ... | tomo -` just works);
``--server URL`` targets a remote instance instead.

Exit codes: 0 success, 2 input/usage error (diagnostic on stderr),
1 transport or server failure.
"""

from __future__ import annotations

import asyncio
import json
import os
import sys
from pathlib import Path

import click
import httpx

from ._version import __version__
from .analysis import DEFAULT_REPLICAS, DEFAULT_SEED, canonical_json

_SEED_ENV = "BIPHOTON_SEED"


def _default_seed() -> int:
    raw = os.environ.get(_SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        click.echo(f"warning: ignoring non-integer {_SEED_ENV}={raw!r}", err=True)
        return DEFAULT_SEED


def _post(server: str | None, path: str, payload: dict) -> httpx.Response:
    if server:
        try:
            with httpx.Client(base_url=server, timeout=600.0) as client:
                return client.post(path, json=payload)
        except httpx.HTTPError as exc:
            click.echo(f"error: cannot reach server {server}: {exc}", err=True)
            sys.exit(1)

    from .service import app  # deferred: keeps --help fast

    async def call():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://biphoton.internal", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(call())


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    p = Path(path)
    if not p.exists():
        click.echo(f"error: input file {path} does not exist", err=True)
        sys.exit(2)
    return p.read_text(encoding="utf-8")


def _emit_report(resp: httpx.Response, indent: int | None) -> None:
    if resp.status_code == 200:
        body = resp.json()
        if indent:
            click.echo(json.dumps(body, sort_keys=True, indent=indent))
        else:
            click.echo(canonical_json(body))
        return
    detail = ""
    try:
        detail = resp.json().get("detail", "")
    except Exception:
        detail = resp.text
    if resp.status_code in (400, 422):
        click.echo(f"error: {detail}", err=True)
        sys.exit(2)
    click.echo(f"error: server returned {resp.status_code}: {detail}", err=True)
    sys.exit(1)


def _input_arg(positional: str | None, option: str | None) -> str:
    if positional and option and positional != option:
        click.echo("error: give the input either positionally or via --input, not both", err=True)
        sys.exit(2)
    path = option or positional
    if not path:
        click.echo("error: missing input (use a path or '-' for stdin)", err=True)
        sys.exit(2)
    return path


server_option = click.option("--server", default=None, metavar="URL",
                             help="Remote service URL (default: run in-process).")
seed_option = click.option("--seed", type=int, default=None,
                           help=f"RNG seed (default {DEFAULT_SEED}, env {_SEED_ENV}).")
indent_option = click.option("--indent", type=int, default=None,
                             help="Pretty-print JSON with this indent.")


@click.group()
@click.version_option(version=__version__)
def main():
    """Polarization-entanglement analysis toolkit."""


@main.command()
@click.argument("input_positional", required=False, metavar="[INPUT]")
@click.option("--input", "-i", "input_option", metavar="PATH", help="CHSH CSV ('-' = stdin).")
@click.option("--angles", nargs=4, type=float, default=(-45.0, -22.5, 0.0, 22.5),
              show_default=True, help="Analyzer angles a b a' b' (degrees).")
@click.option("--replicas", type=int, default=DEFAULT_REPLICAS, show_default=True,
              help="Bootstrap replicas (0 = no uncertainties).")
@seed_option
@server_option
@indent_option
def bell(input_positional, input_option, angles, replicas, seed, server, indent):
    """CHSH S-parameter from a 16-setting coincidence grid."""
    text = _read_input(_input_arg(input_positional, input_option))
    resp = _post(server, "/v1/bell", {
        "csv_text": text,
        "angles": list(angles),
        "n_replicas": replicas,
        "seed": seed if seed is not None else _default_seed(),
    })
    _emit_report(resp, indent)


@main.command()
@click.argument("input_positional", required=False, metavar="[INPUT]")
@click.option("--input", "-i", "input_option", metavar="PATH", help="Visibility CSV ('-' = stdin).")
@click.option("--replicas", type=int, default=DEFAULT_REPLICAS, show_default=True)
@seed_option
@server_option
@indent_option
def visibility(input_positional, input_option, replicas, seed, server, indent):
    """Fringe visibility in the H/V and D/A bases."""
    text = _read_input(_input_arg(input_positional, input_option))
    resp = _post(server, "/v1/visibility", {
        "csv_text": text,
        "n_replicas": replicas,
        "seed": seed if seed is not None else _default_seed(),
    })
    _emit_report(resp, indent)


@main.command()
@click.argument("input_positional", required=False, metavar="[INPUT]")
@click.option("--input", "-i", "input_option", metavar="PATH", help="Freedman CSV ('-' = stdin).")
@click.option("--phi1", type=float, default=22.5, show_default=True)
@click.option("--phi2", type=float, default=67.5, show_default=True)
@click.option("--replicas", type=int, default=DEFAULT_REPLICAS, show_default=True)
@seed_option
@server_option
@indent_option
def freedman(input_positional, input_option, phi1, phi2, replicas, seed, server, indent):
    """Freedman parameter and sin^2 transmittance fit."""
    text = _read_input(_input_arg(input_positional, input_option))
    resp = _post(server, "/v1/freedman", {
        "csv_text": text,
        "phi1": phi1,
        "phi2": phi2,
        "n_replicas": replicas,
        "seed": seed if seed is not None else _default_seed(),
    })
    _emit_report(resp, indent)


def _tomo_payload(text, subtract_accidentals, accidental_compat, fit_scale, replicas, seed):
    return {
        "csv_text": text,
        "subtract_accidentals": subtract_accidentals,
        "accidental_compat_integration": accidental_compat,
        "fit_scale": fit_scale,
        "n_replicas": replicas,
        "seed": seed if seed is not None else _default_seed(),
    }


def tomo_flags(f):
    f = click.option(
        "--fit-scale", is_flag=True,
        help="Fit the pair-rate scale n0 instead of fixing it to the complete-basis counts.",
    )(f)
    f = click.option(
        "--accidental-compat", is_flag=True,
        help="Use the tau*RA*RB/T accidental variant.",
    )(f)
    f = click.option(
        "--subtract-accidentals/--no-subtract-accidentals", default=True,
        show_default=True, help="Remove tau*RA*RB before the fit.",
    )(f)
    return f


@main.command()
@click.argument("input_positional", required=False, metavar="[INPUT]")
@click.option("--input", "-i", "input_option", metavar="PATH", help="Tomography CSV ('-' = stdin).")
@tomo_flags
@click.option("--replicas", type=int, default=0, show_default=True,
              help="Bootstrap replicas for eigenvalue/purity errors (slow).")
@seed_option
@server_option
@indent_option
def tomo(input_positional, input_option, replicas, seed, server, indent,
         subtract_accidentals, accidental_compat, fit_scale):
    """Maximum-likelihood density-matrix reconstruction from 16 projections."""
    text = _read_input(_input_arg(input_positional, input_option))
    resp = _post(server, "/v1/tomo", _tomo_payload(
        text, subtract_accidentals, accidental_compat, fit_scale, replicas, seed))
    _emit_report(resp, indent)


@main.command()
@click.argument("input_positional", required=False, metavar="[INPUT]")
@click.option("--input", "-i", "input_option", metavar="PATH",
              help="Tomography CSV to reconstruct inline ('-' = stdin).")
@click.option("--rho", "rho_path", metavar="PATH",
              help="Density-matrix JSON (bare payload or a tomo report; '-' = stdin).")
@click.option("--target-phi", type=float, default=0.0, show_default=True,
              help="Bell-state phase of the fidelity target (radians).")
@tomo_flags
@click.option("--replicas", type=int, default=0, show_default=True,
              help="Bootstrap replicas (tomography path only; slow).")
@seed_option
@server_option
@indent_option
def measures(input_positional, input_option, rho_path, target_phi, replicas, seed,
             server, indent, subtract_accidentals, accidental_compat, fit_scale):
    """Entanglement measures from a density matrix or a count table."""
    payload = {
        "target_phi": target_phi,
        "n_replicas": replicas,
        "seed": seed if seed is not None else _default_seed(),
        "subtract_accidentals": subtract_accidentals,
        "accidental_compat_integration": accidental_compat,
        "fit_scale": fit_scale,
    }
    if rho_path and (input_positional or input_option):
        click.echo("error: give either --rho or a count table, not both", err=True)
        sys.exit(2)
    if rho_path:
        raw = _read_input(rho_path)
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            click.echo(f"error: {rho_path} is not valid JSON: {exc}", err=True)
            sys.exit(2)
        if isinstance(obj, dict) and isinstance(obj.get("rho"), dict):
            obj = obj["rho"]
        payload["rho"] = obj
    else:
        payload["csv_text"] = _read_input(_input_arg(input_positional, input_option))
    resp = _post(server, "/v1/measures", payload)
    _emit_report(resp, indent)


@main.command()
@click.option("--kind", type=click.Choice(["tomo", "chsh", "freedman", "visibility"]),
              default="tomo", show_default=True, help="Which table schema to emit.")
@click.option("--state", type=click.Choice(["bell"]), default="bell", show_default=True)
@click.option("--phi", type=float, default=0.0, show_default=True,
              help="Bell-state phase (radians).")
@click.option("--pairs", type=float, default=1e6, show_default=True,
              help="Generated pair rate (pairs/s).")
@click.option("--eps-a", type=float, default=1.0, show_default=True)
@click.option("--eps-b", type=float, default=1.0, show_default=True)
@click.option("--dark-a", type=float, default=0.0, show_default=True)
@click.option("--dark-b", type=float, default=0.0, show_default=True)
@click.option("--window", "window_s", type=float, default=5e-9, show_default=True,
              help="Coincidence window (s).")
@click.option("--integration", "integration_s", type=float, default=0.4,
              show_default=True, help="Integration time per setting (s).")
@click.option("--noiseless", is_flag=True, help="Emit exact expected rates (no Poisson noise).")
@seed_option
@server_option
def simulate(kind, state, phi, pairs, eps_a, eps_b, dark_a, dark_b,
             window_s, integration_s, noiseless, seed, server):
    """Synthesize a count table CSV from a modeled pair source."""
    del state  # only the Bell family is modeled
    resp = _post(server, "/v1/simulate", {
        "kind": kind,
        "phi": phi,
        "pairs": pairs,
        "eps_a": eps_a,
        "eps_b": eps_b,
        "dark_a": dark_a,
        "dark_b": dark_b,
        "window_s": window_s,
        "integration_s": integration_s,
        "seed": seed if seed is not None else _default_seed(),
        "noiseless": noiseless,
    })
    if resp.status_code != 200:
        _emit_report(resp, None)
    click.echo(resp.json()["csv_text"], nl=False)


@main.command()
@click.option("--lambda-p", "lambda_pump_nm", type=float, required=True,
              help="Pump wavelength (nm).")
@click.option("--lambda-s", "lambda_signal_nm", type=float, default=None,
              help="Signal wavelength (nm).")
@click.option("--lambda-i", "lambda_idler_nm", type=float, default=None,
              help="Idler wavelength (nm; default from energy conservation).")
@click.option("--degenerate", is_flag=True, help="Set signal = idler = 2 * pump.")
@click.option("--period", "poling_period_um", type=float, default=10.025,
              show_default=True, help="Poling period at 25 C (um).")
@click.option("--temp", "temperature_c", type=float, default=30.0, show_default=True,
              help="Crystal temperature (C).")
@click.option("--order", "qpm_order", type=int, default=1, show_default=True)
@click.option("--model", "dispersion_model", default=None,
              help="Dispersion model identifier.")
@click.option("--scan-min", type=float, default=20.0, show_default=True)
@click.option("--scan-max", type=float, default=40.0, show_default=True)
@server_option
@indent_option
def qpm(lambda_pump_nm, lambda_signal_nm, lambda_idler_nm, degenerate,
        poling_period_um, temperature_c, qpm_order, dispersion_model,
        scan_min, scan_max, server, indent):
    """Quasi-phase-matching mismatch and its zero in a temperature scan."""
    payload = {
        "lambda_pump_nm": lambda_pump_nm,
        "lambda_signal_nm": lambda_signal_nm,
        "lambda_idler_nm": lambda_idler_nm,
        "degenerate": degenerate,
        "poling_period_um": poling_period_um,
        "temperature_c": temperature_c,
        "qpm_order": qpm_order,
        "scan_t_min": scan_min,
        "scan_t_max": scan_max,
    }
    if dispersion_model:
        payload["dispersion_model"] = dispersion_model
    resp = _post(server, "/v1/qpm", payload)
    _emit_report(resp, indent)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the analysis service with uvicorn."""
    try:
        import uvicorn
    except ImportError:
        click.echo("error: uvicorn is not installed (pip install 'biphoton[server]')", err=True)
        sys.exit(1)
    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()

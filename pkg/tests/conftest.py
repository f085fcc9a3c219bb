import json

import numpy as np
import pytest

from biphoton.analysis import rho_from_payload
from biphoton.fixtures import fixture_text
from biphoton.tables import parse_counts_text


@pytest.fixture(scope="session")
def visibility_table():
    return parse_counts_text(fixture_text("table1_visibility.csv"), "visibility")


@pytest.fixture(scope="session")
def chsh_grid():
    return parse_counts_text(fixture_text("table2_chsh.csv"), "chsh")


@pytest.fixture(scope="session")
def freedman_data():
    return parse_counts_text(fixture_text("table3_freedman.csv"), "freedman")


@pytest.fixture(scope="session")
def tomo_dataset():
    return parse_counts_text(fixture_text("table4_tomo.csv"), "tomo")


@pytest.fixture(scope="session")
def published_rho():
    """The published reconstructed matrix, repaired onto the physical set."""
    return rho_from_payload(json.loads(fixture_text("rho_published.json")))


@pytest.fixture(scope="session")
def published_rho_raw():
    """The published matrix exactly as printed (trace 0.99943, one -5e-5 eig)."""
    obj = json.loads(fixture_text("rho_published.json"))
    return np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)


def random_density_matrix(rng, rank: int = 4) -> np.ndarray:
    """Ginibre-induced random mixed state of the given rank."""
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure_state(rng) -> np.ndarray:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return v / np.linalg.norm(v)


def random_unitary(rng, dim: int = 2) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))

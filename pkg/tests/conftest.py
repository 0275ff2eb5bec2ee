import pytest

from src.models.entities import BoundaryLayout, Metric, ShapeKind, ShapeSpec, SolverOptions
from src.solvers.domains import build_domain

MU_LAYOUT = BoundaryLayout.INNER_DIRICHLET_OUTER_NEUMANN


@pytest.fixture
def solver_opts():
    """Tight radial solver settings for oracle comparisons."""
    return SolverOptions(eig_rel_tol=1e-10, ode_tol=1e-11)


@pytest.fixture
def unit_square():
    return ShapeSpec(ShapeKind.RECTANGLE, (1.0, 1.0))


@pytest.fixture
def coarse_annulus():
    """Concentric annulus (1, 0.3) at h = 1/16, inner Neumann."""
    return build_domain(ShapeSpec(ShapeKind.ANNULUS, (1.0, 0.3)), 1.0 / 16)


@pytest.fixture
def offset_annulus():
    """Annulus with its hole shifted by 0.4, at h = 1/16."""
    return build_domain(ShapeSpec(ShapeKind.ANNULUS, (1.0, 0.3), 0.4), 1.0 / 16)


@pytest.fixture
def mu_annulus():
    return build_domain(ShapeSpec(ShapeKind.ANNULUS, (1.0, 0.3), 0.0, MU_LAYOUT), 1.0 / 16)


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    monkeypatch.delenv("ANNULUS_SPECTRA_CACHE", raising=False)
    return tmp_path / "cache"

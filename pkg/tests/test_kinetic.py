"""
Unit tests for e-particle deposition and the derived velocity fields.
"""

from __future__ import annotations

import numpy as np
import pytest

from riskwave.errors import BadGridError, IncompatibleGridsError, ParticleOutOfDomainError
from riskwave.kinetic import FieldGrid, GridSpec, ParticleEnsemble, deposit_fields, field_velocity, particle_impulses
from riskwave.models import Deposition, EParticle


def _random_ensemble(seed: int, n: int, grid: GridSpec, n_variables: int = 2) -> ParticleEnsemble:
  rng = np.random.default_rng(seed)
  return ParticleEnsemble(
    positions=np.column_stack([rng.uniform(0.0, grid.X, n), rng.uniform(0.0, grid.Y, n)]),
    velocities=rng.normal(size=(n, 2)),
    values=rng.uniform(0.1, 5.0, size=(n, n_variables)),
  )


def test_particle_impulses_scale_velocity() -> None:
  """Each extensive variable contributes u_j * v."""
  particle = EParticle(position=(0.1, 0.2), velocity=(2.0, -1.0), extensive_values=(3.0, 0.5))

  assert particle_impulses(particle) == [(6.0, -3.0), (1.0, -0.5)]


def test_two_particles_in_one_cell() -> None:
  """Density and impulse add; velocity is the density-weighted mean."""
  grid = GridSpec(nx=2, ny=2, X=1.0, Y=1.0)
  ensemble = ParticleEnsemble.from_particles(
    [
      EParticle(position=(0.1, 0.1), velocity=(1.0, 0.0), extensive_values=(3.0,)),
      EParticle(position=(0.2, 0.3), velocity=(3.0, 0.0), extensive_values=(5.0,)),
    ],
  )

  density, impulse = deposit_fields(ensemble, grid, 0)
  velocity = field_velocity(density, impulse)

  assert density.values[0, 0] == 8.0
  assert tuple(impulse.values[0, 0]) == (18.0, 0.0)
  assert tuple(velocity.values[0, 0]) == (2.25, 0.0)


def test_single_particle_cell_keeps_particle_velocity() -> None:
  """A cell holding one particle reports that particle's velocity."""
  grid = GridSpec(nx=4, ny=4, X=2.0, Y=2.0)
  particle = EParticle(position=(1.3, 0.4), velocity=(0.1, -0.7), extensive_values=(3.0,))

  density, impulse = deposit_fields(ParticleEnsemble.from_particles([particle]), grid, 0)
  velocity = field_velocity(density, impulse)

  np.testing.assert_allclose(velocity.values[2, 0], [0.1, -0.7], rtol=1e-12)


def test_empty_cells_are_marked() -> None:
  """Cells below the density floor carry NaN and the empty flag."""
  grid = GridSpec(nx=3, ny=1, X=3.0, Y=1.0)
  particle = EParticle(position=(0.5, 0.5), velocity=(1.0, 1.0), extensive_values=(2.0,))

  density, impulse = deposit_fields(ParticleEnsemble.from_particles([particle]), grid, 0)
  velocity = field_velocity(density, impulse)

  assert velocity.empty is not None
  assert velocity.empty.tolist() == [[False], [True], [True]]
  assert np.isnan(velocity.values[1, 0]).all()
  np.testing.assert_array_equal(velocity.total(), [1.0, 1.0])


@pytest.mark.parametrize("deposition", list(Deposition))
def test_deposition_conserves_totals(deposition: Deposition) -> None:
  """Grid totals equal particle totals for 10,000 random particles."""
  grid = GridSpec(nx=17, ny=11, X=2.0, Y=1.5)
  ensemble = _random_ensemble(7, 10_000, grid)

  for variable in range(ensemble.n_variables):
    density, impulse = deposit_fields(ensemble, grid, variable, deposition)
    u = ensemble.values[:, variable]

    assert float(density.total()) == pytest.approx(float(u.sum()), rel=1e-12)
    np.testing.assert_allclose(impulse.total(), (u[:, None] * ensemble.velocities).sum(axis=0), rtol=1e-12, atol=1e-9)


@pytest.mark.parametrize("deposition", list(Deposition))
def test_deposition_is_additive(deposition: Deposition) -> None:
  """Depositing a union equals adding the two depositions."""
  grid = GridSpec(nx=8, ny=8, X=1.0, Y=1.0)
  first = _random_ensemble(1, 300, grid)
  second = _random_ensemble(2, 200, grid)

  union_density, union_impulse = deposit_fields(first.union(second), grid, 1, deposition)
  a_density, a_impulse = deposit_fields(first, grid, 1, deposition)
  b_density, b_impulse = deposit_fields(second, grid, 1, deposition)

  np.testing.assert_allclose(union_density.values, (a_density + b_density).values, rtol=1e-12, atol=1e-12)
  np.testing.assert_allclose(union_impulse.values, (a_impulse + b_impulse).values, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("deposition", list(Deposition))
def test_cell_velocity_is_a_convex_combination(deposition: Deposition) -> None:
  """With u >= 0 every filled cell's velocity stays inside the range of the particles that reach it."""
  grid = GridSpec(nx=6, ny=5, X=1.2, Y=1.0)
  sample = _random_ensemble(3, 400, grid)
  values = sample.values.copy()
  values[::7] = 0.0
  ensemble = ParticleEnsemble(positions=sample.positions, velocities=sample.velocities, values=values)
  # Nearest-cell particles sit within half a cell of the center, bilinear ones within a full cell.
  reach = (1.0 if deposition is Deposition.BILINEAR else 0.5) + 1e-9
  xs, ys = grid.centers()

  for variable in range(ensemble.n_variables):
    density, impulse = deposit_fields(ensemble, grid, variable, deposition)
    velocity = field_velocity(density, impulse)
    assert velocity.empty is not None

    for i in range(grid.nx):
      for j in range(grid.ny):
        if velocity.empty[i, j]:
          continue
        near = (np.abs(ensemble.positions[:, 0] - xs[i]) <= reach * grid.dx) & (
          np.abs(ensemble.positions[:, 1] - ys[j]) <= reach * grid.dy
        )
        reaching = ensemble.velocities[near]
        assert np.all(velocity.values[i, j] >= reaching.min(axis=0) - 1e-12)
        assert np.all(velocity.values[i, j] <= reaching.max(axis=0) + 1e-12)


def test_each_variable_moves_with_its_own_carriers() -> None:
  """Investment-heavy fast particles and profit-heavy slow ones give different velocities per variable."""
  grid = GridSpec(nx=2, ny=1, X=2.0, Y=1.0)
  fast = [EParticle(position=(x, 0.5), velocity=(2.0, 0.0), extensive_values=(4.0, 1.0)) for x in (0.25, 1.25)]
  slow = [EParticle(position=(x, 0.5), velocity=(0.5, 0.0), extensive_values=(1.0, 4.0)) for x in (0.75, 1.75)]
  ensemble = ParticleEnsemble.from_particles(fast + slow)

  investment = field_velocity(*deposit_fields(ensemble, grid, 0))
  profits = field_velocity(*deposit_fields(ensemble, grid, 1))

  np.testing.assert_allclose(investment.values[:, 0, 0], [1.7, 1.7], rtol=1e-12)
  np.testing.assert_allclose(profits.values[:, 0, 0], [0.8, 0.8], rtol=1e-12)
  assert not np.allclose(investment.values, profits.values)


def test_deposition_is_deterministic() -> None:
  """Repeated runs produce bit-identical grids."""
  grid = GridSpec(nx=5, ny=7, X=1.0, Y=1.0)
  ensemble = _random_ensemble(11, 1_000, grid)

  first = deposit_fields(ensemble, grid, 0, Deposition.BILINEAR)
  second = deposit_fields(ensemble, grid, 0, Deposition.BILINEAR)

  np.testing.assert_array_equal(first[0].values, second[0].values)
  np.testing.assert_array_equal(first[1].values, second[1].values)


def test_particles_on_the_far_edge_land_in_last_cell() -> None:
  """x = X belongs to the last column."""
  grid = GridSpec(nx=4, ny=4, X=1.0, Y=1.0)
  particle = EParticle(position=(1.0, 1.0), velocity=(0.0, 0.0), extensive_values=(1.0,))

  density, _ = deposit_fields(ParticleEnsemble.from_particles([particle]), grid, 0)

  assert density.values[3, 3] == 1.0


def test_particle_outside_domain_raises() -> None:
  """Deposition refuses particles beyond the rectangle."""
  grid = GridSpec(nx=4, ny=4, X=1.0, Y=1.0)
  particle = EParticle(position=(1.5, 0.5), velocity=(0.0, 0.0), extensive_values=(1.0,))

  with pytest.raises(ParticleOutOfDomainError):
    deposit_fields(ParticleEnsemble.from_particles([particle]), grid, 0)


def test_incompatible_grids_raise() -> None:
  """Velocity needs density and impulse on the same grid."""
  density = FieldGrid(spec=GridSpec(nx=2, ny=2, X=1.0, Y=1.0), values=np.ones((2, 2)))
  impulse = FieldGrid(spec=GridSpec(nx=3, ny=2, X=1.0, Y=1.0), values=np.ones((3, 2, 2)))

  with pytest.raises(IncompatibleGridsError):
    field_velocity(density, impulse)


def test_bad_grid_raises() -> None:
  """Zero cells are rejected."""
  with pytest.raises(BadGridError):
    GridSpec(nx=0, ny=4, X=1.0, Y=1.0)


def test_variable_index_is_checked() -> None:
  """Only carried variables can be deposited."""
  grid = GridSpec(nx=2, ny=2, X=1.0, Y=1.0)
  ensemble = _random_ensemble(0, 10, grid, n_variables=1)

  with pytest.raises(IndexError):
    deposit_fields(ensemble, grid, 1)

import numpy as np
import pytest

from cat_swarm_bench.errors import ConfigurationError, NonFiniteFitnessError, UsageError
from cat_swarm_bench.objective_suite import Objective, lookup, sphere
from cat_swarm_bench.swarm_core import (
    BestRecord,
    Cat,
    CatSwarmOptimizer,
    CsoParams,
    Mode,
    assign_modes,
    evaluation_budget,
    init_population,
    make_seeking_candidates,
    round_half_up,
    run,
    select_candidate,
    selection_weights,
    tracing_step,
)


class ScriptedRng:
    """Generador con valores predefinidos para fijar cada sorteo."""

    def __init__(self, randoms=(), integers=()):
        self._randoms = list(randoms)
        self._integers = list(integers)

    @staticmethod
    def _take(queue, size):
        if size is None:
            return queue.pop(0)
        count = int(np.prod(size))
        return np.array([queue.pop(0) for _ in range(count)], dtype=float).reshape(size)

    def random(self, size=None):
        return self._take(self._randoms, size)

    def integers(self, low, high=None, size=None):
        return self._take(self._integers, size)


def line_objective(lower=-5.0, upper=5.0):
    return Objective(name="F1", dim=1, lower=[lower], upper=[upper], f_min=0.0, func=sphere)


def small_params(**overrides):
    values = dict(n_cats=6, smp=3, max_iters=10)
    values.update(overrides)
    return CsoParams(**values)


# -----------------------------
# Modo búsqueda
# -----------------------------

@pytest.mark.parametrize("sign_bit, expected", [(1, 1.1), (0, 0.9)])
def test_seeking_mutation_scales_position(sign_bit, expected):
    params = CsoParams(smp=1, spc=False, srd=0.2, cdc=1.0)
    cat = Cat(position=np.array([1.0]), velocity=np.zeros(1), fitness=1.0)
    rng = ScriptedRng(randoms=[0.3, 0.5], integers=[sign_bit])

    candidates = make_seeking_candidates(cat, params, line_objective(), rng)

    assert candidates.shape == (1, 1)
    assert candidates[0, 0] == pytest.approx(expected)


def test_seeking_with_spc_keeps_current_position_first(rng):
    params = CsoParams(smp=4, spc=True)
    cat = Cat(position=np.array([1.0]), velocity=np.zeros(1), fitness=1.0)

    candidates = make_seeking_candidates(cat, params, line_objective(), rng)

    assert candidates.shape == (4, 1)
    assert candidates[0, 0] == 1.0


def test_seeking_candidates_stay_inside_box(rng):
    params = CsoParams(smp=20, spc=False, srd=1.0, cdc=1.0)
    cat = Cat(position=np.array([4.9]), velocity=np.zeros(1), fitness=24.01)

    candidates = make_seeking_candidates(cat, params, line_objective(), rng)

    assert np.all(candidates <= 5.0)
    assert np.all(candidates >= -5.0)


def test_mutated_dims_never_zero():
    assert CsoParams(cdc=0.01).mutated_dims(3) == 1
    assert CsoParams(cdc=0.8).mutated_dims(30) == 24


def test_round_half_up():
    assert round_half_up(1.5) == 2
    assert round_half_up(2.5) == 3
    assert round_half_up(2.49) == 2


# -----------------------------
# Selección por ruleta
# -----------------------------

def test_selection_weights_minimize():
    assert selection_weights([2.0, 4.0, 6.0]).tolist() == pytest.approx([1.0, 0.5, 0.0])


def test_selection_weights_maximize():
    assert selection_weights([2.0, 4.0, 6.0], minimize=False).tolist() == pytest.approx([0.0, 0.5, 1.0])


def test_selection_weights_all_equal():
    assert selection_weights([3.0, 3.0, 3.0]).tolist() == [1.0, 1.0, 1.0]


def test_select_candidate_never_picks_zero_weight(rng):
    picks = {select_candidate([0.0, 10.0], True, rng) for _ in range(200)}
    assert picks == {0}


def test_select_candidate_single_candidate():
    assert select_candidate([5.0], True, ScriptedRng()) == 0


def test_select_candidate_empty_raises(rng):
    with pytest.raises(UsageError):
        select_candidate([], True, rng)


# -----------------------------
# Modo rastreo
# -----------------------------

def test_tracing_step_velocity_and_position():
    params = CsoParams(c1=2.0)
    cat = Cat(position=np.array([1.0]), velocity=np.array([0.5]), fitness=1.0)
    best = BestRecord(position=np.array([3.0]), fitness=9.0)

    tracing_step(cat, best, params, line_objective(), ScriptedRng(randoms=[0.5]), v_max=np.array([10.0]))

    assert cat.velocity[0] == pytest.approx(2.5)
    assert cat.position[0] == pytest.approx(3.5)
    assert cat.fitness == pytest.approx(12.25)


def test_tracing_step_clamps_velocity():
    params = CsoParams(c1=2.0)
    cat = Cat(position=np.array([1.0]), velocity=np.array([0.5]), fitness=1.0)
    best = BestRecord(position=np.array([3.0]), fitness=9.0)

    tracing_step(cat, best, params, line_objective(), ScriptedRng(randoms=[0.5]), v_max=np.array([2.0]))

    assert cat.velocity[0] == pytest.approx(2.0)
    assert cat.position[0] == pytest.approx(3.0)


def test_tracing_step_fixed_point(rng):
    params = CsoParams()
    cat = Cat(position=np.array([2.0]), velocity=np.zeros(1), fitness=4.0)
    best = BestRecord(position=np.array([2.0]), fitness=4.0)

    tracing_step(cat, best, params, line_objective(), rng)

    assert cat.position[0] == 2.0
    assert cat.velocity[0] == 0.0


# -----------------------------
# Población y modos
# -----------------------------

@pytest.mark.parametrize("n, mr, expected", [(5, 0.3, 2), (5, 0.0, 0), (10, 0.35, 4), (4, 1.0, 4)])
def test_assign_modes_counts(n, mr, expected, rng):
    cats = [Cat(position=np.zeros(1), velocity=np.zeros(1), fitness=0.0) for _ in range(n)]

    assign_modes(cats, mr, rng)

    assert sum(1 for cat in cats if cat.mode is Mode.TRACING) == expected
    assert all(cat.mode is not Mode.UNASSIGNED for cat in cats)


def test_assign_modes_rejects_bad_ratio(rng):
    with pytest.raises(UsageError):
        assign_modes([], 1.5, rng)


def test_init_population_inside_box(rng):
    objective = lookup("F1").objective(5)
    params = small_params(n_cats=20)

    cats = init_population(params, objective, rng)
    v_max = params.resolve_v_max(objective)

    assert len(cats) == 20
    for cat in cats:
        assert np.all(cat.position >= objective.lower) and np.all(cat.position <= objective.upper)
        assert np.all(np.abs(cat.velocity) <= v_max)
        assert cat.fitness == pytest.approx(objective.evaluate(cat.position))


def test_init_population_rejects_non_finite_bounds(rng):
    class Unbounded:
        name = "inf"
        dim = 1
        lower = np.array([-np.inf])
        upper = np.array([np.inf])

    with pytest.raises(ConfigurationError):
        init_population(CsoParams(v_max=1.0), Unbounded(), rng)


# -----------------------------
# Corridas completas
# -----------------------------

def test_degenerate_box_stays_at_origin(zero_box):
    best, trace = run(small_params(), zero_box, rng_seed=3)

    assert best.fitness == 0.0
    assert best.position.tolist() == [0.0, 0.0]
    assert set(trace.best_fitness) == {0.0}


def test_zero_iterations_returns_initial_best():
    objective = lookup("F1").objective(4)
    best, trace = run(small_params(max_iters=0), objective, rng_seed=1)

    assert len(trace.best_fitness) == 1
    assert trace.evaluations_used == 6
    assert best.fitness == trace.best_fitness[0]


def test_trace_is_monotone_and_complete():
    objective = lookup("F10").objective(5)
    params = small_params(max_iters=25)

    best, trace = run(params, objective, rng_seed=11)

    assert len(trace.best_fitness) == params.max_iters + 1
    assert all(b <= a for a, b in zip(trace.best_fitness, trace.best_fitness[1:]))
    assert trace.best_fitness[-1] == best.fitness
    assert best.fitness == pytest.approx(objective.evaluate(best.position))


def test_evaluations_within_budget():
    objective = lookup("F9").objective(4)
    for spc in (True, False):
        params = small_params(spc=spc, max_iters=15)
        _, trace = run(params, objective, rng_seed=5)
        assert trace.evaluations_used <= evaluation_budget(params)
    assert evaluation_budget(CsoParams(n_cats=10, smp=5, max_iters=100)) == 10 + 100 * 10 * 5


def test_same_seed_same_run():
    objective = lookup("F5").objective(6)
    params = small_params(max_iters=20)

    first_best, first_trace = run(params, objective, rng_seed=99)
    second_best, second_trace = run(params, objective, rng_seed=99)

    assert first_trace.best_fitness == second_trace.best_fitness
    assert np.array_equal(first_best.position, second_best.position)


def test_optimizer_stats_count_steps():
    objective = lookup("F1").objective(3)
    optimizer = CatSwarmOptimizer(small_params(n_cats=10, mr=0.3, max_iters=4), objective)

    optimizer.run(0)

    assert optimizer.stats["tracing_steps"] == 3 * 4
    assert optimizer.stats["seeking_steps"] == 7 * 4


def test_non_finite_fitness_aborts_run():
    def broken(x):
        return np.full(np.shape(x)[:-1], np.nan)

    objective = Objective(name="broken", dim=2, lower=[-1.0, -1.0], upper=[1.0, 1.0], f_min=0.0, func=broken)

    with pytest.raises(NonFiniteFitnessError) as excinfo:
        run(small_params(), objective, rng_seed=0)
    assert excinfo.value.function_id == "broken"
    assert len(excinfo.value.position) == 2


def test_defaults_converge_on_sphere():
    objective = lookup("F1").objective(10)

    best, trace = run(CsoParams(max_iters=100), objective, rng_seed=42)

    assert best.fitness < 1e-3 * trace.best_fitness[0]


def test_default_tracing_step_stays_local():
    objective = lookup("F1").objective(30)
    v_max = CsoParams().resolve_v_max(objective)

    assert np.all(v_max <= 1e-5 * (objective.upper - objective.lower))


@pytest.mark.slow
def test_sphere_reaches_small_error():
    bests = [
        run(CsoParams(), lookup("F1").objective(30), rng_seed=seed)[0].fitness
        for seed in range(30)
    ]
    assert sum(fitness < 1e-6 for fitness in bests) >= 28, bests

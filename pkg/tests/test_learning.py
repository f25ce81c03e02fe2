# -*- coding: utf-8 -*-

# Import 3rd-party libs
import numpy as np
import pytest

# Import moepgg libs
from moepgg.exceptions import CheckpointError, EmptyBatchError
from moepgg.game import Action, RiskPreference, VectorReturn
from moepgg.learning import (
    MLP,
    AgentBrain,
    BrainSettings,
    ReplayBuffer,
    Transition,
    load_checkpoint,
    save_checkpoint,
    scalarize,
)

OBS = np.array([1.5, 1.0, 0.0, 1.0])


def constant_brain(pref, q_defect, q_cooperate, settings=None):
    '''
    Brain whose online and target networks output fixed Q rows
    '''
    brain = AgentBrain(pref, np.random.default_rng(0), settings)
    for network in (brain.online, brain.target):
        for param in network.parameters():
            param[...] = 0.0
        network.biases[-1][...] = tuple(q_defect) + tuple(q_cooperate)
    return brain


def random_transition(rng, terminal=False):
    return Transition(
        observation=np.concatenate(([rng.uniform(0, 7)], rng.integers(0, 2, size=3))),
        action=Action(int(rng.integers(2))),
        reward=VectorReturn(float(rng.uniform(0, 10)), float(rng.choice([0.0, 4.0]))),
        next_observation=np.concatenate(([rng.uniform(0, 7)], rng.integers(0, 2, size=3))),
        terminal=terminal,
    )


def test_mlp_layout(rng):
    network = MLP(BrainSettings().layer_sizes, rng)
    assert network.layer_sizes == (4, 8, 8, 4)
    assert [w.shape for w in network.weights] == [(4, 8), (8, 8), (8, 4)]
    bound = 1 / np.sqrt(4)
    assert np.all(np.abs(network.weights[0]) <= bound)
    assert network.forward(OBS).shape == (1, 4)
    assert network.forward(np.stack([OBS, OBS, OBS])).shape == (3, 4)


def test_zero_network_outputs_zero():
    network = MLP.zeros((4, 8, 8, 4))
    np.testing.assert_array_equal(network.forward(OBS), np.zeros((1, 4)))


def test_q_values_deterministic(rng):
    brain = AgentBrain(RiskPreference(1), rng)
    first = brain.q_values(OBS)
    second = brain.q_values(OBS)
    assert first == second
    assert len(first) == 2
    assert all(isinstance(row, VectorReturn) for row in first)


def test_q_values_rejects_bad_observation(rng):
    brain = AgentBrain(RiskPreference(1), rng)
    with pytest.raises(ValueError):
        brain.q_values(np.zeros(3))


def test_brain_requires_positive_beta(rng):
    with pytest.raises(ValueError):
        AgentBrain(RiskPreference(0), rng)


def test_bootstrap_selection_validated():
    with pytest.raises(ValueError):
        BrainSettings(bootstrap_selection='max')


@pytest.mark.parametrize('beta,expected', [
    (1, Action.DEFECT),
    (2, Action.COOPERATE),
])
def test_select_action_scalarises_q_rows(rng, beta, expected):
    brain = constant_brain(RiskPreference(beta), (3, 4), (6, 0))
    assert brain.q_values(OBS) == (VectorReturn(3, 4), VectorReturn(6, 0))
    assert brain.select_action(OBS, explore=False, rng=rng) is expected


def test_select_action_ties_defect(rng):
    brain = constant_brain(RiskPreference(1), (0, 0), (0, 0))
    assert brain.select_action(OBS, explore=False, rng=rng) is Action.DEFECT
    assert brain.greedy_actions(np.stack([OBS] * 5)).tolist() == [0] * 5


def test_select_action_full_exploration(rng):
    brain = constant_brain(RiskPreference(1), (0, 0), (9, 9), BrainSettings(epsilon=1.0))
    actions = [brain.select_action(OBS, explore=True, rng=rng) for _ in range(4000)]
    assert np.mean([int(action) for action in actions]) == pytest.approx(0.5, abs=0.05)
    assert brain.select_action(OBS, explore=False, rng=rng) is Action.COOPERATE


def test_scalarize_negative_estimates():
    pref = RiskPreference(0.5)
    np.testing.assert_allclose(scalarize(pref, np.array([[-4.0, 1.0], [9.0, 1.0]])), [-1.0, 4.0])


def test_td_target_terminal(rng):
    brain = constant_brain(RiskPreference(1), (5, 5), (7, 7))
    transition = Transition(OBS, Action.DEFECT, VectorReturn(0, 4), OBS, True)
    assert brain.td_target(transition) == pytest.approx((0, 4))


def test_td_target_bootstraps_from_best_target_row():
    brain = constant_brain(RiskPreference(1), (0, 0), (2, 2))
    transition = Transition(OBS, Action.COOPERATE, VectorReturn(1, 0), OBS, False)
    assert brain.td_target(transition) == pytest.approx((2.98, 1.98))


def test_td_target_without_discount():
    brain = constant_brain(RiskPreference(1), (0, 0), (2, 2), BrainSettings(gamma=0.0))
    transition = Transition(OBS, Action.COOPERATE, VectorReturn(1, 3), OBS, False)
    assert brain.td_target(transition) == pytest.approx((1, 3))


def test_td_target_uses_target_network():
    brain = constant_brain(RiskPreference(1), (0, 0), (2, 2))
    brain.online.biases[-1][...] = (50, 50, 0, 0)
    transition = Transition(OBS, Action.COOPERATE, VectorReturn(1, 0), OBS, False)
    assert brain.td_target(transition) == pytest.approx((2.98, 1.98))


@pytest.mark.parametrize('selection,expected', [
    ('q', (10.0, 4.455)),
    ('return', (11.98, 0.0)),
])
def test_bootstrap_selection_rules(selection, expected):
    settings = BrainSettings(bootstrap_selection=selection)
    brain = constant_brain(RiskPreference(2), (0, 4.5), (2, 0), settings)
    transition = Transition(OBS, Action.COOPERATE, VectorReturn(10, 0), OBS, False)
    assert brain.td_target(transition) == pytest.approx(expected)


def test_loss_zero_when_q_matches_targets():
    brain = constant_brain(RiskPreference(1), (0, 4), (2, 0))
    batch = [
        Transition(OBS, Action.DEFECT, VectorReturn(0, 4), OBS, True),
        Transition(OBS, Action.COOPERATE, VectorReturn(2, 0), OBS, True),
    ]
    assert brain.loss(batch) == 0.0


def test_q_scale_multiplies_network_output():
    settings = BrainSettings(q_scale=10.0)
    brain = constant_brain(RiskPreference(1), (0.0, 0.4), (0.2, 0.0), settings)
    np.testing.assert_allclose(brain.q_matrix(OBS), [[0.0, 4.0], [2.0, 0.0]])
    assert brain.select_action(OBS, False, np.random.default_rng(0)) is Action.DEFECT
    batch = [
        Transition(OBS, Action.DEFECT, VectorReturn(0, 4), OBS, True),
        Transition(OBS, Action.COOPERATE, VectorReturn(2, 0), OBS, True),
    ]
    assert brain.loss(batch) == pytest.approx(0.0, abs=1e-20)
    transition = Transition(OBS, Action.COOPERATE, VectorReturn(1, 0), OBS, False)
    assert brain.td_target(transition) == pytest.approx((1.0, 0.99 * 4.0))


def test_q_scale_must_be_positive():
    with pytest.raises(ValueError):
        BrainSettings(q_scale=0.0)


def test_update_rejects_empty_batch(rng):
    brain = AgentBrain(RiskPreference(1), rng)
    with pytest.raises(EmptyBatchError):
        brain.update([])
    assert brain.train_step(rng) is None
    assert brain.updates == 0


@pytest.mark.parametrize('q_scale', (1.0, 10.0))
@pytest.mark.parametrize('seed', range(10))
def test_gradients_match_finite_differences(seed, q_scale):
    rng = np.random.default_rng(seed)
    brain = AgentBrain(RiskPreference(rng.uniform(0.5, 3.0)), rng, BrainSettings(q_scale=q_scale))
    for param in brain.target.parameters():
        param += rng.normal(0, 0.1, size=param.shape)
    batch = [random_transition(rng, terminal=False), random_transition(rng, terminal=True)]
    _, grads = brain.loss_and_gradients(batch)
    step = 1e-5
    for param, grad in zip(brain.online.parameters(), grads):
        numeric = np.zeros_like(param)
        for index in np.ndindex(param.shape):
            original = param[index]
            param[index] = original + step
            upper = brain.loss(batch)
            param[index] = original - step
            lower = brain.loss(batch)
            param[index] = original
            numeric[index] = (upper - lower) / (2 * step)
        np.testing.assert_allclose(grad, numeric, rtol=1e-4, atol=1e-7)


def test_repeated_updates_decrease_loss(rng):
    brain = AgentBrain(RiskPreference(1), rng)
    other = np.array([3.5, 0.0, 1.0, 1.0])
    batch = [
        Transition(OBS, Action.COOPERATE, VectorReturn(10, 4), OBS, True),
        Transition(other, Action.DEFECT, VectorReturn(8, 6), OBS, True),
        Transition(other, Action.COOPERATE, VectorReturn(9, 5), OBS, True),
    ]
    losses = [brain.update(batch) for _ in range(11)]
    assert all(later < earlier for earlier, later in zip(losses, losses[1:]))


def test_single_transition_overfit(rng):
    brain = AgentBrain(RiskPreference(1), rng, BrainSettings(learning_rate=0.005))
    transition = Transition(OBS, Action.COOPERATE, VectorReturn(2, 0), OBS, True)
    for _ in range(500):
        brain.update([transition])
    assert brain.q_values(OBS)[Action.COOPERATE] == pytest.approx((2, 0), abs=0.05)


def test_sync_target(rng):
    brain = AgentBrain(RiskPreference(1), rng)
    assert brain.q_matrix(OBS).tolist() == brain.q_matrix(OBS, target=True).tolist()
    brain.update([Transition(OBS, Action.COOPERATE, VectorReturn(5, 0), OBS, True)])
    assert brain.q_matrix(OBS).tolist() != brain.q_matrix(OBS, target=True).tolist()
    brain.sync_target()
    synced = brain.q_matrix(OBS, target=True).tolist()
    assert brain.q_matrix(OBS).tolist() == synced
    brain.sync_target()
    assert brain.q_matrix(OBS, target=True).tolist() == synced


def test_train_step_syncs_on_schedule(rng):
    brain = AgentBrain(RiskPreference(1), rng, BrainSettings(target_sync_interval=3))
    brain.remember(random_transition(rng, terminal=True) for _ in range(10))
    for _ in range(2):
        assert brain.train_step(rng) is not None
    assert brain.q_matrix(OBS).tolist() != brain.q_matrix(OBS, target=True).tolist()
    brain.train_step(rng)
    assert brain.updates == 3
    assert brain.q_matrix(OBS).tolist() == brain.q_matrix(OBS, target=True).tolist()


def test_replay_buffer_fifo(rng):
    buffer = ReplayBuffer(capacity=3)
    transitions = [random_transition(rng) for _ in range(5)]
    for transition in transitions:
        buffer.push(transition)
    assert len(buffer) == 3
    assert list(buffer) == transitions[2:]


def test_replay_buffer_sampling(rng):
    buffer = ReplayBuffer(capacity=100)
    buffer.extend(random_transition(rng) for _ in range(50))
    batch = buffer.sample(rng, 20)
    assert len(batch) == 20
    assert len({id(transition) for transition in batch}) == 20
    assert len(buffer.sample(rng, 64)) == 50
    with pytest.raises(ValueError):
        ReplayBuffer(capacity=0)


def _train(seed, steps=20):
    rng = np.random.default_rng(seed)
    brain = AgentBrain(RiskPreference(2), rng, BrainSettings(batch_size=8,
                                                             target_sync_interval=5))
    brain.remember(random_transition(rng, terminal=bool(k % 2)) for k in range(30))
    for _ in range(steps):
        brain.train_step(rng)
    return brain


def test_training_is_deterministic():
    first = _train(5)
    second = _train(5)
    for mine, theirs in zip(first.online.parameters(), second.online.parameters()):
        np.testing.assert_array_equal(mine, theirs)


def test_checkpoint_resumes_identically(tmp_path):
    rng = np.random.default_rng(9)
    brain = AgentBrain(RiskPreference(1.5, 0.8, 1.2), rng,
                       BrainSettings(batch_size=8, target_sync_interval=4, epsilon=0.2))
    brain.remember(random_transition(rng, terminal=bool(k % 3 == 0)) for k in range(40))
    for _ in range(6):
        brain.train_step(rng)
    path = str(tmp_path / 'run_0.npz')
    save_checkpoint(path, [brain], rng, meta={'episode': 6})

    brains, restored_rng, meta, eval_rng = load_checkpoint(path)
    restored = brains[0]
    assert meta == {'episode': 6}
    assert eval_rng is None
    assert restored.pref == brain.pref
    assert restored.settings == brain.settings
    assert restored.updates == brain.updates
    assert len(restored.buffer) == len(brain.buffer)
    for _ in range(7):
        brain.train_step(rng)
        restored.train_step(restored_rng)
    for mine, theirs in zip(brain.online.parameters() + brain.target.parameters(),
                            restored.online.parameters() + restored.target.parameters()):
        np.testing.assert_array_equal(mine, theirs)
    assert brain.select_action(OBS, True, rng) is restored.select_action(OBS, True, restored_rng)


def test_checkpoint_errors(tmp_path):
    garbage = tmp_path / 'garbage.npz'
    garbage.write_bytes(b'not a checkpoint')
    with pytest.raises(CheckpointError):
        load_checkpoint(str(garbage))
    with pytest.raises(CheckpointError):
        load_checkpoint(str(tmp_path / 'missing.npz'))
    foreign = tmp_path / 'foreign.npz'
    np.savez(str(foreign), magic=np.array('SOMETHING-ELSE'))
    with pytest.raises(CheckpointError):
        load_checkpoint(str(foreign))

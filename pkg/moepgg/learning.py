# -*- coding: utf-8 -*-
'''
    moepgg.learning
    ~~~~~~~~~~~~~~~

    ===========================
    Multi-Objective DQN Learner
    ===========================

    A small multilayer perceptron with one Q-value per (action, objective)
    pair, trained with hand written backpropagation and RMSprop against
    vector TD targets from a target network. Actions are chosen by applying
    the agent's utility to the vector Q estimate of each action.
'''

# Import Python libs
from __future__ import annotations
import json
import logging
import zipfile
from collections import deque
from dataclasses import asdict, dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

# Import 3rd-party libs
import numpy as np

# Import moepgg libs
from moepgg.exceptions import CheckpointError, EmptyBatchError
from moepgg.game import Action, RiskPreference, VectorReturn

log = logging.getLogger(__name__)

OBSERVATION_SIZE = 4
N_ACTIONS = 2
N_OBJECTIVES = 2

CHECKPOINT_MAGIC = 'MOEPGG-CHECKPOINT'
CHECKPOINT_VERSION = 1

BOOTSTRAP_SELECTIONS = ('q', 'return')


class MLP:
    '''
    Fully connected network, ReLU between layers and identity output.

    ``weights[k]`` has shape ``(fan_in, fan_out)``; inputs are batched along
    the first axis.
    '''

    def __init__(self, layer_sizes: Sequence[int], rng: Optional[np.random.Generator] = None):
        self.layer_sizes = tuple(int(size) for size in layer_sizes)
        if len(self.layer_sizes) < 2:
            raise ValueError('An MLP needs at least an input and an output layer')
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            if rng is None:
                self.weights.append(np.zeros((fan_in, fan_out)))
                self.biases.append(np.zeros(fan_out))
                continue
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(rng.uniform(-bound, bound, size=fan_out))

    @classmethod
    def zeros(cls, layer_sizes: Sequence[int]) -> 'MLP':
        return cls(layer_sizes, rng=None)

    def parameters(self) -> List[np.ndarray]:
        params = []
        for weight, bias in zip(self.weights, self.biases):
            params.extend((weight, bias))
        return params

    def copy(self) -> 'MLP':
        clone = MLP.zeros(self.layer_sizes)
        clone.load_from(self)
        return clone

    def load_from(self, other: 'MLP'):
        if other.layer_sizes != self.layer_sizes:
            raise ValueError('Layer sizes differ: {0} vs {1}'.format(
                self.layer_sizes, other.layer_sizes))
        for mine, theirs in zip(self.parameters(), other.parameters()):
            mine[...] = theirs

    def forward(self, inputs: np.ndarray) -> np.ndarray:
        return self.forward_with_cache(inputs)[0]

    def forward_with_cache(self, inputs: np.ndarray):
        activation = np.atleast_2d(np.asarray(inputs, dtype=float))
        if activation.shape[1] != self.layer_sizes[0]:
            raise ValueError('Expected inputs of size {0}, got {1}'.format(
                self.layer_sizes[0], activation.shape[1]))
        layer_inputs = []
        pre_activations = []
        last = len(self.weights) - 1
        for index, (weight, bias) in enumerate(zip(self.weights, self.biases)):
            layer_inputs.append(activation)
            pre_activation = activation @ weight + bias
            pre_activations.append(pre_activation)
            activation = pre_activation if index == last else np.maximum(pre_activation, 0.0)
        return activation, (layer_inputs, pre_activations)

    def backward(self, cache, grad_output: np.ndarray) -> List[np.ndarray]:
        '''
        Gradients of every parameter, in ``parameters()`` order, given the
        gradient of the loss with respect to the network output.
        '''
        layer_inputs, pre_activations = cache
        grads = [None] * (2 * len(self.weights))
        grad = grad_output
        for index in range(len(self.weights) - 1, -1, -1):
            grads[2 * index] = layer_inputs[index].T @ grad
            grads[2 * index + 1] = grad.sum(axis=0)
            if index:
                grad = (grad @ self.weights[index].T) * (pre_activations[index - 1] > 0)
        return grads


class RMSProp:
    '''
    RMSprop without momentum: ``v = a*v + (1-a)*g^2``, ``p -= lr*g/(sqrt(v)+eps)``
    '''

    def __init__(self, parameters: Iterable[np.ndarray], learning_rate: float = 0.001,
                 smoothing: float = 0.99, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.smoothing = smoothing
        self.eps = eps
        self.square_avg = [np.zeros_like(param) for param in parameters]

    def step(self, parameters: Sequence[np.ndarray], grads: Sequence[np.ndarray]):
        for param, grad, square_avg in zip(parameters, grads, self.square_avg):
            square_avg *= self.smoothing
            square_avg += (1.0 - self.smoothing) * grad * grad
            param -= self.learning_rate * grad / (np.sqrt(square_avg) + self.eps)


@dataclass(frozen=True)
class Transition:
    observation: np.ndarray
    action: Action
    reward: VectorReturn
    next_observation: np.ndarray
    terminal: bool


class ReplayBuffer:
    '''
    Bounded FIFO of transitions; the oldest one is evicted first
    '''

    def __init__(self, capacity: int = 10000):
        if capacity < 1:
            raise ValueError('Replay buffer capacity must be positive')
        self.capacity = capacity
        self._items = deque(maxlen=capacity)

    def push(self, transition: Transition):
        self._items.append(transition)

    def extend(self, transitions: Iterable[Transition]):
        self._items.extend(transitions)

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self._items)

    def sample(self, rng: np.random.Generator, batch_size: int) -> List[Transition]:
        '''
        Uniform sample without replacement; the whole buffer when it holds
        fewer than ``batch_size`` transitions.
        '''
        if len(self._items) <= batch_size:
            return list(self._items)
        picks = rng.choice(len(self._items), size=batch_size, replace=False)
        return [self._items[int(index)] for index in picks]


@dataclass(frozen=True)
class BrainSettings:
    hidden_size: int = 8
    hidden_layers: int = 2
    learning_rate: float = 0.001
    rms_smoothing: float = 0.99
    rms_eps: float = 1e-8
    gamma: float = 0.99
    epsilon: float = 0.1
    buffer_capacity: int = 10000
    batch_size: int = 64
    target_sync_interval: int = 100
    bootstrap_selection: str = 'q'
    # the network predicts Q / q_scale
    q_scale: float = 1.0

    def __post_init__(self):
        if self.bootstrap_selection not in BOOTSTRAP_SELECTIONS:
            raise ValueError('bootstrap_selection must be one of {0}'.format(
                ', '.join(BOOTSTRAP_SELECTIONS)))
        if not self.q_scale > 0:
            raise ValueError('q_scale must be positive, got {0}'.format(self.q_scale))

    @property
    def layer_sizes(self) -> Tuple[int, ...]:
        return (OBSERVATION_SIZE,) + (self.hidden_size,) * self.hidden_layers + \
            (N_ACTIONS * N_OBJECTIVES,)


def scalarize(pref: RiskPreference, estimates: np.ndarray) -> np.ndarray:
    '''
    Utility of vector estimates along the last axis.

    Network estimates of the collective return can dip below zero; there the
    power is extended as ``-|x| ** beta`` which keeps the ordering and
    matches the utility on non-negative inputs.
    '''
    estimates = np.asarray(estimates, dtype=float)
    collective = estimates[..., 0]
    magnitude = np.power(np.abs(collective), pref.beta)
    powered = np.where(collective < 0, -magnitude, magnitude)
    return pref.weight_collective * powered + pref.weight_individual * estimates[..., 1]


def _stack(batch: Sequence[Transition]):
    observations = np.array([transition.observation for transition in batch], dtype=float)
    actions = np.array([int(transition.action) for transition in batch], dtype=int)
    rewards = np.array([tuple(transition.reward) for transition in batch], dtype=float)
    next_observations = np.array([transition.next_observation for transition in batch],
                                 dtype=float)
    terminal = np.array([bool(transition.terminal) for transition in batch], dtype=bool)
    return observations, actions, rewards, next_observations, terminal


class AgentBrain:
    '''
    One learner: online and target networks, optimizer, replay buffer and
    risk preference. A brain is mutated by a single owner at a time.
    '''

    def __init__(self, pref: RiskPreference, rng: np.random.Generator,
                 settings: Optional[BrainSettings] = None):
        if pref.beta <= 0:
            raise ValueError('Learning agents need beta > 0, got {0}'.format(pref.beta))
        self.pref = pref
        self.settings = settings or BrainSettings()
        self.online = MLP(self.settings.layer_sizes, rng)
        self.target = self.online.copy()
        self.optimizer = RMSProp(self.online.parameters(), self.settings.learning_rate,
                                 self.settings.rms_smoothing, self.settings.rms_eps)
        self.buffer = ReplayBuffer(self.settings.buffer_capacity)
        self.updates = 0

    @property
    def epsilon(self) -> float:
        return self.settings.epsilon

    @property
    def gamma(self) -> float:
        return self.settings.gamma

    def _estimates(self, network: MLP, observations: np.ndarray) -> np.ndarray:
        output = network.forward(observations).reshape(-1, N_ACTIONS, N_OBJECTIVES)
        return self.settings.q_scale * output

    def q_matrix(self, observation: np.ndarray, target: bool = False) -> np.ndarray:
        '''
        ``(actions, objectives)`` estimates for a single observation
        '''
        observation = np.asarray(observation, dtype=float)
        if observation.shape != (OBSERVATION_SIZE,):
            raise ValueError('Observation must have {0} entries, got shape {1}'.format(
                OBSERVATION_SIZE, observation.shape))
        network = self.target if target else self.online
        return self._estimates(network, observation)[0]

    def q_values(self, observation: np.ndarray) -> Tuple[VectorReturn, ...]:
        '''
        Vector Q estimate of every action, indexed by ``Action`` value
        '''
        return tuple(VectorReturn(float(row[0]), float(row[1]))
                     for row in self.q_matrix(observation))

    def greedy_actions(self, observations: np.ndarray) -> np.ndarray:
        scores = scalarize(self.pref, self._estimates(self.online, observations))
        return (scores[:, Action.COOPERATE] > scores[:, Action.DEFECT]).astype(int)

    def select_action(self, observation: np.ndarray, explore: bool,
                      rng: np.random.Generator) -> Action:
        '''
        Epsilon-greedy over the utility of each action's Q vector; ties go
        to defection.
        '''
        if explore and rng.random() < self.settings.epsilon:
            return Action(int(rng.integers(N_ACTIONS)))
        scores = scalarize(self.pref, self.q_matrix(observation))
        if scores[Action.COOPERATE] > scores[Action.DEFECT]:
            return Action.COOPERATE
        return Action.DEFECT

    def _targets(self, rewards, next_observations, terminal) -> np.ndarray:
        gamma = self.settings.gamma
        q_next = self._estimates(self.target, next_observations)
        if self.settings.bootstrap_selection == 'return':
            candidates = rewards[:, np.newaxis, :] + gamma * q_next
        else:
            candidates = q_next
        scores = scalarize(self.pref, candidates)
        best = (scores[:, Action.COOPERATE] > scores[:, Action.DEFECT]).astype(int)
        bootstrap = q_next[np.arange(len(best)), best]
        bootstrap[terminal] = 0.0
        return rewards + gamma * bootstrap

    def td_target(self, transition: Transition) -> VectorReturn:
        '''
        Vector TD target; the utility only picks the bootstrap action
        '''
        _, _, rewards, next_observations, terminal = _stack([transition])
        target = self._targets(rewards, next_observations, terminal)[0]
        return VectorReturn(float(target[0]), float(target[1]))

    def loss_and_gradients(self, batch: Sequence[Transition]):
        '''
        Mean squared error over the batch and both objectives of the taken
        actions' Q rows, and its gradient for every online parameter.
        '''
        if not batch:
            raise EmptyBatchError('Cannot compute a loss without transitions')
        observations, actions, rewards, next_observations, terminal = _stack(batch)
        targets = self._targets(rewards, next_observations, terminal)
        output, cache = self.online.forward_with_cache(observations)
        scale = self.settings.q_scale
        q = scale * output.reshape(-1, N_ACTIONS, N_OBJECTIVES)
        rows = np.arange(len(actions))
        residual = q[rows, actions] - targets
        loss = float(np.mean(residual ** 2))
        grad_q = np.zeros_like(q)
        grad_q[rows, actions] = 2.0 * scale * residual / residual.size
        grads = self.online.backward(cache, grad_q.reshape(len(actions), -1))
        return loss, grads

    def loss(self, batch: Sequence[Transition]) -> float:
        return self.loss_and_gradients(batch)[0]

    def update(self, batch: Sequence[Transition]) -> float:
        '''
        One RMSprop step on ``batch``; returns the loss before the step
        '''
        loss, grads = self.loss_and_gradients(batch)
        self.optimizer.step(self.online.parameters(), grads)
        self.updates += 1
        return loss

    def sync_target(self):
        self.target.load_from(self.online)

    def remember(self, transitions: Iterable[Transition]):
        self.buffer.extend(transitions)

    def train_step(self, rng: np.random.Generator) -> Optional[float]:
        '''
        Sample a minibatch and update; syncs the target network every
        ``target_sync_interval`` updates. Returns None when the buffer is
        empty.
        '''
        if not len(self.buffer):
            log.debug('Skipping update, replay buffer is empty')
            return None
        loss = self.update(self.buffer.sample(rng, self.settings.batch_size))
        if self.updates % self.settings.target_sync_interval == 0:
            self.sync_target()
        return loss


# ----- Checkpoints ------------------------------------------------------------------------------

def _text(value) -> np.ndarray:
    return np.array(value)


def _brain_arrays(prefix: str, brain: AgentBrain) -> dict:
    arrays = {
        prefix + 'settings': _text(json.dumps(asdict(brain.settings), sort_keys=True)),
        prefix + 'pref': np.array([brain.pref.beta, brain.pref.weight_collective,
                                   brain.pref.weight_individual]),
        prefix + 'updates': np.array(brain.updates),
    }
    for index, param in enumerate(brain.online.parameters()):
        arrays['{0}online.{1}'.format(prefix, index)] = param
    for index, param in enumerate(brain.target.parameters()):
        arrays['{0}target.{1}'.format(prefix, index)] = param
    for index, square_avg in enumerate(brain.optimizer.square_avg):
        arrays['{0}rms.{1}'.format(prefix, index)] = square_avg
    if len(brain.buffer):
        observations, actions, rewards, next_observations, terminal = _stack(list(brain.buffer))
    else:
        observations = np.zeros((0, OBSERVATION_SIZE))
        actions = np.zeros(0, dtype=int)
        rewards = np.zeros((0, N_OBJECTIVES))
        next_observations = np.zeros((0, OBSERVATION_SIZE))
        terminal = np.zeros(0, dtype=bool)
    arrays[prefix + 'buffer.observations'] = observations
    arrays[prefix + 'buffer.actions'] = actions
    arrays[prefix + 'buffer.rewards'] = rewards
    arrays[prefix + 'buffer.next_observations'] = next_observations
    arrays[prefix + 'buffer.terminal'] = terminal
    return arrays


def _restore_brain(prefix: str, data) -> AgentBrain:
    settings = BrainSettings(**json.loads(data[prefix + 'settings'].item()))
    beta, weight_collective, weight_individual = (float(v) for v in data[prefix + 'pref'])
    brain = AgentBrain(RiskPreference(beta, weight_collective, weight_individual),
                       np.random.default_rng(0), settings)
    for index, param in enumerate(brain.online.parameters()):
        param[...] = data['{0}online.{1}'.format(prefix, index)]
    for index, param in enumerate(brain.target.parameters()):
        param[...] = data['{0}target.{1}'.format(prefix, index)]
    for index, square_avg in enumerate(brain.optimizer.square_avg):
        square_avg[...] = data['{0}rms.{1}'.format(prefix, index)]
    brain.updates = int(data[prefix + 'updates'])
    rows = zip(data[prefix + 'buffer.observations'], data[prefix + 'buffer.actions'],
               data[prefix + 'buffer.rewards'], data[prefix + 'buffer.next_observations'],
               data[prefix + 'buffer.terminal'])
    brain.remember(
        Transition(np.array(obs), Action(int(action)),
                   VectorReturn(float(reward[0]), float(reward[1])),
                   np.array(next_obs), bool(done))
        for obs, action, reward, next_obs, done in rows
    )
    return brain


class Checkpoint(NamedTuple):
    brains: List[AgentBrain]
    rng: Optional[np.random.Generator]
    meta: dict
    eval_rng: Optional[np.random.Generator] = None


def _generator_state(rng: Optional[np.random.Generator]) -> np.ndarray:
    return _text(json.dumps(rng.bit_generator.state if rng is not None else None))


def _generator(state) -> Optional[np.random.Generator]:
    if state is None:
        return None
    rng = np.random.Generator(getattr(np.random, state['bit_generator'])())
    rng.bit_generator.state = state
    return rng


def save_checkpoint(path, brains: Sequence[AgentBrain], rng: Optional[np.random.Generator] = None,
                    meta: Optional[dict] = None,
                    eval_rng: Optional[np.random.Generator] = None):
    '''
    Write brains, the run's training and evaluation generator states and
    free-form metadata to a versioned ``.npz`` archive.
    '''
    arrays = {
        'magic': _text(CHECKPOINT_MAGIC),
        'version': np.array(CHECKPOINT_VERSION),
        'n_brains': np.array(len(brains)),
        'meta': _text(json.dumps(meta or {}, sort_keys=True)),
        'rng_state': _generator_state(rng),
        'eval_rng_state': _generator_state(eval_rng),
    }
    for index, brain in enumerate(brains):
        arrays.update(_brain_arrays('brain{0}.'.format(index), brain))
    try:
        with open(path, 'wb') as handle:
            np.savez(handle, **arrays)
    except OSError as exc:
        raise CheckpointError('Unable to write checkpoint {0}: {1}'.format(path, exc))
    log.debug('Saved %d brains to %s', len(brains), path)


def load_checkpoint(path) -> Checkpoint:
    '''
    Generators are None when no state was stored for them.
    '''
    try:
        with np.load(path, allow_pickle=False) as data:
            if 'magic' not in data.files or data['magic'].item() != CHECKPOINT_MAGIC:
                raise CheckpointError('{0} is not a moepgg checkpoint'.format(path))
            version = int(data['version'])
            if version != CHECKPOINT_VERSION:
                raise CheckpointError('Unsupported checkpoint version {0} in {1}'.format(
                    version, path))
            brains = [_restore_brain('brain{0}.'.format(index), data)
                      for index in range(int(data['n_brains']))]
            state = json.loads(data['rng_state'].item())
            eval_state = None
            if 'eval_rng_state' in data.files:
                eval_state = json.loads(data['eval_rng_state'].item())
            meta = json.loads(data['meta'].item())
    except (OSError, KeyError, ValueError, zipfile.BadZipFile) as exc:
        raise CheckpointError('Unable to read checkpoint {0}: {1}'.format(path, exc))
    return Checkpoint(brains, _generator(state), meta, _generator(eval_state))

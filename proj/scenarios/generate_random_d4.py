"""Writes random_d4_rank2.json: a fixed-seed four-level scenario with a rank-2 projector."""
import json
import pathlib

import numpy as np

SEED = 20240611
rng = np.random.default_rng(SEED)


def hermitian(dim, norm=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (a + a.conj().T) / 2
    return h * (norm / np.linalg.norm(h, 2))


def encode(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


dim = 4
h0, h1 = hermitian(dim), hermitian(dim, 0.5)
a0, a1 = hermitian(dim), hermitian(dim, 0.5)
amp = rng.normal(size=2) + 1j * rng.normal(size=2)
amp /= np.linalg.norm(amp)
psi0 = np.concatenate([amp, np.zeros(2)])

scenario = {
    "id": "random_d4_rank2",
    "dim": dim,
    "horizon": 1.0,
    "hamiltonian": {
        "kind": "linear_combination",
        "terms": [
            {"matrix": encode(h0), "waveform": {"type": "const", "value": 1.0}},
            {"matrix": encode(h1), "waveform": {"type": "sin", "omega": 3.0}},
        ],
    },
    "base_projector": {"preset": "rank_diagonal", "rank": 2},
    "frame_generator": {
        "kind": "linear_combination",
        "terms": [
            {"matrix": encode(a0), "waveform": {"type": "const", "value": 1.0}},
            {"matrix": encode(a1), "waveform": {"type": "cos", "omega": 2.0}},
        ],
    },
    "initial_state": [[float(z.real), float(z.imag)] for z in psi0],
    "integrator": {"n_steps": 1000},
    "stroboscopic": {"n_list": [25, 50, 100, 200], "micro_substeps": 10, "seeds": [1, 2, 3]},
}

out = pathlib.Path(__file__).with_name("random_d4_rank2.json")
out.write_text(json.dumps(scenario, indent=2) + "\n")

"""Noiseless reconstruction of random pure states with each built-in frame.

The 11-vector frame determines a pure vector up to phase, but the estimator
searches all density matrices. For some inputs a mixed state reproduces the
same 11 intensities exactly, so the fit can land on it. This script counts how
often that happens and shows one example.
"""

import argparse

import numpy as np

from qst4.estimator import FitOptions, reconstruct
from qst4.frames import mub_frame, vinzant_frame
from qst4.metrics import fidelity_pure, purity
from qst4.qmath import herm_eig
from qst4.states import PureState4


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    frames = {"mub20": mub_frame(), "vinzant11": vinzant_frame()}
    misses = {name: [] for name in frames}
    for k in range(args.n):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        state = PureState4(v / np.linalg.norm(v))
        for name, frame in frames.items():
            measured = frame.intensities(state)
            res = reconstruct(frame, measured, FitOptions(seed=k))
            f = fidelity_pure(state, res.rho)
            if f < 0.999:
                misses[name].append((state, res, f, measured))
    for name, found in misses.items():
        print(f"{name}: {len(found)}/{args.n} states with fidelity < 0.999")
    if misses["vinzant11"]:
        state, res, f, measured = misses["vinzant11"][0]
        frame = frames["vinzant11"]
        fitted = np.real(np.einsum("ki,ij,kj->k", frame.vectors.conj(), res.rho.mat, frame.vectors))
        print("example psi =", np.round(state.vec, 4))
        print(f"  fidelity {f:.4f}, purity {purity(res.rho):.4f}, residual {res.residual:.2e}")
        print("  eigenvalues of fit:", np.round(herm_eig(res.rho.mat)[0], 6))
        print(f"  max intensity mismatch: {np.abs(fitted - measured).max():.2e}")


if __name__ == "__main__":
    main()
